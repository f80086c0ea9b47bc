#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vbench/cache.hpp"
#include "vbench/hog.hpp"
#include "vbench/image.hpp"
#include "vbench/lbp.hpp"
#include "vbench/mpca.hpp"
#include "vbench/parallel.hpp"
#include "vbench/rng.hpp"
#include "vbench/sparse.hpp"
#include "vbench/svm.hpp"

namespace vbench {

enum class FeatureKind { hog, hmlbp, mpca };
enum class ClassifierKind { svm, src };

inline const char* feature_name(FeatureKind f) {
    switch (f) {
    case FeatureKind::hog: return "hog";
    case FeatureKind::hmlbp: return "hmlbp";
    case FeatureKind::mpca: return "mpca";
    }
    return "?";
}

inline const char* classifier_name(ClassifierKind c) {
    return c == ClassifierKind::svm ? "svm" : "src";
}

// Seeded Gaussian random projection applied before SRC when the feature
// dimension is too high for a training-set-sized dictionary.
struct ReductionSpec {
    int dim = 256;
    std::uint64_t seed = 0x5edc'1104'f2aULL;
};

// One feature/classifier combination plus all of its knobs. Any feature may
// pair with any classifier; the three paper baselines are hmlbp+svm,
// mpca+svm and hog+src.
struct MethodSpec {
    FeatureKind feature = FeatureKind::hog;
    ClassifierKind classifier = ClassifierKind::src;
    HogParams hog;
    HmlbpParams hmlbp;
    MpcaParams mpca;
    SvmParams svm;
    double src_epsilon = 0.05;
    std::optional<int> src_max_sparsity;
    std::optional<ReductionSpec> reduction; // defaulted for SRC on >512-dim features

    std::string name() const {
        return std::string(feature_name(feature)) + "+" + classifier_name(classifier);
    }

    bool is_paper_baseline() const {
        return (feature == FeatureKind::hmlbp && classifier == ClassifierKind::svm) ||
               (feature == FeatureKind::mpca && classifier == ClassifierKind::svm) ||
               (feature == FeatureKind::hog && classifier == ClassifierKind::src);
    }

    // Hash of everything that determines a per-chip descriptor; the cache key
    // half that invalidates on any parameter change. MPCA features depend on
    // the training split and are never cached per chip.
    std::uint64_t feature_params_hash() const {
        std::ostringstream ss;
        ss << feature_name(feature);
        if (feature == FeatureKind::hog)
            ss << ":c" << hog.cell_size << ":b" << hog.block_cells << ":s" << hog.block_stride
               << ":n" << hog.bin_count << ":g" << hog.signed_orientation << ":k" << hog.clip;
        if (feature == FeatureKind::hmlbp) {
            for (const auto& s : hmlbp.scales) ss << ":r" << s.radius << "p" << s.samples;
            ss << ":n" << hmlbp.normalize;
        }
        const std::string s = ss.str();
        return fnv1a(s.data(), s.size());
    }
};

inline MethodSpec parse_method(const std::string& name) {
    auto plus = name.find('+');
    if (plus == std::string::npos)
        throw std::invalid_argument("parse_method: expected feature+classifier, got " + name);
    const std::string feat = name.substr(0, plus), clf = name.substr(plus + 1);
    MethodSpec m;
    if (feat == "hog") m.feature = FeatureKind::hog;
    else if (feat == "hmlbp") m.feature = FeatureKind::hmlbp;
    else if (feat == "mpca") m.feature = FeatureKind::mpca;
    else throw std::invalid_argument("parse_method: unknown feature " + feat);
    if (clf == "svm") m.classifier = ClassifierKind::svm;
    else if (clf == "src") m.classifier = ClassifierKind::src;
    else throw std::invalid_argument("parse_method: unknown classifier " + clf);
    return m;
}

struct ExtractionStats {
    std::atomic<long> extractions{0};
    std::atomic<long> cache_hits{0};
};

struct RunContext {
    FeatureCache* cache = nullptr;
    ExtractionStats* stats = nullptr;
    int jobs = 1;
};

// Per-chip descriptor for the split-independent extractors (hog / hmlbp).
inline std::vector<double> extract_chip_feature(const ImageChip& chip, const MethodSpec& method) {
    switch (method.feature) {
    case FeatureKind::hog: {
        ImageChip in = chip;
        const int cs = method.hog.cell_size;
        if (chip.width() % cs != 0 || chip.height() % cs != 0) {
            int w = std::max(cs, (chip.width() / cs) * cs);
            int h = std::max(cs, (chip.height() / cs) * cs);
            in = resize_bilinear(chip, w, h);
        }
        return hog_descriptor(in, method.hog).values;
    }
    case FeatureKind::hmlbp:
        return hmlbp_descriptor(chip, method.hmlbp).values;
    case FeatureKind::mpca:
        throw std::invalid_argument("extract_chip_feature: mpca features are split-dependent");
    }
    throw std::invalid_argument("extract_chip_feature: bad feature kind");
}

// Dataset-wide extraction with cache passthrough; rows follow chip order.
inline Eigen::MatrixXd extract_features(const std::vector<ImageChip>& chips,
                                        const MethodSpec& method, RunContext& ctx) {
    if (chips.empty()) throw std::invalid_argument("extract_features: no chips");
    const std::uint64_t params_hash = method.feature_params_hash();
    std::vector<std::vector<double>> rows(chips.size());
    parallel_for(static_cast<int>(chips.size()), ctx.jobs, [&](int i) {
        const std::uint64_t chip_hash = chips[i].content_hash();
        if (ctx.cache) {
            if (const auto* hit = ctx.cache->lookup(chip_hash, params_hash)) {
                rows[i] = *hit;
                if (ctx.stats) ctx.stats->cache_hits.fetch_add(1);
                return;
            }
        }
        rows[i] = extract_chip_feature(chips[i], method);
        if (ctx.stats) ctx.stats->extractions.fetch_add(1);
        if (ctx.cache) ctx.cache->insert(chip_hash, params_hash, rows[i]);
    });
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw NumericError("extract_features: inconsistent descriptor dimensions");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return out;
}

// Zero mean, unit variance per dimension; statistics always come from the
// training split (or the pretraining set in adaptation mode).
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd inv_std;

    static Standardizer fit(const Eigen::MatrixXd& x) {
        Standardizer s;
        s.mean = x.colwise().mean();
        Eigen::VectorXd var = (x.rowwise() - s.mean.transpose()).array().square().colwise().mean();
        s.inv_std.resize(var.size());
        for (Eigen::Index i = 0; i < var.size(); ++i) {
            double sd = std::sqrt(var[i]);
            s.inv_std[i] = sd > 1e-12 ? 1.0 / sd : 0.0; // dead feature: stays 0
        }
        return s;
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
        return (x.rowwise() - mean.transpose()).array().rowwise() * inv_std.transpose().array();
    }
};

// Gaussian projection matrix, entries N(0,1)/sqrt(out_dim), fully determined
// by the seed.
inline Eigen::MatrixXd random_projection(int out_dim, int in_dim, std::uint64_t seed) {
    if (out_dim < 1 || in_dim < 1)
        throw std::invalid_argument("random_projection: dimensions must be positive");
    CounterRng rng(seed, 0x9a11ULL);
    Eigen::MatrixXd m(out_dim, in_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(out_dim));
    std::uint64_t counter = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double u1 = 1.0 - static_cast<double>(rng.word_at(counter++) >> 11) * 0x1.0p-53;
            double u2 = static_cast<double>(rng.word_at(counter++) >> 11) * 0x1.0p-53;
            m(r, c) = scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
    return m;
}

} // namespace vbench
