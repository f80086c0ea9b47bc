#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vbench/dataset.hpp"
#include "vbench/method.hpp"
#include "vbench/split.hpp"

namespace vbench {

// Chips plus per-method derived data, shared across the (split x shuffle)
// grid so split-independent descriptors are extracted once.
struct PreparedDataset {
    std::vector<ImageChip> chips;
    std::vector<int> labels;
    std::map<std::uint64_t, Eigen::MatrixXd> feature_memo; // params hash -> N x D
    std::vector<Eigen::MatrixXd> matrices;                 // chip matrices for mpca

    static PreparedDataset from(const LabeledDataset& ds) {
        PreparedDataset p;
        p.chips = ds.chips;
        p.labels = ds.labels();
        return p;
    }

    const std::vector<Eigen::MatrixXd>& chip_matrices() {
        if (matrices.empty()) {
            matrices.reserve(chips.size());
            for (const auto& c : chips) matrices.push_back(chip_to_matrix(c));
        }
        return matrices;
    }

    const Eigen::MatrixXd& features_for(const MethodSpec& method, RunContext& ctx) {
        const std::uint64_t key = method.feature_params_hash();
        auto it = feature_memo.find(key);
        if (it == feature_memo.end())
            it = feature_memo.emplace(key, extract_features(chips, method, ctx)).first;
        return it->second;
    }
};

struct RunResult {
    double accuracy = 0.0;
    std::array<long, 16> confusion{}; // row: true class, col: predicted
    int n_train = 0;
    int n_validation = 0;
    int n_test = 0;
};

namespace detail {

inline Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
    return out;
}

inline std::vector<int> take_labels(const std::vector<int>& labels, const std::vector<int>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(labels[i]);
    return out;
}

struct FeatureViews {
    Eigen::MatrixXd train, validation, test;
};

// Materialize per-split feature matrices under training-only statistics:
// hog/hmlbp come from the shared per-chip matrix, mpca is fit on the
// training split alone and then projects every sample.
inline FeatureViews build_features(const MethodSpec& method, PreparedDataset& data,
                                   const SplitResult& split, RunContext& ctx) {
    FeatureViews v;
    if (method.feature == FeatureKind::mpca) {
        const auto& mats = data.chip_matrices();
        std::vector<Eigen::MatrixXd> train_mats;
        train_mats.reserve(split.train.size());
        for (int i : split.train) train_mats.push_back(mats[i]);
        MpcaModel model = mpca_fit(train_mats, method.mpca);
        auto project = [&](const std::vector<int>& idx) {
            Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()),
                                static_cast<Eigen::Index>(model.p1()) * model.p2());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                FeatureVector f = mpca_project(mats[idx[i]], model);
                for (std::size_t j = 0; j < f.values.size(); ++j)
                    out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f.values[j];
            }
            return out;
        };
        v.train = project(split.train);
        v.validation = project(split.validation);
        v.test = project(split.test);
        return v;
    }
    const Eigen::MatrixXd& all = data.features_for(method, ctx);
    v.train = take_rows(all, split.train);
    v.validation = take_rows(all, split.validation);
    v.test = take_rows(all, split.test);
    return v;
}

inline void score_predictions(const std::vector<int>& truth, const std::vector<int>& predicted,
                              RunResult& res) {
    long correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == predicted[i]) ++correct;
        ++res.confusion[static_cast<std::size_t>(truth[i]) * kClassCount + predicted[i]];
    }
    res.accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / truth.size();
}

} // namespace detail

// Extract features (training statistics only), train the classifier, and
// score the test split. The validation block is carved out and withheld from
// training; the default configuration runs no parameter search over it.
inline RunResult run_method(const MethodSpec& method, PreparedDataset& data,
                            const SplitResult& split, RunContext& ctx) {
    if (split.train.empty() || split.test.empty())
        throw std::invalid_argument("run_method: empty train or test split");

    detail::FeatureViews views = detail::build_features(method, data, split, ctx);
    std::vector<int> train_labels = detail::take_labels(data.labels, split.train);
    std::vector<int> test_labels = detail::take_labels(data.labels, split.test);

    RunResult res;
    res.n_train = static_cast<int>(split.train.size());
    res.n_validation = static_cast<int>(split.validation.size());
    res.n_test = static_cast<int>(split.test.size());

    std::vector<int> predicted(test_labels.size(), 0);
    if (method.classifier == ClassifierKind::svm) {
        Standardizer std = Standardizer::fit(views.train);
        LinearSvmModel model = svm_train(std.apply(views.train), train_labels, method.svm);
        Eigen::MatrixXd test = std.apply(views.test);
        for (Eigen::Index i = 0; i < test.rows(); ++i)
            predicted[static_cast<std::size_t>(i)] = svm_predict(model, test.row(i).transpose());
    } else {
        Eigen::MatrixXd train = views.train, test = views.test;
        std::optional<ReductionSpec> reduction = method.reduction;
        if (!reduction && train.cols() > 512) reduction = ReductionSpec{};
        if (reduction) {
            Eigen::MatrixXd proj =
                random_projection(reduction->dim, static_cast<int>(train.cols()), reduction->seed);
            train = train * proj.transpose();
            test = test * proj.transpose();
        }
        SrcModel model = src_fit(train, train_labels, method.src_epsilon, method.src_max_sparsity);
        parallel_for(static_cast<int>(test.rows()), ctx.jobs, [&](int i) {
            predicted[static_cast<std::size_t>(i)] =
                src_classify(model, test.row(i).transpose()).predicted;
        });
    }
    detail::score_predictions(test_labels, predicted, res);
    return res;
}

struct ShuffleRun {
    std::uint64_t shuffle_seed = 0;
    RunResult result;
};

struct ShuffleRecord {
    std::string method;
    double split_fraction = 0.0;
    std::vector<ShuffleRun> runs;

    double mean_accuracy() const {
        double sum = 0.0;
        for (const auto& r : runs) sum += r.result.accuracy;
        return runs.empty() ? 0.0 : sum / static_cast<double>(runs.size());
    }
};

// n independent stratified re-splits; shuffle i draws its seed from
// (master_seed, i).
inline ShuffleRecord run_shuffles(const MethodSpec& method, PreparedDataset& data,
                                  double train_fraction, double validation_holdout,
                                  std::uint64_t master_seed, int n_shuffles, RunContext& ctx) {
    if (n_shuffles < 1) throw std::invalid_argument("run_shuffles: n_shuffles must be >= 1");
    ShuffleRecord rec;
    rec.method = method.name();
    rec.split_fraction = train_fraction;
    for (int s = 0; s < n_shuffles; ++s) {
        SplitSpec spec;
        spec.train_fraction = train_fraction;
        spec.validation_holdout = validation_holdout;
        spec.shuffle_seed = hash_combine(master_seed, static_cast<std::uint64_t>(s));
        SplitResult split = make_split(data.labels, spec);
        ShuffleRun run;
        run.shuffle_seed = spec.shuffle_seed;
        run.result = run_method(method, data, split, ctx);
        rec.runs.push_back(std::move(run));
    }
    return rec;
}

struct AdaptationOptions {
    double synth_atom_weight = 1.0; // l1 cost multiplier for synthetic atoms
    bool refit_mpca_on_real = false;
};

struct AdaptationRecord {
    std::string method;
    double split_fraction = 0.0;
    ShuffleRecord baseline; // real-data-only runs
    ShuffleRecord adapted;  // synth-pretrained, adapted on the real train split
    double delta = 0.0;     // adapted mean - baseline mean
};

namespace detail {

// Classical-analog adaptation of one shuffle. SRC: the dictionary is the
// union of synthetic atoms and real training atoms. SVM: weights warm-start
// from the synth-trained model and continue on the real training split.
// MPCA bases and standardization statistics come from the synthetic
// pretraining set (refit on real optional).
inline RunResult run_adapted_method(const MethodSpec& method, PreparedDataset& synth,
                                    PreparedDataset& real, const SplitResult& split,
                                    const AdaptationOptions& opt, RunContext& ctx) {
    std::vector<int> train_labels = take_labels(real.labels, split.train);
    std::vector<int> test_labels = take_labels(real.labels, split.test);

    RunResult res;
    res.n_train = static_cast<int>(split.train.size());
    res.n_validation = static_cast<int>(split.validation.size());
    res.n_test = static_cast<int>(split.test.size());
    std::vector<int> predicted(test_labels.size(), 0);

    if (method.feature == FeatureKind::mpca) {
        const auto& synth_mats = synth.chip_matrices();
        const auto& real_mats = real.chip_matrices();
        std::vector<Eigen::MatrixXd> fit_set;
        if (opt.refit_mpca_on_real)
            for (int i : split.train) fit_set.push_back(real_mats[i]);
        else
            fit_set.assign(synth_mats.begin(), synth_mats.end());
        MpcaModel model = mpca_fit(fit_set, method.mpca);

        auto project_set = [&](const std::vector<Eigen::MatrixXd>& mats) {
            Eigen::MatrixXd out(static_cast<Eigen::Index>(mats.size()),
                                static_cast<Eigen::Index>(model.p1()) * model.p2());
            for (std::size_t i = 0; i < mats.size(); ++i) {
                FeatureVector f = mpca_project(mats[i], model);
                for (std::size_t j = 0; j < f.values.size(); ++j)
                    out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f.values[j];
            }
            return out;
        };
        Eigen::MatrixXd synth_x = project_set(synth_mats);
        std::vector<Eigen::MatrixXd> train_mats, test_mats;
        for (int i : split.train) train_mats.push_back(real_mats[i]);
        for (int i : split.test) test_mats.push_back(real_mats[i]);
        Eigen::MatrixXd train_x = project_set(train_mats);
        Eigen::MatrixXd test_x = project_set(test_mats);

        Standardizer std = Standardizer::fit(synth_x);
        LinearSvmModel pre = svm_train(std.apply(synth_x), synth.labels, method.svm);
        LinearSvmModel model2 =
            svm_train(std.apply(train_x), train_labels, method.svm, nullptr, &pre);
        Eigen::MatrixXd test_s = std.apply(test_x);
        for (Eigen::Index i = 0; i < test_s.rows(); ++i)
            predicted[static_cast<std::size_t>(i)] = svm_predict(model2, test_s.row(i).transpose());
        score_predictions(test_labels, predicted, res);
        return res;
    }

    const Eigen::MatrixXd& synth_all = synth.features_for(method, ctx);
    const Eigen::MatrixXd& real_all = real.features_for(method, ctx);
    Eigen::MatrixXd train_x = take_rows(real_all, split.train);
    Eigen::MatrixXd test_x = take_rows(real_all, split.test);

    if (method.classifier == ClassifierKind::svm) {
        Standardizer std = Standardizer::fit(synth_all);
        LinearSvmModel pre = svm_train(std.apply(synth_all), synth.labels, method.svm);
        LinearSvmModel model =
            svm_train(std.apply(train_x), train_labels, method.svm, nullptr, &pre);
        Eigen::MatrixXd test_s = std.apply(test_x);
        for (Eigen::Index i = 0; i < test_s.rows(); ++i)
            predicted[static_cast<std::size_t>(i)] = svm_predict(model, test_s.row(i).transpose());
    } else {
        Eigen::MatrixXd synth_x = synth_all;
        Eigen::MatrixXd tr = train_x, te = test_x;
        std::optional<ReductionSpec> reduction = method.reduction;
        if (!reduction && tr.cols() > 512) reduction = ReductionSpec{};
        if (reduction) {
            Eigen::MatrixXd proj =
                random_projection(reduction->dim, static_cast<int>(tr.cols()), reduction->seed);
            synth_x = synth_x * proj.transpose();
            tr = tr * proj.transpose();
            te = te * proj.transpose();
        }
        // dictionary: synth atoms first, then real training atoms
        Eigen::MatrixXd atoms(synth_x.rows() + tr.rows(), tr.cols());
        atoms.topRows(synth_x.rows()) = synth_x;
        atoms.bottomRows(tr.rows()) = tr;
        std::vector<int> atom_labels = synth.labels;
        atom_labels.insert(atom_labels.end(), train_labels.begin(), train_labels.end());
        SrcModel model = src_fit(atoms, atom_labels, method.src_epsilon, method.src_max_sparsity);
        std::vector<double> weights(static_cast<std::size_t>(atoms.rows()), 1.0);
        for (Eigen::Index i = 0; i < synth_x.rows(); ++i)
            weights[static_cast<std::size_t>(i)] = opt.synth_atom_weight;
        const bool weighted = opt.synth_atom_weight != 1.0;
        parallel_for(static_cast<int>(te.rows()), ctx.jobs, [&](int i) {
            predicted[static_cast<std::size_t>(i)] =
                src_classify(model, te.row(i).transpose(), weighted ? &weights : nullptr).predicted;
        });
    }
    score_predictions(test_labels, predicted, res);
    return res;
}

} // namespace detail

// Baseline: shuffled runs on real data only. Adapted: pretrain on the full
// synthetic set, adapt on each shuffle's real training split, and evaluate
// on the identical real test splits (same seeds as the baseline).
inline AdaptationRecord run_adaptation(const MethodSpec& method, PreparedDataset& synth,
                                       PreparedDataset& real, double train_fraction,
                                       double validation_holdout, std::uint64_t master_seed,
                                       int n_shuffles, const AdaptationOptions& opt,
                                       RunContext& ctx) {
    {
        std::vector<int> a = synth.labels, b = real.labels;
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        if (a != b)
            throw std::invalid_argument("run_adaptation: label sets differ between domains");
    }

    AdaptationRecord rec;
    rec.method = method.name();
    rec.split_fraction = train_fraction;
    rec.baseline =
        run_shuffles(method, real, train_fraction, validation_holdout, master_seed, n_shuffles, ctx);

    rec.adapted.method = method.name();
    rec.adapted.split_fraction = train_fraction;
    for (int s = 0; s < n_shuffles; ++s) {
        SplitSpec spec;
        spec.train_fraction = train_fraction;
        spec.validation_holdout = validation_holdout;
        spec.shuffle_seed = hash_combine(master_seed, static_cast<std::uint64_t>(s));
        SplitResult split = make_split(real.labels, spec);
        ShuffleRun run;
        run.shuffle_seed = spec.shuffle_seed;
        run.result = detail::run_adapted_method(method, synth, real, split, opt, ctx);
        rec.adapted.runs.push_back(std::move(run));
    }
    rec.delta = rec.adapted.mean_accuracy() - rec.baseline.mean_accuracy();
    return rec;
}

} // namespace vbench
