#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vbench/harness.hpp"
#include "vbench/report.hpp"
#include "vbench/synthgen.hpp"
#include "vbench/version.hpp"

namespace vbench {

// Where a dataset comes from: a deterministic generator run or an existing
// manifest on disk.
struct DatasetSpec {
    std::string kind = "generate"; // generate | manifest
    std::string name = "main";
    std::uint64_t seed = 42;
    int per_class = 200;
    int size = 128;
    char shift = 'A'; // render constants domain (see domain_shift_config)
    std::string manifest_path;
    std::optional<RenderConstants> constants; // explicit constants override shift
};

struct PreprocessSpec {
    bool align = true;
    int size = 0; // 0: keep chip dimensions
};

struct AdaptationSpec {
    std::vector<std::string> methods{"hog+src"};
    std::vector<double> splits{0.8, 0.05};
    DatasetSpec synth;
    DatasetSpec real;
    double synth_atom_weight = 1.0;
    bool refit_mpca_on_real = false;
};

struct ExperimentConfig {
    std::uint64_t master_seed = 42;
    int jobs = 0;
    int n_shuffles = 5;
    double validation_holdout = 0.2;
    PreprocessSpec preprocess;
    std::optional<DatasetSpec> dataset;
    std::vector<std::string> methods{"hmlbp+svm", "mpca+svm", "hog+src"};
    std::vector<double> splits{0.8, 0.01};
    std::optional<AdaptationSpec> adaptation;
    // shared method knobs
    double mpca_energy_q = 97.0;
    double svm_c = 1.0;
    double src_epsilon = 0.05;
    int reduction_dim = 256;
};

inline void from_json(const nlohmann::json& j, DatasetSpec& d) {
    d = DatasetSpec{};
    if (j.contains("kind")) j.at("kind").get_to(d.kind);
    if (j.contains("name")) j.at("name").get_to(d.name);
    if (j.contains("seed")) j.at("seed").get_to(d.seed);
    if (j.contains("per_class")) j.at("per_class").get_to(d.per_class);
    if (j.contains("size")) j.at("size").get_to(d.size);
    if (j.contains("shift")) {
        std::string s = j.at("shift").get<std::string>();
        if (s.size() != 1) throw std::invalid_argument("DatasetSpec: shift must be 'A' or 'B'");
        d.shift = s[0];
    }
    if (j.contains("manifest")) j.at("manifest").get_to(d.manifest_path);
    if (j.contains("constants")) d.constants = j.at("constants").get<RenderConstants>();
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    c = ExperimentConfig{};
    if (j.contains("master_seed")) j.at("master_seed").get_to(c.master_seed);
    if (j.contains("jobs")) j.at("jobs").get_to(c.jobs);
    if (j.contains("n_shuffles")) j.at("n_shuffles").get_to(c.n_shuffles);
    if (j.contains("validation_holdout")) j.at("validation_holdout").get_to(c.validation_holdout);
    if (j.contains("preprocess")) {
        const auto& p = j.at("preprocess");
        if (p.contains("align")) p.at("align").get_to(c.preprocess.align);
        if (p.contains("size")) p.at("size").get_to(c.preprocess.size);
    }
    if (j.contains("dataset")) c.dataset = j.at("dataset").get<DatasetSpec>();
    if (j.contains("methods")) j.at("methods").get_to(c.methods);
    if (j.contains("splits")) j.at("splits").get_to(c.splits);
    if (j.contains("adaptation")) {
        AdaptationSpec a;
        const auto& ja = j.at("adaptation");
        if (ja.contains("methods")) ja.at("methods").get_to(a.methods);
        if (ja.contains("splits")) ja.at("splits").get_to(a.splits);
        if (ja.contains("synth")) a.synth = ja.at("synth").get<DatasetSpec>();
        if (ja.contains("real")) a.real = ja.at("real").get<DatasetSpec>();
        if (ja.contains("synth_atom_weight")) ja.at("synth_atom_weight").get_to(a.synth_atom_weight);
        if (ja.contains("refit_mpca_on_real")) ja.at("refit_mpca_on_real").get_to(a.refit_mpca_on_real);
        c.adaptation = std::move(a);
    }
    if (j.contains("mpca_energy_q")) j.at("mpca_energy_q").get_to(c.mpca_energy_q);
    if (j.contains("svm_c")) j.at("svm_c").get_to(c.svm_c);
    if (j.contains("src_epsilon")) j.at("src_epsilon").get_to(c.src_epsilon);
    if (j.contains("reduction_dim")) j.at("reduction_dim").get_to(c.reduction_dim);
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_experiment_config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j.get<ExperimentConfig>();
}

inline MethodSpec make_method(const std::string& name, const ExperimentConfig& cfg) {
    MethodSpec m = parse_method(name);
    m.mpca.energy_q = cfg.mpca_energy_q;
    m.svm.c = cfg.svm_c;
    m.src_epsilon = cfg.src_epsilon;
    ReductionSpec red;
    red.dim = cfg.reduction_dim;
    if (m.classifier == ClassifierKind::src) m.reduction = red;
    return m;
}

// Preprocessing applied before feature extraction: orientation alignment
// with a canonical flip, then optional resize.
inline ImageChip preprocess_chip(const ImageChip& chip, const PreprocessSpec& spec) {
    ImageChip out = chip;
    if (spec.align) out = align_chip(out);
    if (spec.size > 0 && (out.width() != spec.size || out.height() != spec.size))
        out = resize_bilinear(out, spec.size, spec.size);
    return out;
}

namespace detail {

inline std::string materialize_dataset(const DatasetSpec& spec, const std::string& out_dir,
                                       int jobs) {
    if (spec.kind == "manifest") {
        if (spec.manifest_path.empty())
            throw std::invalid_argument("DatasetSpec: manifest kind needs a manifest path");
        return spec.manifest_path;
    }
    if (spec.kind != "generate")
        throw std::invalid_argument("DatasetSpec: unknown kind " + spec.kind);
    RenderConstants constants =
        spec.constants ? *spec.constants : domain_shift_config(RenderConstants{}, spec.shift);
    const std::string dir = (std::filesystem::path(out_dir) / "data" / spec.name).string();
    return generate_dataset(spec.seed, spec.per_class, spec.size, constants.panchro, dir,
                            constants, jobs);
}

inline PreparedDataset prepare_dataset(const std::string& manifest, const PreprocessSpec& spec,
                                       int jobs) {
    LabeledDataset ds = load_dataset(manifest);
    PreparedDataset prepared;
    prepared.labels = ds.labels();
    prepared.chips.resize(ds.chips.size());
    parallel_for(static_cast<int>(ds.chips.size()), jobs,
                 [&](int i) { prepared.chips[i] = preprocess_chip(ds.chips[i], spec); });
    return prepared;
}

} // namespace detail

struct ExperimentOutputs {
    ExperimentReport report;
    std::string runs_csv_path;
    std::string report_md_path;
};

// Full experiment: materialize datasets, run the method x split x shuffle
// grid (plus the adaptation protocol when configured), and write runs.csv,
// report.md and a provenance header. Every output byte is a pure function of
// (config, seed, tool version); the job count only affects wall time.
inline ExperimentOutputs run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("run_experiment: cannot create " + out_dir + ": " + ec.message());

    const int jobs = effective_jobs(config.jobs);

    // provenance: enough to rerun the job byte-identically
    {
        nlohmann::json j;
        j["master_seed"] = config.master_seed;
        j["n_shuffles"] = config.n_shuffles;
        j["methods"] = config.methods;
        j["splits"] = config.splits;
        const std::string dump = j.dump();
        std::ofstream prov(fs::path(out_dir) / "provenance.txt");
        prov << "tool=vesselbench " << kVersion << "\n"
             << "config_hash=" << std::hex << fnv1a(dump.data(), dump.size()) << std::dec << "\n"
             << "master_seed=" << config.master_seed << "\n";
    }

    std::string cache_dir = (fs::path(out_dir) / "cache").string();
    if (const char* env = std::getenv("VESSEL_BENCH_CACHE"); env && *env) cache_dir = env;
    fs::create_directories(cache_dir);
    FeatureCache cache = FeatureCache::open((fs::path(cache_dir) / "features.bin").string());
    ExtractionStats stats;
    RunContext ctx{&cache, &stats, jobs};

    ExperimentReport report;

    if (config.dataset) {
        const std::string manifest = detail::materialize_dataset(*config.dataset, out_dir, jobs);
        PreparedDataset data = detail::prepare_dataset(manifest, config.preprocess, jobs);
        for (const auto& method_name : config.methods) {
            MethodSpec method = make_method(method_name, config);
            for (double split : config.splits) {
                ShuffleRecord rec =
                    run_shuffles(method, data, split, config.validation_holdout,
                                 hash_combine(config.master_seed, fnv1a(method_name.data(),
                                                                        method_name.size())),
                                 config.n_shuffles, ctx);
                for (int s = 0; s < static_cast<int>(rec.runs.size()); ++s) {
                    RunRecord r;
                    r.method = method_name;
                    r.split_fraction = split;
                    r.shuffle = s;
                    r.phase = "benchmark";
                    r.accuracy = rec.runs[s].result.accuracy;
                    r.n_train = rec.runs[s].result.n_train;
                    r.n_validation = rec.runs[s].result.n_validation;
                    r.n_test = rec.runs[s].result.n_test;
                    r.confusion = rec.runs[s].result.confusion;
                    report.records.push_back(std::move(r));
                }
            }
        }
    }

    if (config.adaptation) {
        const auto& ad = *config.adaptation;
        const std::string synth_manifest = detail::materialize_dataset(ad.synth, out_dir, jobs);
        const std::string real_manifest = detail::materialize_dataset(ad.real, out_dir, jobs);
        PreparedDataset synth = detail::prepare_dataset(synth_manifest, config.preprocess, jobs);
        PreparedDataset real = detail::prepare_dataset(real_manifest, config.preprocess, jobs);
        AdaptationOptions opt;
        opt.synth_atom_weight = ad.synth_atom_weight;
        opt.refit_mpca_on_real = ad.refit_mpca_on_real;
        for (const auto& method_name : ad.methods) {
            MethodSpec method = make_method(method_name, config);
            for (double split : ad.splits) {
                AdaptationRecord rec = run_adaptation(
                    method, synth, real, split, config.validation_holdout,
                    hash_combine(config.master_seed,
                                 fnv1a(method_name.data(), method_name.size())),
                    config.n_shuffles, opt, ctx);
                auto push = [&](const ShuffleRecord& sr, const char* phase) {
                    for (int s = 0; s < static_cast<int>(sr.runs.size()); ++s) {
                        RunRecord r;
                        r.method = method_name;
                        r.split_fraction = split;
                        r.shuffle = s;
                        r.phase = phase;
                        r.accuracy = sr.runs[s].result.accuracy;
                        r.n_train = sr.runs[s].result.n_train;
                        r.n_validation = sr.runs[s].result.n_validation;
                        r.n_test = sr.runs[s].result.n_test;
                        r.confusion = sr.runs[s].result.confusion;
                        report.records.push_back(std::move(r));
                    }
                };
                push(rec.baseline, "baseline");
                push(rec.adapted, "adapted");
            }
        }
    }

    if (report.records.empty())
        throw std::invalid_argument("run_experiment: config selects no runs");

    ExperimentOutputs out;
    out.report = std::move(report);
    out.runs_csv_path = (fs::path(out_dir) / "runs.csv").string();
    out.report_md_path = (fs::path(out_dir) / "report.md").string();
    {
        std::ofstream csv(out.runs_csv_path, std::ios::binary);
        csv << render_runs_csv(out.report);
        std::ofstream md(out.report_md_path, std::ios::binary);
        md << render_markdown(out.report);
    }
    cache.save();
    return out;
}

} // namespace vbench
