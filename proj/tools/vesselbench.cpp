// vesselbench: four-class overhead vessel chip benchmark.
// Subcommands: generate, preprocess, extract, train, eval, experiment, report.
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vbench/experiment.hpp"
#include "vbench/model_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_provenance(const std::string& out_dir, const std::string& settings,
                      std::uint64_t seed) {
    std::ofstream prov(fs::path(out_dir) / "provenance.txt");
    prov << "tool=vesselbench " << vbench::kVersion << "\n"
         << "config_hash=" << std::hex << vbench::fnv1a(settings.data(), settings.size())
         << std::dec << "\n"
         << "master_seed=" << seed << "\n";
}

vbench::RenderConstants load_constants(const std::string& path, char shift) {
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw vbench::IoError("cannot open constants file " + path);
        json j;
        in >> j;
        return j.get<vbench::RenderConstants>();
    }
    return vbench::domain_shift_config(vbench::RenderConstants{}, shift);
}

struct GenerateArgs {
    int per_class = 10;
    std::uint64_t seed = 42;
    int size = 128;
    std::string out;
    std::string shift = "A";
    std::string constants_path;
    int jobs = 0;
};

void cmd_generate(const GenerateArgs& a) {
    if (a.shift.size() != 1) throw std::invalid_argument("--shift must be A or B");
    vbench::RenderConstants constants = load_constants(a.constants_path, a.shift[0]);
    std::string manifest = vbench::generate_dataset(a.seed, a.per_class, a.size,
                                                    constants.panchro, a.out, constants, a.jobs);
    write_provenance(a.out,
                     "generate:" + std::to_string(a.per_class) + ":" + std::to_string(a.size) +
                         ":" + a.shift,
                     a.seed);
    std::cout << "wrote " << manifest << "\n";
}

struct PreprocessArgs {
    std::string in;
    std::string out;
    int size = 0;
    bool no_align = false;
    int jobs = 0;
};

void cmd_preprocess(const PreprocessArgs& a) {
    vbench::LabeledDataset ds = vbench::load_dataset(a.in);
    vbench::PreprocessSpec spec;
    spec.align = !a.no_align;
    spec.size = a.size;
    fs::create_directories(a.out);
    std::vector<vbench::ImageChip> chips(ds.chips.size());
    vbench::parallel_for(static_cast<int>(ds.chips.size()), a.jobs,
                         [&](int i) { chips[i] = vbench::preprocess_chip(ds.chips[i], spec); });
    std::vector<vbench::DatasetEntry> entries = ds.entries;
    for (std::size_t i = 0; i < chips.size(); ++i) {
        entries[i].width = chips[i].width();
        entries[i].height = chips[i].height();
        vbench::write_png((fs::path(a.out) / entries[i].path).string(), chips[i]);
    }
    vbench::write_manifest((fs::path(a.out) / "manifest.csv").string(), entries,
                           {"preprocessed align=" + std::string(spec.align ? "1" : "0") +
                            " size=" + std::to_string(spec.size)});
    write_provenance(a.out, "preprocess:" + std::to_string(a.size), 0);
    std::cout << "wrote " << (fs::path(a.out) / "manifest.csv").string() << "\n";
}

struct ExtractArgs {
    std::string in;
    std::string feature = "hog";
    std::string out;
    int jobs = 0;
    bool no_align = false;
};

void cmd_extract(const ExtractArgs& a) {
    vbench::LabeledDataset ds = vbench::load_dataset(a.in);
    vbench::MethodSpec method = vbench::parse_method(a.feature + "+svm");
    if (method.feature == vbench::FeatureKind::mpca)
        throw std::invalid_argument("extract: mpca features need a trained model (use train)");
    vbench::PreprocessSpec spec;
    spec.align = !a.no_align;
    vbench::PreparedDataset data;
    data.labels = ds.labels();
    data.chips.resize(ds.chips.size());
    vbench::parallel_for(static_cast<int>(ds.chips.size()), a.jobs,
                         [&](int i) { data.chips[i] = vbench::preprocess_chip(ds.chips[i], spec); });
    vbench::RunContext ctx{nullptr, nullptr, vbench::effective_jobs(a.jobs)};
    Eigen::MatrixXd x = data.features_for(method, ctx);
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw vbench::IoError("extract: cannot open " + a.out);
    out << "path,label";
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << ",f" << j;
    out << "\n";
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out << ds.entries[static_cast<std::size_t>(i)].path << ','
            << vbench::kClassNames[ds.entries[static_cast<std::size_t>(i)].label];
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
            out << ',' << buf;
        }
        out << "\n";
    }
    std::cout << "wrote " << a.out << " (" << x.rows() << " x " << x.cols() << ")\n";
}

struct TrainArgs {
    std::string in;
    std::string method = "hog+src";
    std::string out;
    std::uint64_t seed = 42;
    int jobs = 0;
    bool no_align = false;
};

void cmd_train(const TrainArgs& a) {
    vbench::LabeledDataset ds = vbench::load_dataset(a.in);
    vbench::MethodSpec method = vbench::parse_method(a.method);
    vbench::PreprocessSpec spec;
    spec.align = !a.no_align;

    vbench::PreparedDataset data;
    data.labels = ds.labels();
    data.chips.resize(ds.chips.size());
    vbench::parallel_for(static_cast<int>(ds.chips.size()), a.jobs,
                         [&](int i) { data.chips[i] = vbench::preprocess_chip(ds.chips[i], spec); });
    vbench::RunContext ctx{nullptr, nullptr, vbench::effective_jobs(a.jobs)};

    fs::create_directories(a.out);
    json meta;
    meta["method"] = a.method;
    meta["align"] = spec.align;
    meta["version"] = vbench::kVersion;

    Eigen::MatrixXd x;
    if (method.feature == vbench::FeatureKind::mpca) {
        vbench::MpcaModel mpca = vbench::mpca_fit(data.chip_matrices(), method.mpca);
        vbench::model_io::save_mpca((fs::path(a.out) / "mpca.model").string(), mpca);
        x.resize(static_cast<Eigen::Index>(data.chips.size()),
                 static_cast<Eigen::Index>(mpca.p1()) * mpca.p2());
        for (std::size_t i = 0; i < data.chips.size(); ++i) {
            vbench::FeatureVector f = vbench::mpca_project(data.chip_matrices()[i], mpca);
            for (std::size_t j = 0; j < f.values.size(); ++j)
                x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f.values[j];
        }
    } else {
        x = data.features_for(method, ctx);
    }

    if (method.classifier == vbench::ClassifierKind::svm) {
        vbench::Standardizer std_ = vbench::Standardizer::fit(x);
        vbench::LinearSvmModel svm = vbench::svm_train(std_.apply(x), data.labels, method.svm);
        vbench::model_io::save_svm((fs::path(a.out) / "svm.model").string(), svm);
        vbench::model_io::save_bundle((fs::path(a.out) / "standardizer.bin").string(),
                                      {std_.mean, std_.inv_std});
    } else {
        std::optional<vbench::ReductionSpec> reduction = method.reduction;
        if (!reduction && x.cols() > 512) reduction = vbench::ReductionSpec{};
        meta["reduction"] = reduction.has_value();
        if (reduction) {
            reduction->seed = a.seed;
            Eigen::MatrixXd proj = vbench::random_projection(
                reduction->dim, static_cast<int>(x.cols()), reduction->seed);
            vbench::model_io::save_bundle((fs::path(a.out) / "projection.bin").string(), {proj});
            x = x * proj.transpose();
        }
        vbench::SrcModel src =
            vbench::src_fit(x, data.labels, method.src_epsilon, method.src_max_sparsity);
        vbench::model_io::save_src((fs::path(a.out) / "src.model").string(), src);
    }

    std::ofstream meta_out(fs::path(a.out) / "meta.json");
    meta_out << meta.dump(2) << "\n";
    write_provenance(a.out, "train:" + a.method, a.seed);
    std::cout << "wrote models to " << a.out << "\n";
}

struct EvalArgs {
    std::string model_dir;
    std::string in;
    int jobs = 0;
};

void cmd_eval(const EvalArgs& a) {
    std::ifstream meta_in(fs::path(a.model_dir) / "meta.json");
    if (!meta_in) throw vbench::IoError("eval: cannot open meta.json in " + a.model_dir);
    json meta;
    meta_in >> meta;
    vbench::MethodSpec method = vbench::parse_method(meta.at("method").get<std::string>());
    vbench::PreprocessSpec spec;
    spec.align = meta.value("align", true);

    vbench::LabeledDataset ds = vbench::load_dataset(a.in);
    vbench::PreparedDataset data;
    data.labels = ds.labels();
    data.chips.resize(ds.chips.size());
    vbench::parallel_for(static_cast<int>(ds.chips.size()), a.jobs,
                         [&](int i) { data.chips[i] = vbench::preprocess_chip(ds.chips[i], spec); });
    vbench::RunContext ctx{nullptr, nullptr, vbench::effective_jobs(a.jobs)};

    Eigen::MatrixXd x;
    if (method.feature == vbench::FeatureKind::mpca) {
        vbench::MpcaModel mpca =
            vbench::model_io::load_mpca((fs::path(a.model_dir) / "mpca.model").string());
        x.resize(static_cast<Eigen::Index>(data.chips.size()),
                 static_cast<Eigen::Index>(mpca.p1()) * mpca.p2());
        for (std::size_t i = 0; i < data.chips.size(); ++i) {
            vbench::FeatureVector f = vbench::mpca_project(data.chip_matrices()[i], mpca);
            for (std::size_t j = 0; j < f.values.size(); ++j)
                x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f.values[j];
        }
    } else {
        x = data.features_for(method, ctx);
    }

    std::vector<int> predicted(data.labels.size(), 0);
    if (method.classifier == vbench::ClassifierKind::svm) {
        auto bundle =
            vbench::model_io::load_bundle((fs::path(a.model_dir) / "standardizer.bin").string());
        vbench::Standardizer std_;
        std_.mean = bundle.at(0);
        std_.inv_std = bundle.at(1);
        vbench::LinearSvmModel svm =
            vbench::model_io::load_svm((fs::path(a.model_dir) / "svm.model").string());
        Eigen::MatrixXd xs = std_.apply(x);
        for (Eigen::Index i = 0; i < xs.rows(); ++i)
            predicted[static_cast<std::size_t>(i)] = vbench::svm_predict(svm, xs.row(i).transpose());
    } else {
        if (meta.value("reduction", false)) {
            auto bundle =
                vbench::model_io::load_bundle((fs::path(a.model_dir) / "projection.bin").string());
            x = x * bundle.at(0).transpose();
        }
        vbench::SrcModel src =
            vbench::model_io::load_src((fs::path(a.model_dir) / "src.model").string());
        vbench::parallel_for(static_cast<int>(x.rows()), a.jobs, [&](int i) {
            predicted[static_cast<std::size_t>(i)] =
                vbench::src_classify(src, x.row(i).transpose()).predicted;
        });
    }

    long correct = 0;
    std::array<long, 16> confusion{};
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        if (predicted[i] == data.labels[i]) ++correct;
        ++confusion[static_cast<std::size_t>(data.labels[i]) * vbench::kClassCount + predicted[i]];
    }
    double acc = static_cast<double>(correct) / static_cast<double>(data.labels.size());
    std::cout << "accuracy " << vbench::format_accuracy4(acc) << " (" << correct << "/"
              << data.labels.size() << ")\nconfusion (rows true, cols predicted):\n";
    for (int r = 0; r < vbench::kClassCount; ++r) {
        for (int c = 0; c < vbench::kClassCount; ++c)
            std::cout << confusion[static_cast<std::size_t>(r) * vbench::kClassCount + c]
                      << (c + 1 < vbench::kClassCount ? ' ' : '\n');
    }
}

struct ExperimentArgs {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
};

void cmd_experiment(const ExperimentArgs& a) {
    vbench::ExperimentConfig cfg = vbench::load_experiment_config(a.config);
    if (a.seed) cfg.master_seed = *a.seed;
    if (a.jobs) cfg.jobs = *a.jobs;
    vbench::ExperimentOutputs out = vbench::run_experiment(cfg, a.out);
    std::cout << "wrote " << out.runs_csv_path << "\nwrote " << out.report_md_path << "\n";
}

struct ReportArgs {
    std::string in;
    std::string out;
    std::string format = "md";
};

void cmd_report(const ReportArgs& a) {
    std::ifstream in(a.in, std::ios::binary);
    if (!in) throw vbench::IoError("report: cannot open " + a.in);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    vbench::ExperimentReport report = vbench::parse_runs_csv(text);
    std::string rendered = vbench::render_report(report, a.format);
    if (a.out.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream out(a.out, std::ios::binary);
        out << rendered;
        std::cout << "wrote " << a.out << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vesselbench: synthetic overhead vessel classification benchmark"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* sc_gen = app.add_subcommand("generate", "render a labeled synthetic chip dataset");
    sc_gen->add_option("--per-class", gen.per_class, "chips per class")->check(CLI::PositiveNumber);
    sc_gen->add_option("--seed", gen.seed, "master seed");
    sc_gen->add_option("--size", gen.size, "chip size in pixels");
    sc_gen->add_option("--out", gen.out, "output directory")->required();
    sc_gen->add_option("--shift", gen.shift, "render constants domain: A or B");
    sc_gen->add_option("--constants", gen.constants_path, "render constants JSON file");
    sc_gen->add_option("--jobs", gen.jobs, "worker threads (0 = cores)");
    sc_gen->callback([&]() { cmd_generate(gen); });

    PreprocessArgs pre;
    auto* sc_pre = app.add_subcommand("preprocess", "align/resize chips of a manifest");
    sc_pre->add_option("--in", pre.in, "input manifest")->required();
    sc_pre->add_option("--out", pre.out, "output directory")->required();
    sc_pre->add_option("--size", pre.size, "target size (0 = keep)");
    sc_pre->add_flag("--no-align", pre.no_align, "skip orientation alignment");
    sc_pre->add_option("--jobs", pre.jobs, "worker threads (0 = cores)");
    sc_pre->callback([&]() { cmd_preprocess(pre); });

    ExtractArgs ext;
    auto* sc_ext = app.add_subcommand("extract", "extract per-chip descriptors to CSV");
    sc_ext->add_option("--in", ext.in, "input manifest")->required();
    sc_ext->add_option("--feature", ext.feature, "hog or hmlbp");
    sc_ext->add_option("--out", ext.out, "output CSV path")->required();
    sc_ext->add_flag("--no-align", ext.no_align, "skip orientation alignment");
    sc_ext->add_option("--jobs", ext.jobs, "worker threads (0 = cores)");
    sc_ext->callback([&]() { cmd_extract(ext); });

    TrainArgs tr;
    auto* sc_tr = app.add_subcommand("train", "train a method on every chip of a manifest");
    sc_tr->add_option("--in", tr.in, "input manifest")->required();
    sc_tr->add_option("--method", tr.method, "feature+classifier, e.g. hog+src");
    sc_tr->add_option("--out", tr.out, "model output directory")->required();
    sc_tr->add_option("--seed", tr.seed, "seed for the SRC reduction projection");
    sc_tr->add_flag("--no-align", tr.no_align, "skip orientation alignment");
    sc_tr->add_option("--jobs", tr.jobs, "worker threads (0 = cores)");
    sc_tr->callback([&]() { cmd_train(tr); });

    EvalArgs ev;
    auto* sc_ev = app.add_subcommand("eval", "evaluate trained models on a manifest");
    sc_ev->add_option("--model", ev.model_dir, "model directory from train")->required();
    sc_ev->add_option("--in", ev.in, "input manifest")->required();
    sc_ev->add_option("--jobs", ev.jobs, "worker threads (0 = cores)");
    sc_ev->callback([&]() { cmd_eval(ev); });

    ExperimentArgs ex;
    auto* sc_ex = app.add_subcommand("experiment", "run a full benchmark config");
    sc_ex->add_option("--config", ex.config, "experiment JSON config")->required();
    sc_ex->add_option("--out", ex.out, "output directory");
    std::uint64_t seed_opt = 0;
    int jobs_opt = 0;
    auto* seed_flag = sc_ex->add_option("--seed", seed_opt, "override master seed");
    auto* jobs_flag = sc_ex->add_option("--jobs", jobs_opt, "worker threads (0 = cores)");
    sc_ex->callback([&]() {
        if (*seed_flag) ex.seed = seed_opt;
        if (*jobs_flag) ex.jobs = jobs_opt;
        cmd_experiment(ex);
    });

    ReportArgs rep;
    auto* sc_rep = app.add_subcommand("report", "re-render a runs CSV as csv or md");
    sc_rep->add_option("--in", rep.in, "runs.csv path")->required();
    sc_rep->add_option("--out", rep.out, "output path (default: stdout)");
    sc_rep->add_option("--format", rep.format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
    sc_rep->callback([&]() { cmd_report(rep); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
