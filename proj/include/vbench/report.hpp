#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vbench/dataset.hpp"

namespace vbench {

// One evaluated (method, split, shuffle) cell. phase distinguishes plain
// benchmark runs from the adaptation experiment's baseline/adapted pairs.
struct RunRecord {
    std::string method;
    double split_fraction = 0.0;
    int shuffle = 0;
    std::string phase = "benchmark"; // benchmark | baseline | adapted
    double accuracy = 0.0;
    int n_train = 0;
    int n_validation = 0;
    int n_test = 0;
    std::array<long, 16> confusion{};

    bool operator==(const RunRecord&) const = default;
};

struct ExperimentReport {
    std::vector<RunRecord> records;

    std::vector<std::string> methods(const std::string& phase) const {
        std::vector<std::string> out;
        for (const auto& r : records)
            if (r.phase == phase && std::find(out.begin(), out.end(), r.method) == out.end())
                out.push_back(r.method);
        return out;
    }

    std::vector<double> splits(const std::string& phase) const {
        std::vector<double> out;
        for (const auto& r : records)
            if (r.phase == phase && std::find(out.begin(), out.end(), r.split_fraction) == out.end())
                out.push_back(r.split_fraction);
        return out;
    }

    // Mean of the shuffle accuracies for one report cell.
    double mean_accuracy(const std::string& method, double split, const std::string& phase) const {
        double sum = 0.0;
        long n = 0;
        for (const auto& r : records)
            if (r.phase == phase && r.method == method && r.split_fraction == split) {
                sum += r.accuracy;
                ++n;
            }
        if (n == 0) throw std::invalid_argument("mean_accuracy: no such report cell");
        return sum / static_cast<double>(n);
    }

    bool operator==(const ExperimentReport&) const = default;
};

// Accuracies print at 4 decimals with round-half-up on the decimal grid,
// matching the style of the reference tables (0.96875 -> "0.9688").
inline std::string format_accuracy4(double v) {
    if (!(v >= 0.0) || v > 1.0 + 1e-12)
        throw std::invalid_argument("format_accuracy4: accuracy outside [0,1]");
    long long q = static_cast<long long>(std::floor(v * 10000.0 + 0.5));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%lld.%04lld", q / 10000, q % 10000);
    return buf;
}

// Signed percentage with 2 decimals, e.g. 0.0634 -> "6.34%".
inline std::string format_percent2(double fraction) {
    double pct = fraction * 100.0;
    long long q = std::llround(std::abs(pct) * 100.0);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%s%lld.%02lld%%", pct < 0 ? "-" : "", q / 100, q % 100);
    return buf;
}

// "80/20"-style split label from the training fraction.
inline std::string split_label(double fraction) {
    int tr = static_cast<int>(std::llround(fraction * 100.0));
    return std::to_string(tr) + "/" + std::to_string(100 - tr);
}

namespace detail {

inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string render_runs_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "method,split,shuffle,phase,accuracy,n_train,n_validation,n_test";
    for (int r = 0; r < kClassCount; ++r)
        for (int c = 0; c < kClassCount; ++c) out << ",c" << r << c;
    out << "\n";
    for (const auto& rec : report.records) {
        out << rec.method << ',' << detail::format_g17(rec.split_fraction) << ',' << rec.shuffle
            << ',' << rec.phase << ',' << detail::format_g17(rec.accuracy) << ',' << rec.n_train
            << ',' << rec.n_validation << ',' << rec.n_test;
        for (long v : rec.confusion) out << ',' << v;
        out << "\n";
    }
    return out.str();
}

inline ExperimentReport parse_runs_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("parse_runs_csv: empty input");
    ExperimentReport report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        RunRecord r;
        std::getline(ss, r.method, ',');
        std::getline(ss, field, ',');
        r.split_fraction = std::stod(field);
        std::getline(ss, field, ',');
        r.shuffle = std::stoi(field);
        std::getline(ss, r.phase, ',');
        std::getline(ss, field, ',');
        r.accuracy = std::stod(field);
        std::getline(ss, field, ',');
        r.n_train = std::stoi(field);
        std::getline(ss, field, ',');
        r.n_validation = std::stoi(field);
        std::getline(ss, field, ',');
        r.n_test = std::stoi(field);
        for (auto& v : r.confusion) {
            std::getline(ss, field, ',');
            v = std::stol(field);
        }
        report.records.push_back(std::move(r));
    }
    return report;
}

// Markdown report: an averaged method x split accuracy table in the layout
// of the reference results table, plus (when adaptation runs are present)
// per-method two-column delta tables.
inline std::string render_markdown(const ExperimentReport& report) {
    std::ostringstream out;
    const auto methods = report.methods("benchmark");
    const auto splits = report.splits("benchmark");
    if (!methods.empty()) {
        out << "## Average accuracy over shuffles\n\n";
        out << "| Data Split % (Training / Test) |";
        for (const auto& m : methods) out << ' ' << m << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < methods.size(); ++i) out << "---|";
        out << "\n";
        for (double s : splits) {
            out << "| " << split_label(s) << " |";
            for (const auto& m : methods)
                out << ' ' << format_accuracy4(report.mean_accuracy(m, s, "benchmark")) << " |";
            out << "\n";
        }
        out << "\n";
    }

    const auto adapted_methods = report.methods("adapted");
    for (const auto& m : adapted_methods) {
        out << "## Impact of synthetic pretraining (classical-analog adaptation): " << m << "\n\n";
        out << "| Data Split % (Training / Test) | Accuracy Increase |\n|---|---|\n";
        for (double s : report.splits("adapted")) {
            double delta =
                report.mean_accuracy(m, s, "adapted") - report.mean_accuracy(m, s, "baseline");
            out << "| " << split_label(s) << " | " << format_percent2(delta) << " |\n";
        }
        out << "\n";
    }
    return out.str();
}

// Text rendering entry point used by the CLI: format is "csv" or "md".
inline std::string render_report(const ExperimentReport& report, const std::string& format) {
    if (report.records.empty())
        throw std::invalid_argument("render_report: empty report");
    if (format == "csv") return render_runs_csv(report);
    if (format == "md") return render_markdown(report);
    throw std::invalid_argument("render_report: unknown format " + format);
}

} // namespace vbench
