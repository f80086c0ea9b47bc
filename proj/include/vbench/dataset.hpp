#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vbench/error.hpp"
#include "vbench/image.hpp"
#include "vbench/png_io.hpp"

namespace vbench {

inline constexpr int kClassCount = 4;
inline constexpr std::array<const char*, kClassCount> kClassNames{"barge", "cargo", "container", "tanker"};

inline int class_index(const std::string& name) {
    for (int i = 0; i < kClassCount; ++i)
        if (name == kClassNames[i]) return i;
    throw std::invalid_argument("unknown vessel class: " + name);
}

enum class DomainTag { real_analog, synthetic };

inline const char* domain_name(DomainTag d) {
    return d == DomainTag::synthetic ? "synthetic" : "real-analog";
}

inline DomainTag parse_domain(const std::string& s) {
    if (s == "synthetic") return DomainTag::synthetic;
    if (s == "real-analog") return DomainTag::real_analog;
    throw std::invalid_argument("unknown domain tag: " + s);
}

struct DatasetEntry {
    std::string path; // relative to the manifest directory
    int label = 0;
    DomainTag domain = DomainTag::synthetic;
    int width = 0;
    int height = 0;
    std::optional<std::uint64_t> seed; // empty for non-synthetic entries
};

// Ordered collection of chips with labels and domain tags; chips may be
// loaded lazily from the manifest's directory.
struct LabeledDataset {
    std::vector<DatasetEntry> entries;
    std::vector<ImageChip> chips; // parallel to entries when loaded

    std::vector<int> labels() const {
        std::vector<int> out;
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back(e.label);
        return out;
    }

    std::size_t size() const { return entries.size(); }
};

// Manifest CSV: header `path,label,domain,width,height,seed`; lines starting
// with '#' carry provenance (render constants hash, panchro params) and are
// skipped by the parser.
inline void write_manifest(const std::string& manifest_path,
                           const std::vector<DatasetEntry>& entries,
                           const std::vector<std::string>& header_comments = {}) {
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw IoError("write_manifest: cannot open " + manifest_path);
    for (const auto& c : header_comments) out << "# " << c << "\n";
    out << "path,label,domain,width,height,seed\n";
    for (const auto& e : entries) {
        out << e.path << ',' << kClassNames[e.label] << ',' << domain_name(e.domain) << ','
            << e.width << ',' << e.height << ',';
        if (e.seed) out << *e.seed;
        out << "\n";
    }
    if (!out) throw IoError("write_manifest: write failed for " + manifest_path);
}

inline std::vector<DatasetEntry> read_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw IoError("read_manifest: cannot open " + manifest_path);
    std::vector<DatasetEntry> entries;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "path,label,domain,width,height,seed")
                throw IoError("read_manifest: unexpected header in " + manifest_path + ": " + line);
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string path, label, domain, width, height, seed;
        std::getline(ss, path, ',');
        std::getline(ss, label, ',');
        std::getline(ss, domain, ',');
        std::getline(ss, width, ',');
        std::getline(ss, height, ',');
        std::getline(ss, seed);
        DatasetEntry e;
        e.path = path;
        e.label = class_index(label);
        e.domain = parse_domain(domain);
        e.width = std::stoi(width);
        e.height = std::stoi(height);
        if (!seed.empty()) e.seed = std::stoull(seed);
        entries.push_back(std::move(e));
    }
    if (!header_seen) throw IoError("read_manifest: no header in " + manifest_path);
    return entries;
}

inline LabeledDataset load_dataset(const std::string& manifest_path) {
    LabeledDataset ds;
    ds.entries = read_manifest(manifest_path);
    const auto dir = std::filesystem::path(manifest_path).parent_path();
    ds.chips.reserve(ds.entries.size());
    for (const auto& e : ds.entries)
        ds.chips.push_back(read_png((dir / e.path).string()));
    return ds;
}

} // namespace vbench
