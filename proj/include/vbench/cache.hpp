#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "vbench/error.hpp"

namespace vbench {

// Persistent feature cache keyed by (chip content hash, params hash).
// A corrupt or mismatched file is treated as empty: the cache is purely an
// accelerator, results never depend on it. Supports concurrent lookups and
// serialized inserts within one process; save() rewrites atomically.
class FeatureCache {
public:
    FeatureCache() : mutex_(std::make_unique<std::mutex>()) {}

    static FeatureCache open(const std::string& path) {
        FeatureCache cache;
        cache.path_ = path;
        std::ifstream in(path, std::ios::binary);
        if (!in) return cache;
        std::uint32_t magic = 0, version = 0;
        in.read(reinterpret_cast<char*>(&magic), sizeof magic);
        in.read(reinterpret_cast<char*>(&version), sizeof version);
        if (!in || magic != kMagic || version != kVersion) return cache;
        std::uint64_t count = 0;
        in.read(reinterpret_cast<char*>(&count), sizeof count);
        for (std::uint64_t i = 0; i < count && in; ++i) {
            std::uint64_t chip = 0, params = 0, dim = 0;
            in.read(reinterpret_cast<char*>(&chip), sizeof chip);
            in.read(reinterpret_cast<char*>(&params), sizeof params);
            in.read(reinterpret_cast<char*>(&dim), sizeof dim);
            if (!in || dim > (1ull << 32)) break; // invalid record: stop, keep what parsed
            std::vector<double> values(dim);
            in.read(reinterpret_cast<char*>(values.data()),
                    static_cast<std::streamsize>(dim * sizeof(double)));
            if (!in) break;
            cache.map_.emplace(key(chip, params), std::move(values));
        }
        return cache;
    }

    const std::vector<double>* lookup(std::uint64_t chip_hash, std::uint64_t params_hash) const {
        std::lock_guard<std::mutex> lock(*mutex_);
        auto it = map_.find(key(chip_hash, params_hash));
        return it == map_.end() ? nullptr : &it->second;
    }

    void insert(std::uint64_t chip_hash, std::uint64_t params_hash, std::vector<double> values) {
        std::lock_guard<std::mutex> lock(*mutex_);
        map_[key(chip_hash, params_hash)] = std::move(values);
        dirty_ = true;
    }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(*mutex_);
        return map_.size();
    }

    void save() {
        std::lock_guard<std::mutex> lock(*mutex_);
        if (path_.empty() || !dirty_) return;
        const std::string tmp = path_ + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw IoError("FeatureCache: cannot write " + tmp);
            std::uint32_t magic = kMagic, version = kVersion;
            out.write(reinterpret_cast<const char*>(&magic), sizeof magic);
            out.write(reinterpret_cast<const char*>(&version), sizeof version);
            std::uint64_t count = map_.size();
            out.write(reinterpret_cast<const char*>(&count), sizeof count);
            for (const auto& [k, values] : map_) {
                std::uint64_t chip_hash = static_cast<std::uint64_t>(k >> 64);
                std::uint64_t params_hash = static_cast<std::uint64_t>(k);
                std::uint64_t dim = values.size();
                out.write(reinterpret_cast<const char*>(&chip_hash), sizeof chip_hash);
                out.write(reinterpret_cast<const char*>(&params_hash), sizeof params_hash);
                out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
                out.write(reinterpret_cast<const char*>(values.data()),
                          static_cast<std::streamsize>(dim * sizeof(double)));
            }
            if (!out) throw IoError("FeatureCache: write failed for " + tmp);
        }
        std::filesystem::rename(tmp, path_);
        dirty_ = false;
    }

    const std::string& path() const { return path_; }

private:
    static constexpr std::uint32_t kMagic = 0x43'46'42'56; // "VBFC"
    static constexpr std::uint32_t kVersion = 1;

    static unsigned __int128 key(std::uint64_t chip, std::uint64_t params) {
        return (static_cast<unsigned __int128>(chip) << 64) | params;
    }

    struct KeyHash {
        std::size_t operator()(unsigned __int128 k) const {
            return static_cast<std::size_t>(
                static_cast<std::uint64_t>(k) ^
                static_cast<std::uint64_t>(k >> 64) * 0x9e3779b97f4a7c15ULL);
        }
    };

    std::string path_;
    std::unordered_map<unsigned __int128, std::vector<double>, KeyHash> map_;
    std::unique_ptr<std::mutex> mutex_;
    bool dirty_ = false;
};

} // namespace vbench
