#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "vbench/error.hpp"
#include "vbench/mpca.hpp"
#include "vbench/sparse.hpp"
#include "vbench/svm.hpp"

namespace vbench {

// Flat binary model dumps: magic, format version, type tag, then payload.
// Little-endian doubles; all shapes written as u64.
namespace model_io {

inline constexpr std::uint32_t kMagic = 0x44'4d'42'56; // "VBMD"
inline constexpr std::uint32_t kVersion = 1;

enum class ModelType : std::uint32_t { mpca = 1, svm = 2, src = 3, bundle = 4 };

namespace detail {

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw IoError("model_io: truncated file");
    return v;
}

inline void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

inline Eigen::MatrixXd get_matrix(std::istream& in) {
    auto rows = get<std::uint64_t>(in);
    auto cols = get<std::uint64_t>(in);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get<double>(in);
    return m;
}

inline void put_header(std::ostream& out, ModelType type) {
    put(out, kMagic);
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(type));
}

inline void check_header(std::istream& in, ModelType expected, const std::string& path) {
    if (get<std::uint32_t>(in) != kMagic) throw IoError("model_io: bad magic in " + path);
    if (get<std::uint32_t>(in) != kVersion) throw IoError("model_io: unsupported version in " + path);
    if (get<std::uint32_t>(in) != static_cast<std::uint32_t>(expected))
        throw IoError("model_io: unexpected model type in " + path);
}

} // namespace detail

inline void save_mpca(const std::string& path, const MpcaModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("model_io: cannot open " + path);
    detail::put_header(out, ModelType::mpca);
    detail::put<double>(out, model.energy_q);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.iterations_run));
    detail::put_matrix(out, model.u1);
    detail::put_matrix(out, model.u2);
    detail::put_matrix(out, model.mean);
    if (!out) throw IoError("model_io: write failed for " + path);
}

inline MpcaModel load_mpca(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("model_io: cannot open " + path);
    detail::check_header(in, ModelType::mpca, path);
    MpcaModel m;
    m.energy_q = detail::get<double>(in);
    m.iterations_run = static_cast<int>(detail::get<std::uint32_t>(in));
    m.u1 = detail::get_matrix(in);
    m.u2 = detail::get_matrix(in);
    m.mean = detail::get_matrix(in);
    return m;
}

inline void save_svm(const std::string& path, const LinearSvmModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("model_io: cannot open " + path);
    detail::put_header(out, ModelType::svm);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.class_count));
    detail::put<double>(out, model.c_param);
    detail::put_matrix(out, model.weights);
    detail::put_matrix(out, model.biases);
    if (!out) throw IoError("model_io: write failed for " + path);
}

inline LinearSvmModel load_svm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("model_io: cannot open " + path);
    detail::check_header(in, ModelType::svm, path);
    LinearSvmModel m;
    m.class_count = static_cast<int>(detail::get<std::uint32_t>(in));
    m.c_param = detail::get<double>(in);
    m.weights = detail::get_matrix(in);
    m.biases = detail::get_matrix(in);
    return m;
}

inline void save_src(const std::string& path, const SrcModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("model_io: cannot open " + path);
    detail::put_header(out, ModelType::src);
    detail::put<double>(out, model.epsilon);
    detail::put<std::int64_t>(out, model.max_sparsity ? *model.max_sparsity : -1);
    detail::put<std::uint64_t>(out, model.atom_labels.size());
    for (int l : model.atom_labels) detail::put<std::int32_t>(out, l);
    detail::put_matrix(out, model.dictionary);
    if (!out) throw IoError("model_io: write failed for " + path);
}

// Generic ordered list of matrices (standardizer statistics, projection
// matrices) under the same header discipline.
inline void save_bundle(const std::string& path, const std::vector<Eigen::MatrixXd>& mats) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("model_io: cannot open " + path);
    detail::put_header(out, ModelType::bundle);
    detail::put<std::uint64_t>(out, mats.size());
    for (const auto& m : mats) detail::put_matrix(out, m);
    if (!out) throw IoError("model_io: write failed for " + path);
}

inline std::vector<Eigen::MatrixXd> load_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("model_io: cannot open " + path);
    detail::check_header(in, ModelType::bundle, path);
    auto count = detail::get<std::uint64_t>(in);
    std::vector<Eigen::MatrixXd> mats;
    mats.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) mats.push_back(detail::get_matrix(in));
    return mats;
}

inline SrcModel load_src(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("model_io: cannot open " + path);
    detail::check_header(in, ModelType::src, path);
    SrcModel m;
    m.epsilon = detail::get<double>(in);
    auto cap = detail::get<std::int64_t>(in);
    if (cap >= 0) m.max_sparsity = static_cast<int>(cap);
    auto count = detail::get<std::uint64_t>(in);
    m.atom_labels.resize(count);
    for (auto& l : m.atom_labels) l = detail::get<std::int32_t>(in);
    m.dictionary = detail::get_matrix(in);
    return m;
}

} // namespace model_io
} // namespace vbench
