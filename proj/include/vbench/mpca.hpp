#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "vbench/error.hpp"
#include "vbench/feature.hpp"
#include "vbench/image.hpp"

namespace vbench {

struct MpcaParams {
    double energy_q = 97.0; // percent of per-mode eigenvalue mass to retain
    int max_iterations = 10;
    double tol = 1e-6; // relative captured-variation change

    void validate() const {
        if (energy_q <= 0.0 || energy_q > 100.0)
            throw std::invalid_argument("MpcaParams: energy_q must be in (0,100]");
        if (max_iterations < 1)
            throw std::invalid_argument("MpcaParams: max_iterations must be >= 1");
    }
};

// Two-mode multilinear PCA model. Projections have orthonormal rows
// (retained dims x original dims); the core of sample X is
// u1 * (X - mean) * u2^T.
struct MpcaModel {
    Eigen::MatrixXd u1;   // P1 x I1
    Eigen::MatrixXd u2;   // P2 x I2
    Eigen::MatrixXd mean; // I1 x I2
    double energy_q = 0.0;
    int iterations_run = 0;
    std::vector<double> mode1_eigenvalues; // final per-mode spectra, descending
    std::vector<double> mode2_eigenvalues;
    std::vector<double> captured_history; // captured scatter per iteration
    double total_scatter = 0.0;

    int p1() const { return static_cast<int>(u1.rows()); }
    int p2() const { return static_cast<int>(u2.rows()); }
    int i1() const { return static_cast<int>(u1.cols()); }
    int i2() const { return static_cast<int>(u2.cols()); }
    double captured_scatter() const {
        return captured_history.empty() ? 0.0 : captured_history.back();
    }
};

// Horizontal concatenation of per-sample mode-n unfoldings. For a matrix
// sample the mode-1 unfolding is the sample itself and mode-2 is its
// transpose; columns enumerate (sample, other-mode index) with the sample
// index varying slowest.
inline Eigen::MatrixXd mode_unfold(const std::vector<Eigen::MatrixXd>& samples, int mode) {
    if (samples.empty())
        throw std::invalid_argument("mode_unfold: empty sample set");
    if (mode != 1 && mode != 2)
        throw std::invalid_argument("mode_unfold: mode must be 1 or 2");
    const Eigen::Index rows = mode == 1 ? samples[0].rows() : samples[0].cols();
    const Eigen::Index per = mode == 1 ? samples[0].cols() : samples[0].rows();
    Eigen::MatrixXd out(rows, per * static_cast<Eigen::Index>(samples.size()));
    for (std::size_t m = 0; m < samples.size(); ++m) {
        if (samples[m].rows() != samples[0].rows() || samples[m].cols() != samples[0].cols())
            throw std::invalid_argument("mode_unfold: samples must share dimensions");
        if (mode == 1)
            out.middleCols(static_cast<Eigen::Index>(m) * per, per) = samples[m];
        else
            out.middleCols(static_cast<Eigen::Index>(m) * per, per) = samples[m].transpose();
    }
    return out;
}

namespace detail {

// Symmetric eigen-decomposition under a deterministic contract: eigenvalues
// descending, each eigenvector's largest-magnitude component made positive.
struct EigResult {
    Eigen::VectorXd values;  // descending
    Eigen::MatrixXd vectors; // rows are eigenvectors
};

inline EigResult deterministic_eig(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw NumericError("deterministic_eig: eigensolver failed");
    const Eigen::Index n = sym.rows();
    EigResult r;
    r.values.resize(n);
    r.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r.values[i] = solver.eigenvalues()[n - 1 - i];
        Eigen::VectorXd v = solver.eigenvectors().col(n - 1 - i);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v[imax] < 0.0) v = -v;
        r.vectors.row(i) = v.transpose();
    }
    return r;
}

// Smallest P with cumulative eigenvalue mass >= q%. q >= 100 keeps every
// dimension; zero total mass degenerates to P = 1.
inline int dims_for_energy(const Eigen::VectorXd& values, double q) {
    const int n = static_cast<int>(values.size());
    if (q >= 100.0) return n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += std::max(values[i], 0.0);
    if (total <= 0.0) return 1;
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
        cum += std::max(values[i], 0.0);
        if (cum * 100.0 >= q * total) return i + 1;
    }
    return n;
}

} // namespace detail

// Alternating partial-projection maximization. Initializes each mode from
// its full-projection scatter, picks retained dims by the per-mode energy
// threshold, then iterates conditioned scatter updates until the captured
// variation stalls. Captured variation is non-decreasing across iterations.
inline MpcaModel mpca_fit(const std::vector<Eigen::MatrixXd>& samples, const MpcaParams& params = {}) {
    params.validate();
    if (samples.size() < 2)
        throw std::invalid_argument("mpca_fit: need at least 2 samples");
    const Eigen::Index i1 = samples[0].rows(), i2 = samples[0].cols();
    for (const auto& s : samples) {
        if (s.rows() != i1 || s.cols() != i2)
            throw std::invalid_argument("mpca_fit: samples must share dimensions");
        if (!s.allFinite())
            throw NumericError("mpca_fit: non-finite sample");
    }

    MpcaModel model;
    model.energy_q = params.energy_q;
    model.mean = Eigen::MatrixXd::Zero(i1, i2);
    for (const auto& s : samples) model.mean += s;
    model.mean /= static_cast<double>(samples.size());

    std::vector<Eigen::MatrixXd> centered;
    centered.reserve(samples.size());
    model.total_scatter = 0.0;
    for (const auto& s : samples) {
        centered.push_back(s - model.mean);
        model.total_scatter += centered.back().squaredNorm();
    }

    // init: full-projection scatter per mode
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(i1, i1);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(i2, i2);
    for (const auto& x : centered) {
        s1.noalias() += x * x.transpose();
        s2.noalias() += x.transpose() * x;
    }
    auto e1 = detail::deterministic_eig(s1);
    auto e2 = detail::deterministic_eig(s2);
    const int p1 = detail::dims_for_energy(e1.values, params.energy_q);
    const int p2 = detail::dims_for_energy(e2.values, params.energy_q);
    model.u1 = e1.vectors.topRows(p1);
    model.u2 = e2.vectors.topRows(p2);

    auto captured = [&]() {
        double psi = 0.0;
        for (const auto& x : centered) psi += (model.u1 * x * model.u2.transpose()).squaredNorm();
        return psi;
    };

    double psi_prev = captured();
    model.captured_history.push_back(psi_prev);
    for (int it = 0; it < params.max_iterations; ++it) {
        // mode 1 conditioned on u2
        s1.setZero();
        for (const auto& x : centered) {
            Eigen::MatrixXd proj = x * model.u2.transpose(); // I1 x P2
            s1.noalias() += proj * proj.transpose();
        }
        e1 = detail::deterministic_eig(s1);
        model.u1 = e1.vectors.topRows(p1);

        // mode 2 conditioned on u1
        s2.setZero();
        for (const auto& x : centered) {
            Eigen::MatrixXd proj = model.u1 * x; // P1 x I2
            s2.noalias() += proj.transpose() * proj;
        }
        e2 = detail::deterministic_eig(s2);
        model.u2 = e2.vectors.topRows(p2);

        double psi = captured();
        if (psi < psi_prev - 1e-9 * std::max(1.0, psi_prev))
            throw NumericError("mpca_fit: captured variation decreased");
        model.captured_history.push_back(psi);
        model.iterations_run = it + 1;
        if (psi - psi_prev < params.tol * std::max(psi, 1e-300)) {
            psi_prev = psi;
            break;
        }
        psi_prev = psi;
    }

    model.mode1_eigenvalues.assign(e1.values.data(), e1.values.data() + e1.values.size());
    model.mode2_eigenvalues.assign(e2.values.data(), e2.values.data() + e2.values.size());
    return model;
}

inline Eigen::MatrixXd mpca_core(const Eigen::MatrixXd& sample, const MpcaModel& model) {
    if (sample.rows() != model.i1() || sample.cols() != model.i2())
        throw std::invalid_argument("mpca_core: sample dimensions do not match model");
    return model.u1 * (sample - model.mean) * model.u2.transpose();
}

// Core tensor vectorized row-major; dimension P1*P2.
inline FeatureVector mpca_project(const Eigen::MatrixXd& sample, const MpcaModel& model) {
    Eigen::MatrixXd core = mpca_core(sample, model);
    FeatureVector out;
    out.extractor = "mpca";
    out.values.reserve(static_cast<std::size_t>(core.size()));
    for (Eigen::Index r = 0; r < core.rows(); ++r)
        for (Eigen::Index c = 0; c < core.cols(); ++c) out.values.push_back(core(r, c));
    return out;
}

inline Eigen::MatrixXd mpca_reconstruct(const FeatureVector& feature, const MpcaModel& model) {
    if (static_cast<Eigen::Index>(feature.values.size()) !=
        static_cast<Eigen::Index>(model.p1()) * model.p2())
        throw std::invalid_argument("mpca_reconstruct: feature dimension mismatch");
    Eigen::MatrixXd core(model.p1(), model.p2());
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < core.rows(); ++r)
        for (Eigen::Index c = 0; c < core.cols(); ++c) core(r, c) = feature.values[k++];
    return model.u1.transpose() * core * model.u2 + model.mean;
}

// Chip <-> matrix bridges for single-channel chips.
inline Eigen::MatrixXd chip_to_matrix(const ImageChip& chip) {
    if (chip.channels() != 1)
        throw std::invalid_argument("chip_to_matrix: single-channel chip required");
    Eigen::MatrixXd m(chip.height(), chip.width());
    for (int y = 0; y < chip.height(); ++y)
        for (int x = 0; x < chip.width(); ++x) m(y, x) = chip.at(x, y);
    return m;
}

inline ImageChip matrix_to_chip(const Eigen::MatrixXd& m) {
    ImageChip chip(static_cast<int>(m.cols()), static_cast<int>(m.rows()), 1);
    for (int y = 0; y < chip.height(); ++y)
        for (int x = 0; x < chip.width(); ++x) chip.at(x, y) = clamp01(m(y, x));
    return chip;
}

} // namespace vbench
