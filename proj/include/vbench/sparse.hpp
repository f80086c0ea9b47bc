#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vbench/error.hpp"

namespace vbench {

// Sparse representation classifier: the dictionary is the L2-normalized
// training set itself, one column per atom.
struct SrcModel {
    Eigen::MatrixXd dictionary; // feature dim x atom count, unit columns
    std::vector<int> atom_labels;
    double epsilon = 0.05; // residual tolerance, relative to a unit-norm sample
    std::optional<int> max_sparsity;

    int atom_count() const { return static_cast<int>(dictionary.cols()); }
    int class_count() const {
        int k = 0;
        for (int l : atom_labels) k = std::max(k, l + 1);
        return k;
    }
};

inline SrcModel src_fit(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                        double epsilon = 0.05, std::optional<int> max_sparsity = std::nullopt) {
    if (features.rows() == 0 || static_cast<std::size_t>(features.rows()) != labels.size())
        throw std::invalid_argument("src_fit: features/labels size mismatch");
    SrcModel model;
    model.epsilon = epsilon;
    model.max_sparsity = max_sparsity;
    model.dictionary.resize(features.cols(), features.rows());
    model.atom_labels = labels;
    int class_count = 0;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("src_fit: negative label");
        class_count = std::max(class_count, l + 1);
    }
    std::vector<int> seen(class_count, 0);
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        double norm = features.row(i).norm();
        if (norm <= 0.0)
            throw std::invalid_argument("src_fit: zero-norm sample");
        model.dictionary.col(i) = features.row(i).transpose() / norm;
        seen[labels[i]] = 1;
    }
    for (int k = 0; k < class_count; ++k)
        if (!seen[k]) throw std::invalid_argument("src_fit: class absent from labels");
    return model;
}

namespace detail {

// LASSO homotopy for min sum_i w_i|x_i| s.t. |Dx - y|_2 <= eps, following the
// regularization path of 0.5*|Dx-y|^2 + lambda*sum w_i|x_i| from lambda_max
// down to the first lambda where the residual constraint holds. Atoms enter
// and leave the active set at path breakpoints; the epsilon crossing inside a
// segment is solved exactly from the quadratic residual profile.
struct HomotopyOptions {
    double epsilon = 0.05;
    int iteration_cap = 0;           // 0: use 10 * atom count
    std::optional<int> max_sparsity; // optional support cap
    const std::vector<double>* atom_weights = nullptr;
};

inline Eigen::VectorXd homotopy_solve(const Eigen::MatrixXd& dict, const Eigen::VectorXd& y,
                                      const HomotopyOptions& opt) {
    const Eigen::Index n = dict.cols();
    const double feas_slack = 1e-9;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

    std::vector<double> w(n, 1.0);
    if (opt.atom_weights) {
        if (static_cast<Eigen::Index>(opt.atom_weights->size()) != n)
            throw std::invalid_argument("homotopy_solve: atom weight count mismatch");
        w = *opt.atom_weights;
        for (double v : w)
            if (v <= 0.0) throw std::invalid_argument("homotopy_solve: weights must be positive");
    }

    Eigen::VectorXd r = y;
    if (r.norm() <= opt.epsilon + feas_slack) return x; // zero already feasible

    Eigen::VectorXd c = dict.transpose() * r;
    double lambda = 0.0;
    Eigen::Index first = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        double v = std::abs(c[j]) / w[j];
        if (v > lambda) {
            lambda = v;
            first = j;
        }
    }
    if (lambda <= 0.0) {
        // y orthogonal to every atom: nothing can reduce the residual
        throw SolverNotConverged("homotopy_solve: target orthogonal to dictionary",
                                 std::vector<double>(x.data(), x.data() + n), r.norm());
    }

    std::vector<Eigen::Index> active{first};
    std::vector<double> sign{c[first] > 0 ? 1.0 : -1.0};

    Eigen::VectorXd best_x = x;
    double best_residual = r.norm();
    const int cap = opt.iteration_cap > 0 ? opt.iteration_cap : 10 * static_cast<int>(n);
    const int max_support = opt.max_sparsity ? *opt.max_sparsity
                                             : static_cast<int>(std::min(dict.rows(), n));

    for (int iter = 0; iter < cap; ++iter) {
        const int k = static_cast<int>(active.size());
        Eigen::MatrixXd da(dict.rows(), k);
        Eigen::VectorXd wz(k), xa(k);
        for (int i = 0; i < k; ++i) {
            da.col(i) = dict.col(active[i]);
            wz[i] = w[active[i]] * sign[i];
            xa[i] = x[active[i]];
        }
        Eigen::LDLT<Eigen::MatrixXd> gram(da.transpose() * da);
        if (gram.info() != Eigen::Success) break;
        Eigen::VectorXd dir = gram.solve(wz); // d x_A per unit decrease of lambda
        Eigen::VectorXd u = da * dir;
        double un2 = u.squaredNorm();
        if (!dir.allFinite() || un2 <= 1e-300) break; // degenerate support

        // epsilon crossing inside this segment: |r - s*u|^2 = eps^2
        double ru = r.dot(u);
        double rn2 = r.squaredNorm();
        double s_cross = std::numeric_limits<double>::infinity();
        {
            double disc = ru * ru - un2 * (rn2 - opt.epsilon * opt.epsilon);
            if (disc >= 0.0) {
                double s0 = (ru - std::sqrt(disc)) / un2;
                if (s0 >= 0.0) s_cross = s0;
            }
        }

        // next breakpoint: an inactive atom joins or an active one hits zero
        double s_event = lambda; // lambda cannot go below zero
        int event_type = 0;      // 0: path end, 1: join, 2: leave
        Eigen::Index event_idx = -1;
        double event_sign = 0.0;

        std::vector<char> in_active(n, 0);
        for (Eigen::Index idx : active) in_active[idx] = 1;
        if (k < max_support) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (in_active[j]) continue;
                double aj = dict.col(j).dot(u);
                // c_j(s) = c_j - s*aj meets +/- w_j*(lambda - s)
                double den_p = aj - w[j], num_p = c[j] - w[j] * lambda;
                double den_m = aj + w[j], num_m = c[j] + w[j] * lambda;
                if (std::abs(den_p) > 1e-300) {
                    double s = num_p / den_p;
                    if (s > 1e-12 && s < s_event) {
                        s_event = s;
                        event_type = 1;
                        event_idx = j;
                        event_sign = 1.0;
                    }
                }
                if (std::abs(den_m) > 1e-300) {
                    double s = num_m / den_m;
                    if (s > 1e-12 && s < s_event) {
                        s_event = s;
                        event_type = 1;
                        event_idx = j;
                        event_sign = -1.0;
                    }
                }
            }
        }
        for (int i = 0; i < k; ++i) {
            if (std::abs(dir[i]) <= 1e-300) continue;
            double s = -xa[i] / dir[i];
            if (s > 1e-12 && s <= s_event) { // on ties prefer removal
                s_event = s;
                event_type = 2;
                event_idx = active[i];
            }
        }

        if (s_cross <= s_event) {
            for (int i = 0; i < k; ++i) x[active[i]] = xa[i] + s_cross * dir[i];
            return x;
        }

        // advance to the breakpoint
        for (int i = 0; i < k; ++i) x[active[i]] = xa[i] + s_event * dir[i];
        lambda -= s_event;
        r = y - dict * x;
        c = dict.transpose() * r;
        double rnorm = r.norm();
        if (rnorm < best_residual) {
            best_residual = rnorm;
            best_x = x;
        }
        if (rnorm <= opt.epsilon + feas_slack) return x;

        if (event_type == 1) {
            active.push_back(event_idx);
            sign.push_back(event_sign);
        } else if (event_type == 2) {
            for (std::size_t i = 0; i < active.size(); ++i)
                if (active[i] == event_idx) {
                    x[event_idx] = 0.0;
                    active.erase(active.begin() + static_cast<std::ptrdiff_t>(i));
                    sign.erase(sign.begin() + static_cast<std::ptrdiff_t>(i));
                    break;
                }
        } else {
            break; // lambda reached zero: x is the least-squares fit on the support
        }
        if (active.empty()) break;
        if (lambda <= 1e-12) break;
    }

    double rnorm = (y - dict * x).norm();
    if (rnorm < best_residual) {
        best_residual = rnorm;
        best_x = x;
    }
    if (best_residual <= opt.epsilon + feas_slack) return best_x;
    throw SolverNotConverged("homotopy_solve: residual constraint not met",
                             std::vector<double>(best_x.data(), best_x.data() + n), best_residual);
}

} // namespace detail

// Solves min |x|_1 s.t. |Dx - y/|y||_2 <= epsilon for the model's dictionary.
// The sample is L2-normalized before solving; coefficients refer to the
// normalized sample. Optional per-atom l1 weights > 1 make atoms costlier.
inline Eigen::VectorXd sparse_solve(const SrcModel& model, const Eigen::VectorXd& sample,
                                    const std::vector<double>* atom_weights = nullptr) {
    if (sample.size() != model.dictionary.rows())
        throw std::invalid_argument("sparse_solve: sample dimension mismatch");
    double norm = sample.norm();
    if (norm <= 0.0) return Eigen::VectorXd::Zero(model.atom_count());
    detail::HomotopyOptions opt;
    opt.epsilon = model.epsilon;
    opt.max_sparsity = model.max_sparsity;
    opt.atom_weights = atom_weights;
    return detail::homotopy_solve(model.dictionary, sample / norm, opt);
}

struct SrcResult {
    int predicted = 0;
    std::vector<double> residuals; // per class, on the normalized sample
    Eigen::VectorXd coefficients;
};

// Class residual rule: r_c = |y - D*delta_c(x)| where delta_c keeps only the
// coefficients of class c; lowest residual wins, ties toward the lowest index.
inline SrcResult src_classify(const SrcModel& model, const Eigen::VectorXd& sample,
                              const std::vector<double>* atom_weights = nullptr) {
    SrcResult res;
    res.coefficients = sparse_solve(model, sample, atom_weights);
    const int classes = model.class_count();
    res.residuals.assign(classes, 0.0);

    double norm = sample.norm();
    Eigen::VectorXd y = norm > 0.0 ? Eigen::VectorXd(sample / norm)
                                   : Eigen::VectorXd(Eigen::VectorXd::Zero(sample.size()));
    for (int cls = 0; cls < classes; ++cls) {
        Eigen::VectorXd fit = Eigen::VectorXd::Zero(sample.size());
        for (int j = 0; j < model.atom_count(); ++j)
            if (model.atom_labels[j] == cls && res.coefficients[j] != 0.0)
                fit.noalias() += res.coefficients[j] * model.dictionary.col(j);
        res.residuals[cls] = (y - fit).norm();
    }
    res.predicted = 0;
    for (int cls = 1; cls < classes; ++cls)
        if (res.residuals[cls] < res.residuals[res.predicted]) res.predicted = cls;
    return res;
}

} // namespace vbench
