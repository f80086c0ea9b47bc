#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "vbench/error.hpp"

namespace vbench {

struct SvmParams {
    double c = 1.0;
    double tol = 1e-4;    // relative primal-objective improvement threshold
    int max_epochs = 1000;
};

// One-vs-rest linear SVM. weights is K x D, one row per class.
struct LinearSvmModel {
    int class_count = 0;
    Eigen::MatrixXd weights;
    Eigen::VectorXd biases;
    double c_param = 1.0;
};

namespace detail {

// L2-regularized hinge loss: P(w) = 0.5*|w|^2 + C * sum_i max(0, 1 - y_i w.x_i),
// with the bias folded in as an extra always-1 feature (regularized too).
struct BinarySvmResult {
    Eigen::VectorXd w; // D+1, last entry is the bias
    std::vector<double> objective_history;
};

inline double svm_primal(const Eigen::MatrixXd& x_aug, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& w, double c) {
    double obj = 0.5 * w.squaredNorm();
    Eigen::VectorXd margins = y.cwiseProduct(x_aug * w);
    for (Eigen::Index i = 0; i < margins.size(); ++i)
        obj += c * std::max(0.0, 1.0 - margins[i]);
    return obj;
}

// Deterministic full-batch subgradient descent with a backtracking step,
// accepted only on strict decrease, so the per-epoch primal objective is
// monotone by construction. One epoch = one accepted step.
inline BinarySvmResult train_binary_svm(const Eigen::MatrixXd& x_aug, const Eigen::VectorXd& y,
                                        const SvmParams& params,
                                        const Eigen::VectorXd* warm_start = nullptr) {
    const Eigen::Index d = x_aug.cols();
    BinarySvmResult res;
    res.w = warm_start ? *warm_start : Eigen::VectorXd::Zero(d);

    double obj = svm_primal(x_aug, y, res.w, params.c);
    res.objective_history.push_back(obj);
    double step = 1.0;
    for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
        Eigen::VectorXd grad = res.w;
        Eigen::VectorXd margins = y.cwiseProduct(x_aug * res.w);
        for (Eigen::Index i = 0; i < margins.size(); ++i)
            if (margins[i] < 1.0) grad.noalias() -= params.c * y[i] * x_aug.row(i).transpose();

        double gnorm2 = grad.squaredNorm();
        if (gnorm2 == 0.0) break;

        step *= 2.0; // let the step grow back after conservative epochs
        double next_obj = obj;
        Eigen::VectorXd next_w;
        bool accepted = false;
        while (step > 1e-18) {
            next_w = res.w - step * grad;
            next_obj = svm_primal(x_aug, y, next_w, params.c);
            if (next_obj < obj) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // no descent along the subgradient: done

        res.w = next_w;
        res.objective_history.push_back(next_obj);
        bool converged = (obj - next_obj) < params.tol * std::max(1.0, std::abs(obj));
        obj = next_obj;
        if (converged) break;
    }
    return res;
}

} // namespace detail

struct SvmDiagnostics {
    std::vector<std::vector<double>> objective_history; // per class
};

// Rows of features are samples; labels in [0, K). Every class must appear.
inline LinearSvmModel svm_train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                const SvmParams& params = {}, SvmDiagnostics* diag = nullptr,
                                const LinearSvmModel* warm_start = nullptr) {
    if (features.rows() == 0 || static_cast<std::size_t>(features.rows()) != labels.size())
        throw std::invalid_argument("svm_train: features/labels size mismatch");
    if (!features.allFinite())
        throw NumericError("svm_train: non-finite feature");

    int class_count = 0;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("svm_train: negative label");
        class_count = std::max(class_count, l + 1);
    }
    std::vector<int> seen(class_count, 0);
    for (int l : labels) seen[l] = 1;
    for (int k = 0; k < class_count; ++k)
        if (!seen[k]) throw std::invalid_argument("svm_train: class absent from labels");

    const Eigen::Index n = features.rows(), d = features.cols();
    Eigen::MatrixXd x_aug(n, d + 1);
    x_aug.leftCols(d) = features;
    x_aug.col(d).setOnes();

    LinearSvmModel model;
    model.class_count = class_count;
    model.c_param = params.c;
    model.weights.resize(class_count, d);
    model.biases.resize(class_count);
    if (diag) diag->objective_history.assign(class_count, {});

    for (int k = 0; k < class_count; ++k) {
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[i] == k ? 1.0 : -1.0;

        Eigen::VectorXd w0;
        const Eigen::VectorXd* init = nullptr;
        if (warm_start) {
            if (warm_start->weights.cols() != d || warm_start->class_count != class_count)
                throw std::invalid_argument("svm_train: warm start dimension mismatch");
            w0.resize(d + 1);
            w0.head(d) = warm_start->weights.row(k).transpose();
            w0[d] = warm_start->biases[k];
            init = &w0;
        }
        auto res = detail::train_binary_svm(x_aug, y, params, init);
        model.weights.row(k) = res.w.head(d).transpose();
        model.biases[k] = res.w[d];
        if (diag) diag->objective_history[k] = std::move(res.objective_history);
    }
    return model;
}

// argmax_k (w_k . x + b_k); ties break toward the lowest class index.
inline int svm_predict(const LinearSvmModel& model, const Eigen::VectorXd& feature) {
    if (feature.size() != model.weights.cols())
        throw std::invalid_argument("svm_predict: feature dimension mismatch");
    Eigen::VectorXd scores = model.weights * feature + model.biases;
    int best = 0;
    for (int k = 1; k < model.class_count; ++k)
        if (scores[k] > scores[best]) best = k;
    return best;
}

} // namespace vbench
