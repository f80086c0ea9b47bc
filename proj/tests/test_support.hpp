#pragma once

// Shared fixtures and independent oracles. Every oracle here is a separate
// straight-line implementation of the documented rule, kept deliberately
// naive so it cannot share a bug with the library path it checks.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "vbench/histogram.hpp"
#include "vbench/hog.hpp"
#include "vbench/image.hpp"
#include "vbench/lbp.hpp"
#include "vbench/panchro.hpp"
#include "vbench/rng.hpp"

namespace testutil {

using vbench::ImageChip;

inline ImageChip make_chip(int w, int h, int channels,
                           const std::function<double(int x, int y, int c)>& fn) {
    ImageChip img(w, h, channels);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c) img.at(x, y, c) = fn(x, y, c);
    return img;
}

inline ImageChip random_chip(int w, int h, int channels, std::uint64_t seed, double lo = 0.0,
                             double hi = 1.0) {
    vbench::CounterRng rng(seed, 0x7e57);
    return make_chip(w, h, channels, [&](int, int, int) { return rng.uniform(lo, hi); });
}

// Bright axis-aligned bar on a dark field, centered, length x thickness.
inline ImageChip bar_chip(int size, int length, int thickness, double fg = 1.0, double bg = 0.0) {
    const int cx = size / 2, cy = size / 2;
    return make_chip(size, size, 1, [&](int x, int y, int) {
        return (std::abs(x - cx) <= length / 2 && std::abs(y - cy) <= thickness / 2) ? fg : bg;
    });
}

// --- histogram specification oracle -----------------------------------------

// Per-pixel equalization against a flat target by direct scan over target
// bins with integer cross-multiplied CDF comparison.
inline ImageChip equalize_oracle(const ImageChip& img, int bins) {
    std::vector<std::uint64_t> counts(bins, 0);
    for (double v : img.data())
        ++counts[static_cast<std::size_t>(std::floor(v * (bins - 1) + 0.5))];
    std::vector<std::uint64_t> cum(bins);
    std::uint64_t acc = 0;
    for (int i = 0; i < bins; ++i) cum[i] = (acc += counts[i]);
    const std::uint64_t total = cum[bins - 1];

    ImageChip out(img.width(), img.height(), 1);
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        int s = static_cast<int>(std::floor(img.data()[i] * (bins - 1) + 0.5));
        int t = 0;
        // flat target: CDF_T(t) = (t+1)/bins; find smallest t with
        // (t+1)/bins >= cum_s/total  <=>  (t+1)*total >= cum_s*bins
        while (t < bins - 1 && static_cast<unsigned __int128>(t + 1) * total <
                                   static_cast<unsigned __int128>(cum[s]) * bins)
            ++t;
        out.data()[i] = static_cast<double>(t) / (bins - 1);
    }
    return out;
}

// --- panchromatic oracle -----------------------------------------------------

// Straight-line per-pixel pipeline: blue gain, power laws, luma mix, clamp.
inline double panchro_pixel_oracle(double r, double g, double b, const vbench::PanchroParams& p) {
    double b2 = b * p.blue_gain;
    double r2 = std::pow(r, p.red_gamma);
    double g2 = std::pow(g, p.green_gamma);
    double v = p.luma_weights[0] * r2 + p.luma_weights[1] * g2 + p.luma_weights[2] * b2;
    if (v < 0) v = 0;
    if (v > 1) v = 1;
    return v;
}

// --- HOG oracles -------------------------------------------------------------

// Per-pixel voting loop over one cell region, bin centers at (k+0.5)*width.
inline std::vector<double> cell_vote_oracle(const vbench::GradientField& grad, int cell_x,
                                            int cell_y, int cell_size, int bins) {
    std::vector<double> hist(bins, 0.0);
    const double bw = M_PI / bins;
    for (int y = cell_y * cell_size; y < (cell_y + 1) * cell_size; ++y)
        for (int x = cell_x * cell_size; x < (cell_x + 1) * cell_size; ++x) {
            double m = grad.mag(x, y);
            if (m == 0.0) continue;
            double theta = grad.ori(x, y);
            // distance to the two straddling bin centers
            double u = theta / bw - 0.5;
            double k = std::floor(u);
            double frac = u - k;
            int lo = static_cast<int>(k);
            lo = ((lo % bins) + bins) % bins;
            hist[lo] += m * (1 - frac);
            hist[(lo + 1) % bins] += m * frac;
        }
    return hist;
}

// --- LBP oracles -------------------------------------------------------------

// Independent bilinear sampler + threshold loop.
inline std::uint32_t lbp_code_oracle(const ImageChip& img, int x, int y, double radius, int P) {
    double center = img.at(x, y);
    std::uint32_t code = 0;
    for (int k = 0; k < P; ++k) {
        double a = 2.0 * M_PI * k / P;
        double sx = x + radius * std::cos(a);
        double sy = y + radius * std::sin(a);
        int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
        double fx = sx - x0, fy = sy - y0;
        auto px = [&](int xi, int yi) {
            xi = std::min(std::max(xi, 0), img.width() - 1);
            yi = std::min(std::max(yi, 0), img.height() - 1);
            return img.at(xi, yi);
        };
        double v = px(x0, y0) * (1 - fx) * (1 - fy) + px(x0 + 1, y0) * fx * (1 - fy) +
                   px(x0, y0 + 1) * (1 - fx) * fy + px(x0 + 1, y0 + 1) * fx * fy;
        if (v >= center) code |= 1u << k;
    }
    return code;
}

inline int transitions_oracle(std::uint32_t code, int P) {
    int t = 0;
    for (int k = 0; k < P; ++k) {
        int a = (code >> k) & 1;
        int b = (code >> ((k + 1) % P)) & 1;
        if (a != b) ++t;
    }
    return t;
}

// Simulates the descend-on-non-uniform hierarchy per pixel; returns how many
// pixels retired at each scale plus the catch-all count.
inline std::vector<long> hmlbp_retirement_oracle(const ImageChip& img,
                                                 const std::vector<double>& radii, int P) {
    const int margin = static_cast<int>(std::ceil(radii.front()));
    std::vector<long> retired(radii.size() + 1, 0);
    for (int y = margin; y <= img.height() - 1 - margin; ++y)
        for (int x = margin; x <= img.width() - 1 - margin; ++x) {
            bool done = false;
            for (std::size_t s = 0; s < radii.size(); ++s) {
                std::uint32_t code = lbp_code_oracle(img, x, y, radii[s], P);
                if (transitions_oracle(code, P) <= 2) {
                    ++retired[s];
                    done = true;
                    break;
                }
            }
            if (!done) ++retired.back();
        }
    return retired;
}

// --- MPCA oracles ------------------------------------------------------------

// vec(U1 (X-mean) U2^T) via the explicit Kronecker product (U2 kron U1) acting
// on vec(X-mean). Row-major vec to match the library convention.
inline std::vector<double> kronecker_projection_oracle(const Eigen::MatrixXd& x,
                                                       const Eigen::MatrixXd& mean,
                                                       const Eigen::MatrixXd& u1,
                                                       const Eigen::MatrixXd& u2) {
    const Eigen::Index p1 = u1.rows(), p2 = u2.rows();
    const Eigen::Index i1 = u1.cols(), i2 = u2.cols();
    Eigen::MatrixXd centered = x - mean;
    Eigen::VectorXd vec(i1 * i2); // row-major flatten
    for (Eigen::Index r = 0; r < i1; ++r)
        for (Eigen::Index c = 0; c < i2; ++c) vec[r * i2 + c] = centered(r, c);
    Eigen::MatrixXd kron(p1 * p2, i1 * i2);
    for (Eigen::Index a = 0; a < p1; ++a)
        for (Eigen::Index b = 0; b < p2; ++b)
            for (Eigen::Index r = 0; r < i1; ++r)
                for (Eigen::Index c = 0; c < i2; ++c)
                    kron(a * p2 + b, r * i2 + c) = u1(a, r) * u2(b, c);
    Eigen::VectorXd core = kron * vec;
    return std::vector<double>(core.data(), core.data() + core.size());
}

// Mode-n unfolding by raw index arithmetic over the sample list.
inline Eigen::MatrixXd unfold_oracle(const std::vector<Eigen::MatrixXd>& samples, int mode) {
    const Eigen::Index i1 = samples[0].rows(), i2 = samples[0].cols();
    const Eigen::Index rows = mode == 1 ? i1 : i2;
    const Eigen::Index per = mode == 1 ? i2 : i1;
    Eigen::MatrixXd out(rows, per * static_cast<Eigen::Index>(samples.size()));
    for (std::size_t m = 0; m < samples.size(); ++m)
        for (Eigen::Index r = 0; r < i1; ++r)
            for (Eigen::Index c = 0; c < i2; ++c) {
                if (mode == 1)
                    out(r, static_cast<Eigen::Index>(m) * per + c) = samples[m](r, c);
                else
                    out(c, static_cast<Eigen::Index>(m) * per + r) = samples[m](r, c);
            }
    return out;
}

// --- sparse recovery oracle ---------------------------------------------------

struct SupportSolution {
    std::vector<int> support;
    Eigen::VectorXd coefficients; // full length, zeros off support
    double residual = std::numeric_limits<double>::infinity();
    double l1 = std::numeric_limits<double>::infinity();
    bool found = false;
};

// Exhaustive search over all supports of size <= max_size: least squares per
// support, feasible if residual <= eps, pick the smallest l1 norm.
inline SupportSolution enumerate_sparse_oracle(const Eigen::MatrixXd& dict,
                                               const Eigen::VectorXd& y, double eps,
                                               int max_size) {
    const int n = static_cast<int>(dict.cols());
    SupportSolution best;

    std::vector<int> idx;
    std::function<void(int, int)> recurse = [&](int start, int remaining) {
        if (!idx.empty()) {
            Eigen::MatrixXd sub(dict.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t i = 0; i < idx.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = dict.col(idx[i]);
            Eigen::VectorXd coef = sub.colPivHouseholderQr().solve(y);
            double residual = (sub * coef - y).norm();
            if (residual <= eps) {
                double l1 = coef.cwiseAbs().sum();
                if (!best.found || l1 < best.l1 - 1e-12) {
                    best.found = true;
                    best.support = idx;
                    best.l1 = l1;
                    best.residual = residual;
                    best.coefficients = Eigen::VectorXd::Zero(n);
                    for (std::size_t i = 0; i < idx.size(); ++i)
                        best.coefficients[idx[i]] = coef[static_cast<Eigen::Index>(i)];
                }
            }
        }
        if (remaining == 0) return;
        for (int j = start; j < n; ++j) {
            idx.push_back(j);
            recurse(j + 1, remaining - 1);
            idx.pop_back();
        }
    };
    // zero support: feasible only if |y| <= eps
    if (y.norm() <= eps) {
        best.found = true;
        best.support = {};
        best.l1 = 0.0;
        best.residual = y.norm();
        best.coefficients = Eigen::VectorXd::Zero(n);
        return best;
    }
    recurse(0, max_size);
    return best;
}

} // namespace testutil
