#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vbench/feature.hpp"
#include "vbench/image.hpp"

namespace vbench {

struct LbpScale {
    double radius = 1.0;
    int samples = 8; // neighbor count P

    void validate() const {
        if (radius <= 0.0) throw std::invalid_argument("LbpScale: radius must be positive");
        if (samples < 4) throw std::invalid_argument("LbpScale: samples must be >= 4");
        if (samples > 24) throw std::invalid_argument("LbpScale: samples > 24 unsupported");
    }
};

struct HmlbpParams {
    std::vector<LbpScale> scales{{3.0, 8}, {2.0, 8}, {1.0, 8}}; // largest to smallest
    bool normalize = true;

    void validate() const {
        if (scales.empty()) throw std::invalid_argument("HmlbpParams: no scales");
        for (std::size_t i = 0; i < scales.size(); ++i) {
            scales[i].validate();
            if (i > 0 && !(scales[i].radius < scales[i - 1].radius))
                throw std::invalid_argument("HmlbpParams: radii must be strictly decreasing");
            if (scales[i].samples != scales[0].samples)
                throw std::invalid_argument("HmlbpParams: all scales must share the same P");
        }
    }
};

// Circular LBP code. Neighbor k sits at angle 2*pi*k/P on the sampling
// circle (k=0 on the +x axis, counter-clockwise), bilinearly interpolated;
// bit k is set iff neighbor >= center. Bit 0 is least significant.
inline std::uint32_t lbp_code(const ImageChip& img, int x, int y, const LbpScale& scale) {
    if (img.channels() != 1)
        throw std::invalid_argument("lbp_code: single-channel input required");
    scale.validate();
    const double r = scale.radius;
    if (x - r < 0.0 || y - r < 0.0 || x + r > img.width() - 1.0 || y + r > img.height() - 1.0)
        throw std::invalid_argument("lbp_code: sampling circle outside image");

    const double center = img.at(x, y);
    std::uint32_t code = 0;
    for (int k = 0; k < scale.samples; ++k) {
        double angle = 2.0 * M_PI * k / scale.samples;
        double nx = x + r * std::cos(angle);
        double ny = y + r * std::sin(angle);
        double v = detail::sample_clamped(img, nx, ny, 0);
        if (v >= center) code |= (1u << k);
    }
    return code;
}

// Number of 0/1 changes around the circular bit sequence.
inline int transitions(std::uint32_t code, int samples) {
    if (samples < 1 || samples > 31 || code >= (1u << samples))
        throw std::invalid_argument("transitions: code out of range for P");
    int count = 0;
    for (int k = 0; k < samples; ++k) {
        int a = (code >> k) & 1;
        int b = (code >> ((k + 1) % samples)) & 1;
        count += a ^ b;
    }
    return count;
}

inline bool is_uniform(std::uint32_t code, int samples) { return transitions(code, samples) <= 2; }

inline int uniform_pattern_count(int samples) { return samples * (samples - 1) + 2; }

// Uniform codes indexed by ascending code value; non-uniform codes map to -1.
inline std::vector<int> uniform_index_table(int samples) {
    std::vector<int> table(std::size_t{1} << samples, -1);
    int next = 0;
    for (std::uint32_t code = 0; code < table.size(); ++code)
        if (is_uniform(code, samples)) table[code] = next++;
    return table;
}

inline int hmlbp_dimension(const HmlbpParams& params) {
    return uniform_pattern_count(params.scales[0].samples) * static_cast<int>(params.scales.size()) + 1;
}

// Hierarchical multi-scale descriptor. Every pixel valid at the largest
// radius is evaluated there first; uniform codes are histogrammed at that
// scale and the pixel retires, non-uniform pixels descend to the next
// smaller radius. Pixels still non-uniform after the smallest scale land in
// one catch-all bin, so each pixel contributes to exactly one bin.
inline FeatureVector hmlbp_descriptor(const ImageChip& img, const HmlbpParams& params = {}) {
    if (img.channels() != 1)
        throw std::invalid_argument("hmlbp_descriptor: single-channel input required");
    params.validate();

    const double r_max = params.scales[0].radius;
    const int x_lo = static_cast<int>(std::ceil(r_max));
    const int y_lo = x_lo;
    const int x_hi = img.width() - 1 - x_lo;
    const int y_hi = img.height() - 1 - y_lo;
    if (x_hi < x_lo || y_hi < y_lo)
        throw std::invalid_argument("hmlbp_descriptor: image too small for the largest radius");

    const int P = params.scales[0].samples;
    const int ub = uniform_pattern_count(P);
    const int scale_count = static_cast<int>(params.scales.size());
    const std::vector<int> uidx = uniform_index_table(P);

    FeatureVector out;
    out.extractor = "hmlbp";
    out.values.assign(static_cast<std::size_t>(ub) * scale_count + 1, 0.0);
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            bool retired = false;
            for (int s = 0; s < scale_count; ++s) {
                std::uint32_t code = lbp_code(img, x, y, params.scales[s]);
                if (uidx[code] >= 0) {
                    out.values[static_cast<std::size_t>(s) * ub + uidx[code]] += 1.0;
                    retired = true;
                    break;
                }
            }
            if (!retired) out.values.back() += 1.0;
        }
    }

    if (params.normalize) {
        double total = 0.0;
        for (double v : out.values) total += v;
        if (total > 0.0)
            for (double& v : out.values) v /= total;
    }
    return out;
}

} // namespace vbench
