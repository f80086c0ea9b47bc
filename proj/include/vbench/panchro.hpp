#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "vbench/image.hpp"

namespace vbench {

// Free constants of the pseudo-panchromatic pipeline. The rendered RGB is
// reshaped toward a single broad-band response: blue energy is scaled down,
// red/green get power-law stretches, then a weighted grayscale conversion.
struct PanchroParams {
    double blue_gain = 0.6;
    double red_gamma = 0.9;
    double green_gamma = 1.1;
    std::array<double, 3> luma_weights{0.299, 0.587, 0.114};

    void validate() const {
        if (blue_gain < 0.0 || blue_gain > 1.0)
            throw std::invalid_argument("PanchroParams: blue_gain outside [0,1]");
        if (red_gamma <= 0.0 || green_gamma <= 0.0)
            throw std::invalid_argument("PanchroParams: gamma must be positive");
        double sum = 0.0;
        for (double w : luma_weights) {
            if (w < 0.0) throw std::invalid_argument("PanchroParams: negative luma weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("PanchroParams: luma weights must sum to 1");
    }
};

// Pixel-local pipeline, fixed order: (1) scale blue by blue_gain,
// (2) per-pixel power law on red and green, (3) luma-weighted grayscale,
// (4) clamp to [0,1].
inline ImageChip panchromatic_simulate(const ImageChip& img, const PanchroParams& params) {
    if (img.channels() != 3)
        throw std::invalid_argument("panchromatic_simulate: 3-channel input required");
    params.validate();

    ImageChip out(img.width(), img.height(), 1);
    const std::size_t n = img.pixel_count();
    const double* src = img.data().data();
    double* dst = out.data().data();
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::pow(static_cast<double>(src[3 * i]), params.red_gamma);
        double g = std::pow(static_cast<double>(src[3 * i + 1]), params.green_gamma);
        double b = static_cast<double>(src[3 * i + 2]) * params.blue_gain;
        double v = params.luma_weights[0] * r + params.luma_weights[1] * g + params.luma_weights[2] * b;
        dst[i] = clamp01(v);
    }
    return out;
}

} // namespace vbench
