#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "vbench/image.hpp"

namespace vbench {

struct Histogram {
    int bin_count = 256;
    std::vector<std::uint64_t> counts;
    int channel = 0;

    std::uint64_t total() const {
        return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    }
};

// Intensity v falls into bin floor(v*(bins-1)+0.5): round-half-up on the
// quantized grid, so bin b represents intensity b/(bins-1).
inline int intensity_bin(double v, int bins) {
    int b = static_cast<int>(std::floor(static_cast<double>(v) * (bins - 1) + 0.5));
    return std::min(std::max(b, 0), bins - 1);
}

inline Histogram compute_histogram(const ImageChip& img, int channel = 0, int bins = 256) {
    if (channel < 0 || channel >= img.channels())
        throw std::invalid_argument("compute_histogram: channel out of range");
    if (bins < 2)
        throw std::invalid_argument("compute_histogram: bins must be >= 2");
    Histogram h;
    h.bin_count = bins;
    h.channel = channel;
    h.counts.assign(bins, 0);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            ++h.counts[intensity_bin(img.at(x, y, channel), bins)];
    return h;
}

// Flat target: equal mass in every bin. Specifying to this histogram is
// histogram equalization.
inline Histogram uniform_histogram(int bins = 256, std::uint64_t mass_per_bin = 1) {
    Histogram h;
    h.bin_count = bins;
    h.counts.assign(bins, mass_per_bin);
    return h;
}

namespace detail {

// Bin-to-bin CDF matching. Comparisons use exact integer cross products so
// equal mass fractions match regardless of the two totals.
inline std::vector<int> specification_map(const Histogram& source, const Histogram& target) {
    const int bins = source.bin_count;
    std::vector<std::uint64_t> cum_s(bins), cum_t(bins);
    std::uint64_t acc = 0;
    for (int i = 0; i < bins; ++i) cum_s[i] = (acc += source.counts[i]);
    acc = 0;
    for (int i = 0; i < bins; ++i) cum_t[i] = (acc += target.counts[i]);
    const std::uint64_t total_s = cum_s[bins - 1];
    const std::uint64_t total_t = cum_t[bins - 1];

    std::vector<int> map(bins);
    int t = 0;
    for (int s = 0; s < bins; ++s) {
        // smallest t with CDF_T(t) >= CDF_S(s);  cum_t/total_t >= cum_s/total_s
        while (t < bins - 1 && static_cast<unsigned __int128>(cum_t[t]) * total_s <
                                   static_cast<unsigned __int128>(cum_s[s]) * total_t)
            ++t;
        map[s] = t;
    }
    return map;
}

} // namespace detail

// Standard CDF matching: each intensity maps to the smallest target intensity
// whose normalized target CDF reaches the source CDF. 3-channel images are
// specified per channel against the same target shape.
inline ImageChip histogram_specification(const ImageChip& img, const Histogram& target) {
    if (target.counts.empty() || target.total() == 0)
        throw std::invalid_argument("histogram_specification: empty target histogram");
    if (target.bin_count != static_cast<int>(target.counts.size()))
        throw std::invalid_argument("histogram_specification: inconsistent target bin count");

    const int bins = target.bin_count;
    ImageChip out(img.width(), img.height(), img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        Histogram source = compute_histogram(img, c, bins);
        std::vector<int> map = detail::specification_map(source, target);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) {
                int b = map[intensity_bin(img.at(x, y, c), bins)];
                out.at(x, y, c) = static_cast<float>(static_cast<double>(b) / (bins - 1));
            }
    }
    return out;
}

} // namespace vbench
