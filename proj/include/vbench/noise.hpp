#pragma once

#include <cmath>
#include <cstdint>

#include "vbench/rng.hpp"

namespace vbench {

// Lattice value noise with smoothstep interpolation, hashed per (seed, cell).
inline double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
    std::uint64_t h = mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(ix)) ^
                            static_cast<std::uint64_t>(iy));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline double value_noise(std::uint64_t seed, double x, double y) {
    double fx = std::floor(x), fy = std::floor(y);
    auto x0 = static_cast<std::int64_t>(fx);
    auto y0 = static_cast<std::int64_t>(fy);
    double tx = x - fx, ty = y - fy;
    tx = tx * tx * (3.0 - 2.0 * tx);
    ty = ty * ty * (3.0 - 2.0 * ty);
    double v00 = lattice_value(seed, x0, y0);
    double v10 = lattice_value(seed, x0 + 1, y0);
    double v01 = lattice_value(seed, x0, y0 + 1);
    double v11 = lattice_value(seed, x0 + 1, y0 + 1);
    return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
}

// Multi-octave value noise in [0,1).
inline double fbm(std::uint64_t seed, double x, double y, int octaves,
                  double lacunarity = 2.0, double gain = 0.5) {
    double sum = 0.0, amp = 1.0, freq = 1.0, norm = 0.0;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise(mix64(seed + static_cast<std::uint64_t>(o)), x * freq, y * freq);
        norm += amp;
        amp *= gain;
        freq *= lacunarity;
    }
    return sum / norm;
}

} // namespace vbench
