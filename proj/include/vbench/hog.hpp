#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vbench/feature.hpp"
#include "vbench/image.hpp"

namespace vbench {

struct HogParams {
    int cell_size = 8;
    int block_cells = 2;  // cells per block side
    int block_stride = 1; // in cells
    int bin_count = 9;
    bool signed_orientation = false; // false: 0-180 degrees
    double clip = 0.2;               // L2-Hys clip value

    void validate() const {
        if (cell_size < 1 || block_cells < 1 || block_stride < 1)
            throw std::invalid_argument("HogParams: sizes must be positive");
        if (bin_count < 2)
            throw std::invalid_argument("HogParams: bin_count must be >= 2");
        if (clip <= 0.0 || clip > 1.0)
            throw std::invalid_argument("HogParams: clip must be in (0,1]");
    }
};

struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> magnitude;
    std::vector<double> orientation; // radians, [0,pi) unsigned / [0,2pi) signed

    double mag(int x, int y) const { return magnitude[static_cast<std::size_t>(y) * width + x]; }
    double ori(int x, int y) const { return orientation[static_cast<std::size_t>(y) * width + x]; }
};

// Centered differences [-1,0,1]/2 with edge replication.
inline GradientField gradients(const ImageChip& img, bool signed_orientation = false) {
    if (img.channels() != 1)
        throw std::invalid_argument("gradients: single-channel input required");
    if (img.width() < 3 || img.height() < 3)
        throw std::invalid_argument("gradients: image smaller than 3x3");
    GradientField f;
    f.width = img.width();
    f.height = img.height();
    f.magnitude.resize(img.pixel_count());
    f.orientation.resize(img.pixel_count());
    const int w = img.width(), h = img.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx = (img.at(std::min(x + 1, w - 1), y) - img.at(std::max(x - 1, 0), y)) * 0.5;
            double gy = (img.at(x, std::min(y + 1, h - 1)) - img.at(x, std::max(y - 1, 0))) * 0.5;
            double mag = std::sqrt(gx * gx + gy * gy);
            double ori = 0.0;
            if (mag > 0.0) {
                ori = std::atan2(gy, gx); // (-pi, pi]
                if (signed_orientation) {
                    if (ori < 0) ori += 2 * M_PI;
                } else {
                    if (ori < 0) ori += M_PI;
                    if (ori >= M_PI) ori -= M_PI; // fold to [0, pi)
                }
            }
            std::size_t i = static_cast<std::size_t>(y) * w + x;
            f.magnitude[i] = mag;
            f.orientation[i] = ori;
        }
    }
    return f;
}

struct CellGrid {
    int cells_x = 0;
    int cells_y = 0;
    int bins = 0;
    std::vector<double> hist; // row-major cells, bins contiguous

    double* cell(int cx, int cy) { return hist.data() + (static_cast<std::size_t>(cy) * cells_x + cx) * bins; }
    const double* cell(int cx, int cy) const {
        return hist.data() + (static_cast<std::size_t>(cy) * cells_x + cx) * bins;
    }
};

// Each pixel votes its magnitude into the two nearest orientation bins,
// split linearly by angular distance to the bin centers. Bin k is centered
// at (k+0.5)*bin_width and the bins wrap.
inline CellGrid cell_histograms(const GradientField& grad, const HogParams& params) {
    params.validate();
    if (grad.width % params.cell_size != 0 || grad.height % params.cell_size != 0)
        throw std::invalid_argument("cell_histograms: dimensions not divisible by cell_size");

    CellGrid grid;
    grid.cells_x = grad.width / params.cell_size;
    grid.cells_y = grad.height / params.cell_size;
    grid.bins = params.bin_count;
    grid.hist.assign(static_cast<std::size_t>(grid.cells_x) * grid.cells_y * grid.bins, 0.0);

    const double period = params.signed_orientation ? 2 * M_PI : M_PI;
    const double bin_width = period / params.bin_count;
    for (int y = 0; y < grad.height; ++y) {
        for (int x = 0; x < grad.width; ++x) {
            double m = grad.mag(x, y);
            if (m == 0.0) continue;
            double u = grad.ori(x, y) / bin_width - 0.5;
            int k0 = static_cast<int>(std::floor(u));
            double frac = u - k0;
            int lo = ((k0 % params.bin_count) + params.bin_count) % params.bin_count;
            int hi = (lo + 1) % params.bin_count;
            double* cell = grid.cell(x / params.cell_size, y / params.cell_size);
            cell[lo] += m * (1.0 - frac);
            cell[hi] += m * frac;
        }
    }
    return grid;
}

// Sliding block_cells x block_cells blocks at block_stride; per block:
// L2 normalize (epsilon in the denominator), clip, renormalize, concatenate
// row-major.
inline FeatureVector block_normalize(const CellGrid& cells, const HogParams& params) {
    params.validate();
    if (cells.cells_x < params.block_cells || cells.cells_y < params.block_cells)
        throw std::invalid_argument("block_normalize: cell grid smaller than one block");

    constexpr double kEps = 1e-6;
    const int nbx = (cells.cells_x - params.block_cells) / params.block_stride + 1;
    const int nby = (cells.cells_y - params.block_cells) / params.block_stride + 1;
    const int block_dim = params.block_cells * params.block_cells * params.bin_count;

    FeatureVector out;
    out.extractor = "hog";
    out.values.reserve(static_cast<std::size_t>(nbx) * nby * block_dim);
    std::vector<double> block(block_dim);
    for (int by = 0; by < nby; ++by) {
        for (int bx = 0; bx < nbx; ++bx) {
            int k = 0;
            for (int cy = 0; cy < params.block_cells; ++cy)
                for (int cx = 0; cx < params.block_cells; ++cx) {
                    const double* cell =
                        cells.cell(bx * params.block_stride + cx, by * params.block_stride + cy);
                    for (int b = 0; b < params.bin_count; ++b) block[k++] = cell[b];
                }
            double norm = 0.0;
            for (double v : block) norm += v * v;
            norm = std::sqrt(norm) + kEps;
            for (double& v : block) v = std::min(v / norm, params.clip);
            norm = 0.0;
            for (double v : block) norm += v * v;
            norm = std::sqrt(norm) + kEps;
            for (double v : block) out.values.push_back(v / norm);
        }
    }
    return out;
}

inline int hog_dimension(int width, int height, const HogParams& params) {
    const int cx = width / params.cell_size, cy = height / params.cell_size;
    const int nbx = (cx - params.block_cells) / params.block_stride + 1;
    const int nby = (cy - params.block_cells) / params.block_stride + 1;
    return nbx * nby * params.block_cells * params.block_cells * params.bin_count;
}

inline FeatureVector hog_descriptor(const ImageChip& img, const HogParams& params = {}) {
    return block_normalize(cell_histograms(gradients(img, params.signed_orientation), params), params);
}

} // namespace vbench
