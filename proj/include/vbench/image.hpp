#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vbench/error.hpp"
#include "vbench/rng.hpp"

namespace vbench {

// Row-major raster of normalized intensities in [0,1], 1 or 3 channels.
// Immutable by convention once built: every operation below returns a new
// chip, so values are safe to share read-only across worker threads.
class ImageChip {
public:
    ImageChip() = default;

    ImageChip(int width, int height, int channels, double fill = 0.0)
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<std::size_t>(width) * height * channels, fill) {
        check_shape();
    }

    static ImageChip from_data(int width, int height, int channels, std::vector<double> data) {
        ImageChip img;
        img.width_ = width;
        img.height_ = height;
        img.channels_ = channels;
        img.data_ = std::move(data);
        img.check_shape();
        if (img.data_.size() != static_cast<std::size_t>(width) * height * channels)
            throw std::invalid_argument("ImageChip: data length does not match width*height*channels");
        return img;
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const { return data_.empty(); }

    double at(int x, int y, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    double& at(int x, int y, int c = 0) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    // Full invariant check, including the [0,1] range. O(n); used by loaders
    // and tests rather than on every construction.
    void validate() const {
        check_shape();
        if (data_.size() != static_cast<std::size_t>(width_) * height_ * channels_)
            throw std::invalid_argument("ImageChip: bad data length");
        for (double v : data_)
            if (!(v >= 0.0f && v <= 1.0f))
                throw std::invalid_argument("ImageChip: intensity outside [0,1]");
    }

    // Content hash over shape and raw intensity bytes.
    std::uint64_t content_hash() const {
        std::uint64_t h = fnv1a(&width_, sizeof width_);
        h = fnv1a(&height_, sizeof height_, h);
        h = fnv1a(&channels_, sizeof channels_, h);
        return fnv1a(data_.data(), data_.size() * sizeof(double), h);
    }

private:
    void check_shape() const {
        if (width_ < 0 || height_ < 0)
            throw std::invalid_argument("ImageChip: negative dimensions");
        if (channels_ != 1 && channels_ != 3)
            throw std::invalid_argument("ImageChip: channels must be 1 or 3");
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<double> data_;
};

inline double clamp01(double v) {
    return std::min(1.0, std::max(0.0, v));
}

// Weighted channel mix. Weights must be non-negative and sum to 1.
inline ImageChip to_grayscale(const ImageChip& img, const std::array<double, 3>& weights) {
    if (img.channels() != 3)
        throw std::invalid_argument("to_grayscale: input must have 3 channels");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("to_grayscale: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("to_grayscale: weights must sum to 1");

    ImageChip out(img.width(), img.height(), 1);
    const std::size_t n = img.pixel_count();
    const double* src = img.data().data();
    double* dst = out.data().data();
    for (std::size_t i = 0; i < n; ++i) {
        double v = weights[0] * src[3 * i] + weights[1] * src[3 * i + 1] + weights[2] * src[3 * i + 2];
        dst[i] = clamp01(v);
    }
    return out;
}

// Exact pixel copy of a rectangle that must lie fully inside the image.
inline ImageChip crop(const ImageChip& img, int x, int y, int w, int h) {
    if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > img.width() || y + h > img.height())
        throw std::invalid_argument("crop: rectangle outside image bounds");
    ImageChip out(w, h, img.channels());
    for (int yy = 0; yy < h; ++yy)
        for (int xx = 0; xx < w; ++xx)
            for (int c = 0; c < img.channels(); ++c)
                out.at(xx, yy, c) = img.at(x + xx, y + yy, c);
    return out;
}

namespace detail {

// Bilinear sample with edge clamping. Pixel centers sit at integer coords.
inline double sample_clamped(const ImageChip& img, double x, double y, int c) {
    const int w = img.width(), h = img.height();
    double cx = std::min(std::max(x, 0.0), static_cast<double>(w - 1));
    double cy = std::min(std::max(y, 0.0), static_cast<double>(h - 1));
    int x0 = static_cast<int>(std::floor(cx));
    int y0 = static_cast<int>(std::floor(cy));
    int x1 = std::min(x0 + 1, w - 1);
    int y1 = std::min(y0 + 1, h - 1);
    double fx = cx - x0, fy = cy - y0;
    double v00 = img.at(x0, y0, c), v10 = img.at(x1, y0, c);
    double v01 = img.at(x0, y1, c), v11 = img.at(x1, y1, c);
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

// Bilinear sample where out-of-bounds taps read as 0.
inline double sample_zero(const ImageChip& img, double x, double y, int c) {
    const int w = img.width(), h = img.height();
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double fx = x - x0, fy = y - y0;
    auto tap = [&](int xi, int yi) -> double {
        if (xi < 0 || yi < 0 || xi >= w || yi >= h) return 0.0;
        return img.at(xi, yi, c);
    };
    return (1 - fy) * ((1 - fx) * tap(x0, y0) + fx * tap(x0 + 1, y0)) +
           fy * ((1 - fx) * tap(x0, y0 + 1) + fx * tap(x0 + 1, y0 + 1));
}

} // namespace detail

// Align-corners bilinear resize; resize to identical dimensions is identity.
inline ImageChip resize_bilinear(const ImageChip& img, int w, int h) {
    if (w < 1 || h < 1)
        throw std::invalid_argument("resize_bilinear: target dimensions must be >= 1");
    if (w == img.width() && h == img.height())
        return img;
    ImageChip out(w, h, img.channels());
    const int sw = img.width(), sh = img.height();
    for (int y = 0; y < h; ++y) {
        double sy = (h == 1) ? (sh - 1) / 2.0 : static_cast<double>(y) * (sh - 1) / (h - 1);
        for (int x = 0; x < w; ++x) {
            double sx = (w == 1) ? (sw - 1) / 2.0 : static_cast<double>(x) * (sw - 1) / (w - 1);
            for (int c = 0; c < img.channels(); ++c)
                out.at(x, y, c) = clamp01(detail::sample_clamped(img, sx, sy, c));
        }
    }
    return out;
}

// Rotation about the image center. Image coordinates: x right, y down, and
// angles measured from the +x axis toward +y, matching atan2(y, x) on this
// grid. Content at direction theta lands at theta+angle. Out-of-bounds
// source samples read as 0; output keeps the input dimensions.
inline ImageChip rotate_bilinear(const ImageChip& img, double angle) {
    ImageChip out(img.width(), img.height(), img.channels());
    const double cx = (img.width() - 1) / 2.0;
    const double cy = (img.height() - 1) / 2.0;
    const double ca = std::cos(angle), sa = std::sin(angle);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double dx = x - cx, dy = y - cy;
            // inverse rotation of the output pixel into source space
            double sx = cx + ca * dx + sa * dy;
            double sy = cy - sa * dx + ca * dy;
            for (int c = 0; c < img.channels(); ++c)
                out.at(x, y, c) = clamp01(detail::sample_zero(img, sx, sy, c));
        }
    }
    return out;
}

// Principal-axis angle from intensity-weighted second central moments:
// theta = 0.5*atan2(2*mu11, mu20 - mu02), in (-pi/2, pi/2].
inline double estimate_orientation(const ImageChip& img) {
    if (img.channels() != 1)
        throw std::invalid_argument("estimate_orientation: single-channel input required");
    const int w = img.width(), h = img.height();
    double mass = 0.0, mx = 0.0, my = 0.0;
    double lo = 1.0, hi = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = img.at(x, y);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            mass += v;
            mx += v * x;
            my += v * y;
        }
    if (hi - lo < 1e-12f || mass <= 0.0)
        throw DegenerateOrientationError("estimate_orientation: constant image");
    mx /= mass;
    my /= mass;
    double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = img.at(x, y);
            double dx = x - mx, dy = y - my;
            mu20 += v * dx * dx;
            mu02 += v * dy * dy;
            mu11 += v * dx * dy;
        }
    const double a = 2.0 * mu11, b = mu20 - mu02;
    const double scale = mu20 + mu02;
    if (std::abs(a) < 1e-9 * scale && std::abs(b) < 1e-9 * scale)
        throw DegenerateOrientationError("estimate_orientation: no dominant axis");
    double theta = 0.5 * std::atan2(a, b);
    if (theta <= -M_PI / 2) theta += M_PI; // boundary convention: +pi/2
    return theta;
}

inline ImageChip flip_horizontal(const ImageChip& img) {
    ImageChip out(img.width(), img.height(), img.channels());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c)
                out.at(x, y, c) = img.at(img.width() - 1 - x, y, c);
    return out;
}

// Intensity-weighted skewness of the x coordinate; used to pick a canonical
// left/right flip after rotation so mirrored chips compare like-for-like.
inline double x_mass_skew(const ImageChip& img) {
    const int w = img.width(), h = img.height();
    double mass = 0.0, mx = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            mass += img.at(x, y);
            mx += static_cast<double>(img.at(x, y)) * x;
        }
    if (mass <= 0.0) return 0.0;
    mx /= mass;
    double m3 = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double d = x - mx;
            m3 += img.at(x, y) * d * d * d;
        }
    return m3 / mass;
}

// Rotate the dominant axis to horizontal and flip so the heavy end points
// the same way on every chip. Chips with no usable orientation are returned
// unchanged.
inline ImageChip align_chip(const ImageChip& img) {
    ImageChip aligned;
    try {
        double theta = estimate_orientation(img);
        aligned = rotate_bilinear(img, -theta);
    } catch (const DegenerateOrientationError&) {
        return img;
    }
    if (x_mass_skew(aligned) < 0.0)
        aligned = flip_horizontal(aligned);
    return aligned;
}

} // namespace vbench
