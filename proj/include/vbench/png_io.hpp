#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <png.h>

#include "vbench/error.hpp"
#include "vbench/image.hpp"

namespace vbench {

// 8-bit PNG in, normalized chip out (v/255). Gray stays single channel;
// anything with color (incl. palette/alpha) is read as RGB.
inline ImageChip read_png(const std::string& path) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw IoError("read_png: cannot open " + path + ": " + image.message);

    const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    const int channels = gray ? 1 : 3;

    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        throw IoError("read_png: failed reading " + path + ": " + image.message);
    }

    std::vector<double> data(buffer.size());
    for (std::size_t i = 0; i < buffer.size(); ++i)
        data[i] = static_cast<double>(buffer[i]) / 255.0;
    return ImageChip::from_data(static_cast<int>(image.width), static_cast<int>(image.height),
                                channels, std::move(data));
}

// Quantizes round-half-up to 8 bits and writes gray or RGB PNG.
inline void write_png(const std::string& path, const ImageChip& img) {
    if (img.width() < 1 || img.height() < 1)
        throw std::invalid_argument("write_png: empty image");

    std::vector<std::uint8_t> buffer(img.data().size());
    for (std::size_t i = 0; i < buffer.size(); ++i) {
        double v = img.data()[i];
        v = std::min(1.0, std::max(0.0, v));
        buffer[i] = static_cast<std::uint8_t>(v * 255.0 + 0.5);
    }

    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;

    if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr))
        throw IoError("write_png: failed writing " + path + ": " + image.message);
}

} // namespace vbench
