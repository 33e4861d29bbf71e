// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include <png.h>

#include <cstring>

#include "recap/frame_io.hpp"

namespace recap {

RgbImage read_png(const std::filesystem::path& path) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str()))
        throw RecordingError("cannot read " + path.string() + ": " + img.message);
    img.format = PNG_FORMAT_RGB;
    RgbImage image(static_cast<int>(img.width), static_cast<int>(img.height));
    auto bytes = image.bytes();
    if (!png_image_finish_read(&img, nullptr, bytes.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw RecordingError("cannot decode " + path.string() + ": " + msg);
    }
    return image;
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width());
    img.height = static_cast<png_uint_32>(image.height());
    img.format = PNG_FORMAT_RGB;
#ifdef PNG_IMAGE_FLAG_FAST
    img.flags = PNG_IMAGE_FLAG_FAST;
#endif
    if (!png_image_write_to_file(&img, path.c_str(), 0, image.bytes().data(), 0, nullptr))
        throw RecordingError("cannot write " + path.string() + ": " + img.message);
}

}  // namespace recap
