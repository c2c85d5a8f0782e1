#pragma once

#include <string>

#include "lowlight/tensor.hpp"

namespace lowlight {

/// Loads an 8-bit PNG or JPEG (detected by magic bytes, not extension) into
/// [0,1] via division by 255. Color files come back with 3 channels,
/// grayscale files with 1. Alpha, if present, is composited onto black.
Image load_image(const std::string& path);

/// Writes an 8-bit raster (format chosen by extension: .png, .jpg, .jpeg).
/// Values are clamped to [0,1] and quantized round-to-nearest.
void save_image(const Image& img, const std::string& path);

}  // namespace lowlight
