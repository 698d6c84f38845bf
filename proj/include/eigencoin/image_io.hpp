#pragma once

#include <filesystem>

#include "eigencoin/imaging.hpp"

namespace eigencoin {

/// Decodes an 8-bit grayscale or color raster (PNG, JPEG, ...). Color input
/// is reduced with 0.299/0.587/0.114 luminance weights. Throws LoadError.
GrayImage read_image(const std::filesystem::path& path);

/// Writes an 8-bit PNG; intensities are rounded to the nearest level.
void write_png(const std::filesystem::path& path, const GrayImage& img);

bool has_image_extension(const std::filesystem::path& path);

}  // namespace eigencoin
