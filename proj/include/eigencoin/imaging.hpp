#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eigencoin {

/// Row-major grayscale raster with intensities in [0,1].
class GrayImage {
public:
  GrayImage() = default;
  GrayImage(std::size_t height, std::size_t width, double fill = 0.0);
  /// Takes ownership of `pixels`; throws if the size does not match or any
  /// value falls outside [0,1].
  GrayImage(std::size_t height, std::size_t width, std::vector<double> pixels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  double at(std::size_t r, std::size_t c) const { return pixels_[r * width_ + c]; }
  /// Unchecked write; callers keep values inside [0,1].
  void set(std::size_t r, std::size_t c, double v) { pixels_[r * width_ + c] = v; }

  std::span<const double> pixels() const noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> pixels_;
};

class BinaryMask {
public:
  BinaryMask() = default;
  BinaryMask(std::size_t height, std::size_t width, bool fill = false);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }

  bool at(std::size_t r, std::size_t c) const { return bits_[r * width_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { bits_[r * width_ + c] = v ? 1 : 0; }

  std::size_t count() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<unsigned char> bits_;
};

enum class LineOrientation { Vertical, Horizontal };

class StructuringElement {
public:
  /// `length` must be odd and >= 1.
  StructuringElement(LineOrientation orientation, std::size_t length);

  LineOrientation orientation() const noexcept { return orientation_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t radius() const noexcept { return length_ / 2; }

private:
  LineOrientation orientation_;
  std::size_t length_;
};

struct Pixel {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct BoundingBox {
  std::size_t row_min = 0, row_max = 0, col_min = 0, col_max = 0;
};

struct Component {
  int label = 0;
  std::vector<Pixel> pixels;
  std::size_t area = 0;
  BoundingBox bbox;
};

struct PreprocessConfig {
  double sobel_threshold = 0.2;
  std::size_t se_length = 3;
  std::size_t normalized_size = 64;

  void validate() const;
  friend bool operator==(const PreprocessConfig&, const PreprocessConfig&) = default;
};

/// Gradient magnitude from the 3x3 Sobel pair, replicate border, rescaled so
/// that the largest magnitude is 1.
GrayImage sobel_magnitude(const GrayImage& img);

/// Strict comparison: bit set iff pixel > t.
BinaryMask threshold(const GrayImage& img, double t);

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);

/// Fills every background region that is not 4-connected to the border.
BinaryMask fill_holes(const BinaryMask& mask);

/// 8-connected labeling. Labels are dense from 1 in raster order of each
/// component's first pixel.
std::vector<Component> connected_components(const BinaryMask& mask);

/// Bilinear resampling with pixel-center alignment.
GrayImage resize_bilinear(const GrayImage& img, std::size_t height, std::size_t width);

/// Luminance conversion for interleaved 8-bit RGB.
GrayImage rgb_to_gray(std::size_t height, std::size_t width, std::span<const unsigned char> rgb);

/// Isolates the coin: edges, closing by line dilations, hole filling, then
/// the largest 8-connected blob. The source is cropped to the blob's bounding
/// box, off-blob pixels are zeroed and the crop is resized to
/// normalized_size x normalized_size. Throws SegmentationFailure.
GrayImage extract_roi(const GrayImage& img, const PreprocessConfig& cfg);

}  // namespace eigencoin
