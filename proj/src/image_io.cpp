#include "eigencoin/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "eigencoin/error.hpp"

namespace eigencoin {

GrayImage read_image(const std::filesystem::path& path) {
  cv::Mat raw;
  try {
    raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw LoadError("cannot decode " + path.string() + ": " + e.what());
  }
  if (raw.empty()) {
    throw LoadError("cannot read image " + path.string());
  }
  if (raw.depth() != CV_8U) {
    throw LoadError("unsupported bit depth in " + path.string() + " (expected 8-bit)");
  }
  const auto h = static_cast<std::size_t>(raw.rows);
  const auto w = static_cast<std::size_t>(raw.cols);
  const int channels = raw.channels();
  if (channels == 1) {
    std::vector<double> px(h * w);
    for (int r = 0; r < raw.rows; ++r) {
      const auto* row = raw.ptr<unsigned char>(r);
      for (int c = 0; c < raw.cols; ++c) {
        px[static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c)] = row[c] / 255.0;
      }
    }
    return GrayImage(h, w, std::move(px));
  }
  if (channels != 3 && channels != 4) {
    throw LoadError("unsupported channel count in " + path.string());
  }
  // OpenCV stores color as BGR(A); repack as RGB.
  std::vector<unsigned char> rgb(h * w * 3);
  for (int r = 0; r < raw.rows; ++r) {
    const auto* row = raw.ptr<unsigned char>(r);
    for (int c = 0; c < raw.cols; ++c) {
      const std::size_t o = (static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c)) * 3;
      const auto* px = row + static_cast<std::ptrdiff_t>(c) * channels;
      rgb[o] = px[2];
      rgb[o + 1] = px[1];
      rgb[o + 2] = px[0];
    }
  }
  return rgb_to_gray(h, w, rgb);
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
  cv::Mat out(static_cast<int>(img.height()), static_cast<int>(img.width()), CV_8UC1);
  for (std::size_t r = 0; r < img.height(); ++r) {
    auto* row = out.ptr<unsigned char>(static_cast<int>(r));
    for (std::size_t c = 0; c < img.width(); ++c) {
      row[c] = static_cast<unsigned char>(std::lround(std::clamp(img.at(r, c), 0.0, 1.0) * 255.0));
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), out);
  } catch (const cv::Exception& e) {
    throw LoadError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw LoadError("cannot write " + path.string());
}

bool has_image_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" ||
         ext == ".pgm" || ext == ".ppm" || ext == ".tif" || ext == ".tiff";
}

}  // namespace eigencoin
