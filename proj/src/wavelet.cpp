#include <cmath>
#include <string>

#include "eigencoin/baselines.hpp"
#include "eigencoin/error.hpp"

namespace eigencoin {

std::vector<Eigen::MatrixXd> haar_split(const Eigen::MatrixXd& x) {
  if (x.rows() % 2 != 0 || x.cols() % 2 != 0 || x.rows() == 0 || x.cols() == 0) {
    throw InvalidParameter("haar_split: dimensions must be even and positive");
  }
  const Eigen::Index h = x.rows() / 2;
  const Eigen::Index w = x.cols() / 2;
  std::vector<Eigen::MatrixXd> bands(4, Eigen::MatrixXd(h, w));
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      const double a = x(2 * r, 2 * c);
      const double b = x(2 * r, 2 * c + 1);
      const double cc = x(2 * r + 1, 2 * c);
      const double d = x(2 * r + 1, 2 * c + 1);
      bands[0](r, c) = 0.5 * (a + b + cc + d);
      bands[1](r, c) = 0.5 * (a + b - cc - d);
      bands[2](r, c) = 0.5 * (a - b + cc - d);
      bands[3](r, c) = 0.5 * (a - b - cc + d);
    }
  }
  return bands;
}

std::vector<Eigen::MatrixXd> wavelet_packet(const GrayImage& img, std::size_t level) {
  if (level < 1 || level > kMaxWaveletLevel) {
    throw InvalidParameter("wavelet_packet: level must be in 1.." +
                           std::to_string(kMaxWaveletLevel));
  }
  const std::size_t block = std::size_t{1} << level;
  if (img.height() % block != 0 || img.width() % block != 0) {
    throw InvalidParameter("wavelet_packet: image " + std::to_string(img.height()) + "x" +
                           std::to_string(img.width()) + " is not divisible by 2^" +
                           std::to_string(level));
  }
  std::vector<Eigen::MatrixXd> current{to_matrix(img)};
  for (std::size_t d = 0; d < level; ++d) {
    std::vector<Eigen::MatrixXd> next;
    next.reserve(current.size() * 4);
    for (const Eigen::MatrixXd& band : current) {
      for (Eigen::MatrixXd& child : haar_split(band)) next.push_back(std::move(child));
    }
    current = std::move(next);
  }
  return current;
}

namespace {

double population_std(const Eigen::MatrixXd& band) {
  const double mean = band.mean();
  return std::sqrt((band.array() - mean).square().mean());
}

}  // namespace

WaveletFeature wavelet_features(const GrayImage& img, std::size_t level) {
  const std::vector<Eigen::MatrixXd> bands = wavelet_packet(img, level);
  WaveletFeature f;
  f.level = level;
  f.values.resize(static_cast<Eigen::Index>(bands.size() + 1));
  f.values(0) = bands[0].mean();
  f.values(1) = population_std(bands[0]);
  for (std::size_t s = 1; s < bands.size(); ++s) {
    f.values(static_cast<Eigen::Index>(s + 1)) = population_std(bands[s]);
  }
  return f;
}

}  // namespace eigencoin
