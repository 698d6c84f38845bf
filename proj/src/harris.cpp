#include <algorithm>
#include <cmath>

#include "eigencoin/baselines.hpp"
#include "eigencoin/error.hpp"

namespace eigencoin {

void HarrisConfig::validate() const {
  if (!(k > 0.0 && k < 0.25)) throw InvalidParameter("harris: k must lie in (0, 0.25)");
  if (window_radius < 1) throw InvalidParameter("harris: window radius must be >= 1");
  if (!(threshold_fraction >= 0.0 && threshold_fraction < 1.0)) {
    throw InvalidParameter("harris: threshold fraction must lie in [0, 1)");
  }
  if (top_count < 1) throw InvalidParameter("harris: top_count must be >= 1");
}

namespace {

Eigen::Index clamp_index(Eigen::Index i, Eigen::Index n) {
  return std::clamp<Eigen::Index>(i, 0, n - 1);
}

Eigen::MatrixXd smooth(const Eigen::MatrixXd& x, const std::vector<double>& kernel) {
  const auto rad = static_cast<Eigen::Index>(kernel.size() / 2);
  const Eigen::Index h = x.rows();
  const Eigen::Index w = x.cols();
  Eigen::MatrixXd tmp(h, w);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      double acc = 0.0;
      for (Eigen::Index d = -rad; d <= rad; ++d) {
        acc += kernel[static_cast<std::size_t>(d + rad)] * x(r, clamp_index(c + d, w));
      }
      tmp(r, c) = acc;
    }
  }
  Eigen::MatrixXd out(h, w);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      double acc = 0.0;
      for (Eigen::Index d = -rad; d <= rad; ++d) {
        acc += kernel[static_cast<std::size_t>(d + rad)] * tmp(clamp_index(r + d, h), c);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd harris_response(const GrayImage& img, const HarrisConfig& cfg) {
  cfg.validate();
  const Eigen::MatrixXd x = to_matrix(img);
  const Eigen::Index h = x.rows();
  const Eigen::Index w = x.cols();
  Eigen::MatrixXd ixx(h, w), iyy(h, w), ixy(h, w);
  for (Eigen::Index r = 0; r < h; ++r) {
    const Eigen::Index ru = clamp_index(r - 1, h);
    const Eigen::Index rd = clamp_index(r + 1, h);
    for (Eigen::Index c = 0; c < w; ++c) {
      const Eigen::Index cl = clamp_index(c - 1, w);
      const Eigen::Index cr = clamp_index(c + 1, w);
      const double gx = (x(ru, cr) + 2.0 * x(r, cr) + x(rd, cr)) -
                        (x(ru, cl) + 2.0 * x(r, cl) + x(rd, cl));
      const double gy = (x(rd, cl) + 2.0 * x(rd, c) + x(rd, cr)) -
                        (x(ru, cl) + 2.0 * x(ru, c) + x(ru, cr));
      ixx(r, c) = gx * gx;
      iyy(r, c) = gy * gy;
      ixy(r, c) = gx * gy;
    }
  }

  const double sigma = static_cast<double>(cfg.window_radius) / 2.0;
  std::vector<double> kernel(2 * cfg.window_radius + 1);
  double norm = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(cfg.window_radius);
    kernel[i] = std::exp(-0.5 * d * d / (sigma * sigma));
    norm += kernel[i];
  }
  for (double& v : kernel) v /= norm;

  const Eigen::MatrixXd sxx = smooth(ixx, kernel);
  const Eigen::MatrixXd syy = smooth(iyy, kernel);
  const Eigen::MatrixXd sxy = smooth(ixy, kernel);
  const Eigen::MatrixXd trace = sxx + syy;
  return (sxx.cwiseProduct(syy) - sxy.cwiseProduct(sxy)) - cfg.k * trace.cwiseProduct(trace);
}

std::vector<Corner> harris_corners(const GrayImage& img, const HarrisConfig& cfg) {
  const Eigen::MatrixXd resp = harris_response(img, cfg);
  const Eigen::Index h = resp.rows();
  const Eigen::Index w = resp.cols();
  const double peak = resp.maxCoeff();
  std::vector<Corner> corners;
  if (!(peak > 0.0)) return corners;
  const double floor = cfg.threshold_fraction * peak;

  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      const double v = resp(r, c);
      if (!(v > floor) || v <= 0.0) continue;
      // On a plateau only the first pixel in raster order survives.
      bool is_max = true;
      for (Eigen::Index dr = -1; dr <= 1 && is_max; ++dr) {
        for (Eigen::Index dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const Eigen::Index rr = r + dr;
          const Eigen::Index cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
          const bool earlier = dr < 0 || (dr == 0 && dc < 0);
          if (resp(rr, cc) > v || (earlier && resp(rr, cc) == v)) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      corners.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), v,
                         img.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c))});
    }
  }
  std::stable_sort(corners.begin(), corners.end(), [](const Corner& a, const Corner& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });
  return corners;
}

HarrisFeature harris_features(const GrayImage& img, const HarrisConfig& cfg) {
  const std::vector<Corner> corners = harris_corners(img, cfg);
  HarrisFeature f;
  f.corner_count = corners.size();
  f.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.top_count));
  const std::size_t n = std::min(cfg.top_count, corners.size());
  for (std::size_t i = 0; i < n; ++i) f.values(static_cast<Eigen::Index>(i)) = corners[i].intensity;
  return f;
}

}  // namespace eigencoin
