#pragma once

// Slow reference implementations used only by tests. None of them share code
// with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eigencoin/imaging.hpp"
#include "eigencoin/random.hpp"

namespace oracle {

struct Eigen_ {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns match values
};

/// Cyclic Jacobi rotations on a symmetric matrix.
inline Eigen_ jacobi_eigen(Eigen::MatrixXd a, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });
  Eigen_ out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Population covariance of the columns of `x` (features in rows).
inline Eigen::MatrixXd covariance(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows(), m = x.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < m; ++j) mean += x.col(j);
  mean /= static_cast<double>(m);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::VectorXd d = x.col(j) - mean;
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index s = 0; s < n; ++s) c(r, s) += d(r) * d(s);
  }
  return c / static_cast<double>(m);
}

/// Largest principal angle between the column spans of two orthonormal bases.
inline double max_principal_angle(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  const Eigen::MatrixXd g = u.transpose() * v;
  const Eigen_ e = jacobi_eigen(g.transpose() * g);
  const double smallest = std::clamp(e.values.minCoeff(), 0.0, 1.0);
  // sin^2 of the angle is 1 - cos^2; use it directly to keep precision.
  return std::asin(std::sqrt(std::max(0.0, 1.0 - smallest)));
}

/// Bhattacharyya distance between N(a, diag(sa)) and N(b, diag(sb)) with the
/// full closed form, accumulated per coordinate with plain logs.
inline double gaussian_bhattacharyya(const Eigen::VectorXd& a, const Eigen::VectorXd& sa,
                                     const Eigen::VectorXd& b, const Eigen::VectorXd& sb,
                                     double* log_term = nullptr) {
  double quad = 0.0;
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double s = 0.5 * (sa(i) + sb(i));
    const double d = a(i) - b(i);
    quad += d * d / s;
    logdet += std::log(s) - 0.5 * (std::log(sa(i)) + std::log(sb(i)));
  }
  if (log_term != nullptr) *log_term = 0.5 * logdet;
  return quad / 8.0 + 0.5 * logdet;
}

inline eigencoin::BinaryMask random_mask(eigencoin::Rng& rng, std::size_t h, std::size_t w, double p) {
  eigencoin::BinaryMask m(h, w);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) m.set(r, c, rng.uniform() < p);
  return m;
}

/// Breadth-first 8-connected labeling; components listed in raster order of
/// their first pixel, pixels in BFS order.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> flood_components(
    const eigencoin::BinaryMask& m) {
  const std::size_t h = m.height(), w = m.width();
  std::vector<int> seen(h * w, 0);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (!m.at(r, c) || seen[r * w + c]) continue;
      std::vector<std::pair<std::size_t, std::size_t>> comp;
      std::deque<std::pair<std::size_t, std::size_t>> q{{r, c}};
      seen[r * w + c] = 1;
      while (!q.empty()) {
        auto [y, x] = q.front();
        q.pop_front();
        comp.emplace_back(y, x);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const long ny = static_cast<long>(y) + dy, nx = static_cast<long>(x) + dx;
            if (ny < 0 || nx < 0 || ny >= static_cast<long>(h) || nx >= static_cast<long>(w)) continue;
            const auto uy = static_cast<std::size_t>(ny), ux = static_cast<std::size_t>(nx);
            if (m.at(uy, ux) && !seen[uy * w + ux]) {
              seen[uy * w + ux] = 1;
              q.emplace_back(uy, ux);
            }
          }
        }
      }
      out.push_back(std::move(comp));
    }
  }
  return out;
}

/// Output bit is the OR of the input over the line, out-of-range reads false.
inline eigencoin::BinaryMask brute_dilate(const eigencoin::BinaryMask& m, bool vertical, std::size_t length) {
  const long rad = static_cast<long>(length / 2);
  const long h = static_cast<long>(m.height()), w = static_cast<long>(m.width());
  eigencoin::BinaryMask out(m.height(), m.width());
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      bool any = false;
      for (long o = -rad; o <= rad; ++o) {
        const long y = vertical ? r + o : r;
        const long x = vertical ? c : c + o;
        if (y >= 0 && x >= 0 && y < h && x < w && m.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x))) any = true;
      }
      out.set(static_cast<std::size_t>(r), static_cast<std::size_t>(c), any);
    }
  }
  return out;
}

/// Background reachable from outside the frame (4-connected) stays clear;
/// everything else is set.
inline eigencoin::BinaryMask brute_fill(const eigencoin::BinaryMask& m) {
  const std::size_t h = m.height(), w = m.width();
  // Pad by one so the outside is a single region.
  std::vector<int> outside((h + 2) * (w + 2), 0);
  auto fg = [&](long y, long x) {
    if (y < 1 || x < 1 || y > static_cast<long>(h) || x > static_cast<long>(w)) return false;
    return m.at(static_cast<std::size_t>(y - 1), static_cast<std::size_t>(x - 1));
  };
  std::deque<std::pair<long, long>> q{{0, 0}};
  outside[0] = 1;
  const long W = static_cast<long>(w) + 2, H = static_cast<long>(h) + 2;
  while (!q.empty()) {
    auto [y, x] = q.front();
    q.pop_front();
    const long dy[4] = {-1, 1, 0, 0}, dx[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const long ny = y + dy[k], nx = x + dx[k];
      if (ny < 0 || nx < 0 || ny >= H || nx >= W) continue;
      if (outside[static_cast<std::size_t>(ny * W + nx)] || fg(ny, nx)) continue;
      outside[static_cast<std::size_t>(ny * W + nx)] = 1;
      q.emplace_back(ny, nx);
    }
  }
  eigencoin::BinaryMask out(h, w);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      out.set(r, c, outside[(r + 1) * static_cast<std::size_t>(W) + c + 1] == 0);
  return out;
}

/// Naive Sobel magnitude with clamped reads, before max normalization.
inline std::vector<double> sobel_raw(const eigencoin::GrayImage& img) {
  const long h = static_cast<long>(img.height()), w = static_cast<long>(img.width());
  auto px = [&](long r, long c) {
    r = std::clamp(r, 0L, h - 1);
    c = std::clamp(c, 0L, w - 1);
    return img.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  };
  const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  std::vector<double> out;
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      double gx = 0, gy = 0;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          gx += kx[i][j] * px(r + i - 1, c + j - 1);
          gy += kx[j][i] * px(r + i - 1, c + j - 1);
        }
      }
      out.push_back(std::hypot(gx, gy));
    }
  }
  return out;
}

/// Bilinear sample at pixel-center-aligned coordinates, written out longhand.
inline double bilinear_at(const eigencoin::GrayImage& img, std::size_t oh, std::size_t ow,
                          std::size_t r, std::size_t c) {
  const double sy = (static_cast<double>(r) + 0.5) * static_cast<double>(img.height()) / static_cast<double>(oh) - 0.5;
  const double sx = (static_cast<double>(c) + 0.5) * static_cast<double>(img.width()) / static_cast<double>(ow) - 0.5;
  const double y = std::clamp(sy, 0.0, static_cast<double>(img.height() - 1));
  const double x = std::clamp(sx, 0.0, static_cast<double>(img.width() - 1));
  const auto y0 = static_cast<std::size_t>(std::floor(y));
  const auto x0 = static_cast<std::size_t>(std::floor(x));
  const std::size_t y1 = std::min(y0 + 1, img.height() - 1);
  const std::size_t x1 = std::min(x0 + 1, img.width() - 1);
  const double fy = y - static_cast<double>(y0), fx = x - static_cast<double>(x0);
  return (1 - fy) * ((1 - fx) * img.at(y0, x0) + fx * img.at(y0, x1)) +
         fy * ((1 - fx) * img.at(y1, x0) + fx * img.at(y1, x1));
}

inline eigencoin::GrayImage random_image(eigencoin::Rng& rng, std::size_t h, std::size_t w) {
  std::vector<double> px(h * w);
  for (double& v : px) v = rng.uniform();
  return eigencoin::GrayImage(h, w, std::move(px));
}

}  // namespace oracle
