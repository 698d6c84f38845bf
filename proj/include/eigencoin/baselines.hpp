#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "eigencoin/distances.hpp"
#include "eigencoin/imaging.hpp"

namespace eigencoin {

Eigen::MatrixXd to_matrix(const GrayImage& img);

// ---------------------------------------------------------------------------
// Bi-directional PCA

/// Row and column projectors learned from unvectorized training images.
struct BdpcaModel {
  Eigen::MatrixXd mean;             // h x w
  Eigen::MatrixXd row_projector;    // h x k_r, orthonormal columns
  Eigen::MatrixXd col_projector;    // w x k_c, orthonormal columns
  Eigen::VectorXd row_eigenvalues;  // leading k_r eigenvalues of the row scatter
  Eigen::VectorXd col_eigenvalues;  // leading k_c eigenvalues of the column scatter

  std::size_t height() const noexcept { return static_cast<std::size_t>(mean.rows()); }
  std::size_t width() const noexcept { return static_cast<std::size_t>(mean.cols()); }
  std::size_t k_r() const noexcept { return static_cast<std::size_t>(row_projector.cols()); }
  std::size_t k_c() const noexcept { return static_cast<std::size_t>(col_projector.cols()); }
};

/// Row scatter  S_r = 1/(M w) sum (X_i - Xbar)(X_i - Xbar)^T
/// column scatter S_c = 1/(M h) sum (X_i - Xbar)^T (X_i - Xbar)
Eigen::MatrixXd bdpca_row_scatter(std::span<const Eigen::MatrixXd> images, const Eigen::MatrixXd& mean);
Eigen::MatrixXd bdpca_col_scatter(std::span<const Eigen::MatrixXd> images, const Eigen::MatrixXd& mean);

BdpcaModel bdpca_train(std::span<const GrayImage> images, std::size_t k_r, std::size_t k_c);

/// Y = W_r^T (X - Xbar) W_c.
FeatureMatrix bdpca_features(const BdpcaModel& m, const GrayImage& img);

/// Xbar + W_r Y W_c^T; exact inverse of bdpca_features when both projectors
/// are complete.
Eigen::MatrixXd bdpca_reconstruct(const BdpcaModel& m, const FeatureMatrix& y);

// ---------------------------------------------------------------------------
// Haar wavelet packets

constexpr std::size_t kMaxWaveletLevel = 4;

struct WaveletFeature {
  std::size_t level = 0;
  Eigen::VectorXd values;  // 4^level + 1 entries
};

/// One orthonormal 2-D Haar analysis step: approximation, row-difference,
/// column-difference and diagonal subbands, each half size.
std::vector<Eigen::MatrixXd> haar_split(const Eigen::MatrixXd& x);

/// Full packet tree to depth `level`. Subband s at depth d has children
/// 4s..4s+3 at depth d+1; index 0 is the pure approximation.
std::vector<Eigen::MatrixXd> wavelet_packet(const GrayImage& img, std::size_t level);

/// [mean(approx), std(approx), std(subband 1), ..., std(subband 4^L - 1)],
/// population standard deviations.
WaveletFeature wavelet_features(const GrayImage& img, std::size_t level);

constexpr std::size_t wavelet_feature_length(std::size_t level) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < level; ++i) n *= 4;
  return n + 1;
}

// ---------------------------------------------------------------------------
// Harris corners

struct HarrisConfig {
  double k = 0.04;
  std::size_t window_radius = 2;  // Gaussian sigma = radius / 2
  double threshold_fraction = 0.01;
  std::size_t top_count = 128;

  void validate() const;
  friend bool operator==(const HarrisConfig&, const HarrisConfig&) = default;
};

struct Corner {
  std::size_t row = 0;
  std::size_t col = 0;
  double response = 0.0;
  double intensity = 0.0;
};

/// Harris response map R = det(M) - k trace(M)^2 from the Gaussian-smoothed
/// Sobel structure tensor.
Eigen::MatrixXd harris_response(const GrayImage& img, const HarrisConfig& cfg);

/// Local maxima of the response (3x3) above threshold_fraction * max(R),
/// strongest first; equal responses ordered by (row, col).
std::vector<Corner> harris_corners(const GrayImage& img, const HarrisConfig& cfg);

struct HarrisFeature {
  Eigen::VectorXd values;        // top_count intensities, zero padded
  std::size_t corner_count = 0;  // corners actually found
};

HarrisFeature harris_features(const GrayImage& img, const HarrisConfig& cfg);

}  // namespace eigencoin
