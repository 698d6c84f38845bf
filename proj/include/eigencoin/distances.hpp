#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace eigencoin {

/// Row/column-projected BDPCA feature, k_r x k_c.
using FeatureMatrix = Eigen::MatrixXd;

enum class CovKind { SharedSpectrum, PerVectorDiagonal };

/// Covariance assigned to each feature vector when it is treated as a
/// Gaussian centered at itself.
///
/// SharedSpectrum: every vector gets diag(spectrum + epsilon). The log-det
/// term of the Bhattacharyya distance vanishes and the distance reduces to
/// 1/8 of a squared Mahalanobis distance.
///
/// PerVectorDiagonal: vector v gets diag(v^2 + epsilon).
struct CovModel {
  CovKind kind = CovKind::SharedSpectrum;
  double epsilon = 1e-6;
  Eigen::VectorXd spectrum;

  static CovModel shared_spectrum(Eigen::VectorXd spectrum, double epsilon);
  static CovModel per_vector_diagonal(double epsilon);

  void validate() const;
};

/// 1e-6 * max(max(spectrum), 1).
double default_epsilon(const Eigen::VectorXd& spectrum);

double bhattacharyya(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const CovModel& cov);

double euclidean(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Assembled matrix distance: column-wise Euclidean norms of (a - b) combined
/// with a p-norm. p == 2 gives the Frobenius norm.
double amd(const FeatureMatrix& a, const FeatureMatrix& b, double p);

enum class DistanceKind { Bhattacharyya, Euclidean, Amd };

std::string_view to_string(DistanceKind kind);
std::string_view to_string(CovKind kind);
DistanceKind parse_distance_kind(std::string_view name);
CovKind parse_cov_kind(std::string_view name);

}  // namespace eigencoin
