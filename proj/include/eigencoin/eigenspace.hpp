#pragma once

#include <cstddef>
#include <span>
#include <variant>

#include <Eigen/Dense>

namespace eigencoin {

/// A vectorized (row-major flattened) normalized image.
using ImageVector = Eigen::VectorXd;
/// Weights of an image with respect to a manifold basis.
using Coefficients = Eigen::VectorXd;

struct ComponentCount {
  std::size_t value = 0;
};
struct EnergyFraction {
  double value = 1.0;
};
using BasisSelection = std::variant<ComponentCount, EnergyFraction>;

/// PCA subspace of a training set: mean image, orthonormal eigenvectors as
/// the columns of `basis()` in descending eigenvalue order, and the
/// eigenvalues themselves. Immutable once built.
class Manifold {
public:
  Manifold() = default;
  Manifold(Eigen::VectorXd mean, Eigen::MatrixXd basis, Eigen::VectorXd eigenvalues,
           std::size_t training_count, std::size_t rank, double total_energy);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  std::size_t components() const noexcept { return static_cast<std::size_t>(basis_.cols()); }
  std::size_t training_count() const noexcept { return training_count_; }
  /// Numerical rank of the training scatter.
  std::size_t rank() const noexcept { return rank_; }
  /// Trace of the training covariance (sum of all eigenvalues).
  double total_energy() const noexcept { return total_energy_; }
  /// Share of total_energy() captured by the retained eigenvalues.
  double energy_fraction() const noexcept;

  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

  /// Leading k eigenpairs. k == 0 is allowed (mean-only model).
  Manifold truncated(std::size_t k) const;

  friend bool operator==(const Manifold& a, const Manifold& b);

private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd eigenvalues_;
  std::size_t training_count_ = 0;
  std::size_t rank_ = 0;
  double total_energy_ = 0.0;
};

ImageVector mean_image(std::span<const ImageVector> images);

/// Builds the manifold through the M x M Gram matrix of the centered
/// samples. Covariance is normalized by 1/M. Eigenvalues below
/// 1e-12 * lambda_1 count as rank deficiency.
Manifold build_manifold(std::span<const ImageVector> images, BasisSelection selection);

Coefficients project(const Manifold& m, const ImageVector& x);
ImageVector reconstruct(const Manifold& m, const Coefficients& c);

/// Normalized training reconstruction error:
///   sum ||x_i - xhat_i||^2 / sum ||x_i - mean||^2   (0 when the denominator is 0).
double train_mse(const Manifold& m, std::span<const ImageVector> images);

/// Deterministic sign convention: the largest-magnitude entry (first on ties)
/// is made positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

}  // namespace eigencoin
