#include "eigencoin/eigenspace.hpp"

#include <cmath>
#include <string>

#include "eigencoin/error.hpp"
#include "linalg.hpp"

namespace eigencoin {

namespace {

constexpr double kRankTolerance = 1e-12;

void check_same_length(std::span<const ImageVector> images, const char* where) {
  const Eigen::Index n = images.front().size();
  for (const ImageVector& x : images) {
    if (x.size() != n) {
      throw DimensionError(std::string(where) + ": image vectors have unequal lengths (" +
                           std::to_string(n) + " vs " + std::to_string(x.size()) + ")");
    }
  }
}

void check_dim(const Manifold& m, Eigen::Index n, const char* where) {
  if (static_cast<std::size_t>(n) != m.dim()) {
    throw DimensionError(std::string(where) + ": vector length " + std::to_string(n) +
                         " does not match manifold dimension " + std::to_string(m.dim()));
  }
}

}  // namespace

Manifold::Manifold(Eigen::VectorXd mean, Eigen::MatrixXd basis, Eigen::VectorXd eigenvalues,
                   std::size_t training_count, std::size_t rank, double total_energy)
    : mean_(std::move(mean)),
      basis_(std::move(basis)),
      eigenvalues_(std::move(eigenvalues)),
      training_count_(training_count),
      rank_(rank),
      total_energy_(total_energy) {
  if (basis_.rows() != mean_.size() || eigenvalues_.size() != basis_.cols()) {
    throw DimensionError("Manifold: inconsistent mean/basis/eigenvalue sizes");
  }
}

double Manifold::energy_fraction() const noexcept {
  if (total_energy_ <= 0.0) return components() == 0 ? 0.0 : 1.0;
  return eigenvalues_.sum() / total_energy_;
}

Manifold Manifold::truncated(std::size_t k) const {
  if (k > components()) {
    throw InvalidParameter("Manifold::truncated: k=" + std::to_string(k) + " exceeds K=" +
                           std::to_string(components()));
  }
  const auto kk = static_cast<Eigen::Index>(k);
  return Manifold(mean_, basis_.leftCols(kk), eigenvalues_.head(kk), training_count_, rank_,
                  total_energy_);
}

bool operator==(const Manifold& a, const Manifold& b) {
  return a.training_count_ == b.training_count_ && a.rank_ == b.rank_ &&
         a.total_energy_ == b.total_energy_ && a.mean_.size() == b.mean_.size() &&
         a.basis_.rows() == b.basis_.rows() && a.basis_.cols() == b.basis_.cols() &&
         a.eigenvalues_.size() == b.eigenvalues_.size() && a.mean_ == b.mean_ &&
         a.basis_ == b.basis_ && a.eigenvalues_ == b.eigenvalues_;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
  }
  if (v(arg) < 0.0) v = -v;
}

ImageVector mean_image(std::span<const ImageVector> images) {
  if (images.empty()) throw InvalidParameter("mean_image: empty image list");
  check_same_length(images, "mean_image");
  ImageVector sum = ImageVector::Zero(images.front().size());
  for (const ImageVector& x : images) sum += x;
  return sum / static_cast<double>(images.size());
}

Manifold build_manifold(std::span<const ImageVector> images, BasisSelection selection) {
  const std::size_t m = images.size();
  if (m < 2) {
    throw InvalidParameter("build_manifold: need at least 2 training images, got " +
                           std::to_string(m));
  }
  check_same_length(images, "build_manifold");
  const Eigen::Index n = images.front().size();
  const auto mi = static_cast<Eigen::Index>(m);

  const ImageVector mean = mean_image(images);
  // Columns are Phi_i / sqrt(M), so A A^T is the 1/M covariance.
  Eigen::MatrixXd centered(n, mi);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Eigen::Index i = 0; i < mi; ++i) {
    centered.col(i) = (images[static_cast<std::size_t>(i)] - mean) * scale;
  }
  const Eigen::MatrixXd gram = centered.transpose() * centered;
  detail::SortedEigen eig = detail::sorted_symmetric_eigen(gram);

  const double lead = std::max(eig.values(0), 0.0);
  for (Eigen::Index i = 0; i < mi; ++i) {
    if (eig.values(i) < -1e-10 * std::max(1.0, lead)) {
      throw InvariantViolation("build_manifold: Gram matrix has a negative eigenvalue");
    }
    eig.values(i) = std::max(eig.values(i), 0.0);
  }
  std::size_t rank = 0;
  if (lead > 0.0) {
    while (rank < m && eig.values(static_cast<Eigen::Index>(rank)) > kRankTolerance * lead) {
      ++rank;
    }
  }
  const double total = eig.values.sum();

  std::size_t k = 0;
  if (const auto* count = std::get_if<ComponentCount>(&selection)) {
    k = count->value;
    if (k > m - 1) {
      throw InvalidParameter("build_manifold: K=" + std::to_string(k) +
                             " exceeds M-1=" + std::to_string(m - 1));
    }
    if (k > rank) {
      throw InvalidParameter("build_manifold: K=" + std::to_string(k) +
                             " exceeds the numerical rank " + std::to_string(rank) +
                             " of the training scatter");
    }
  } else {
    const double e = std::get<EnergyFraction>(selection).value;
    if (!(e > 0.0 && e <= 1.0)) {
      throw InvalidParameter("build_manifold: energy fraction must lie in (0,1]");
    }
    double acc = 0.0;
    const double target = e * total * (1.0 - 1e-12);
    while (k < rank && acc < target) {
      acc += eig.values(static_cast<Eigen::Index>(k));
      ++k;
    }
  }

  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd basis(n, kk);
  for (Eigen::Index j = 0; j < kk; ++j) {
    // Lift the Gram eigenvector into image space: u = A v / sqrt(lambda).
    Eigen::VectorXd u = centered * eig.vectors.col(j) / std::sqrt(eig.values(j));
    // Two rounds of modified Gram-Schmidt against the accepted vectors.
    for (int round = 0; round < 2; ++round) {
      for (Eigen::Index p = 0; p < j; ++p) u -= basis.col(p).dot(u) * basis.col(p);
    }
    const double norm = u.norm();
    if (!(norm > 0.0)) throw InvariantViolation("build_manifold: degenerate eigenvector");
    u /= norm;
    fix_sign(u);
    basis.col(j) = u;
  }

  // lambda_k = (1/M) sum_n (u_k^T Phi_n)^2 on the final basis.
  Eigen::VectorXd eigenvalues(kk);
  if (kk > 0) eigenvalues = (centered.transpose() * basis).colwise().squaredNorm().transpose();
  return Manifold(mean, std::move(basis), std::move(eigenvalues), m, rank, total);
}

Coefficients project(const Manifold& m, const ImageVector& x) {
  check_dim(m, x.size(), "project");
  return m.basis().transpose() * (x - m.mean());
}

ImageVector reconstruct(const Manifold& m, const Coefficients& c) {
  if (static_cast<std::size_t>(c.size()) != m.components()) {
    throw DimensionError("reconstruct: coefficient length " + std::to_string(c.size()) +
                         " does not match K=" + std::to_string(m.components()));
  }
  return m.mean() + m.basis() * c;
}

double train_mse(const Manifold& m, std::span<const ImageVector> images) {
  if (images.empty()) throw InvalidParameter("train_mse: empty image list");
  double residual = 0.0;
  double spread = 0.0;
  for (const ImageVector& x : images) {
    check_dim(m, x.size(), "train_mse");
    const ImageVector xhat = reconstruct(m, project(m, x));
    residual += (x - xhat).squaredNorm();
    spread += (x - m.mean()).squaredNorm();
  }
  if (spread == 0.0) return 0.0;
  return residual / spread;
}

}  // namespace eigencoin
