#include "eigencoin/distances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eigencoin/error.hpp"

namespace eigencoin {

namespace {

void check_pair(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const char* where) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(where) + ": length mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
}

}  // namespace

CovModel CovModel::shared_spectrum(Eigen::VectorXd spectrum, double epsilon) {
  CovModel m;
  m.kind = CovKind::SharedSpectrum;
  m.spectrum = std::move(spectrum);
  m.epsilon = epsilon;
  m.validate();
  return m;
}

CovModel CovModel::per_vector_diagonal(double epsilon) {
  CovModel m;
  m.kind = CovKind::PerVectorDiagonal;
  m.epsilon = epsilon;
  m.validate();
  return m;
}

void CovModel::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameter("CovModel: epsilon must be a positive finite number");
  }
  if (kind == CovKind::SharedSpectrum) {
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
      if (!(spectrum(i) >= 0.0) || !std::isfinite(spectrum(i))) {
        throw InvalidParameter("CovModel: spectrum entries must be finite and >= 0");
      }
    }
  }
}

double default_epsilon(const Eigen::VectorXd& spectrum) {
  const double top = spectrum.size() > 0 ? spectrum.maxCoeff() : 0.0;
  return 1e-6 * std::max(top, 1.0);
}

double bhattacharyya(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const CovModel& cov) {
  check_pair(a, b, "bhattacharyya");
  if (!a.allFinite() || !b.allFinite()) {
    throw InvalidParameter("bhattacharyya: non-finite input");
  }
  const double eps = cov.epsilon;
  if (cov.kind == CovKind::SharedSpectrum) {
    if (cov.spectrum.size() != a.size()) {
      throw DimensionError("bhattacharyya: spectrum length " +
                           std::to_string(cov.spectrum.size()) + " does not match features " +
                           std::to_string(a.size()));
    }
    double quad = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      const double d = a(k) - b(k);
      quad += d * d / (cov.spectrum(k) + eps);
    }
    return quad / 8.0;
  }

  double quad = 0.0;
  double logdet = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double d = a(k) - b(k);
    const double va = a(k) * a(k) + eps;
    const double vb = b(k) * b(k) + eps;
    const double pooled = 0.5 * (va + vb);
    quad += d * d / pooled;
    // ln(P / sqrt(va vb)) written as log1p((sa - sb)^2 / (2 sa sb)): never
    // negative and symmetric in (a, b).
    const double sa = std::sqrt(va);
    const double sb = std::sqrt(vb);
    const double gap = sa - sb;
    logdet += std::log1p(gap * gap / (2.0 * sa * sb));
  }
  return quad / 8.0 + 0.5 * logdet;
}

double euclidean(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  check_pair(a, b, "euclidean");
  return (a - b).norm();
}

double amd(const FeatureMatrix& a, const FeatureMatrix& b, double p) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("amd: shape mismatch (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
  }
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidParameter("amd: p must be >= 1");
  const Eigen::RowVectorXd col_sq = (a - b).colwise().squaredNorm();
  if (p == 2.0) return std::sqrt(col_sq.sum());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < col_sq.size(); ++j) acc += std::pow(col_sq(j), p / 2.0);
  return std::pow(acc, 1.0 / p);
}

std::string_view to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::Bhattacharyya: return "bhattacharyya";
    case DistanceKind::Euclidean: return "euclidean";
    case DistanceKind::Amd: return "amd";
  }
  return "?";
}

std::string_view to_string(CovKind kind) {
  return kind == CovKind::SharedSpectrum ? "shared_spectrum" : "per_vector_diag";
}

DistanceKind parse_distance_kind(std::string_view name) {
  if (name == "bhattacharyya") return DistanceKind::Bhattacharyya;
  if (name == "euclidean") return DistanceKind::Euclidean;
  if (name == "amd") return DistanceKind::Amd;
  throw InvalidParameter("unknown distance '" + std::string(name) + "'");
}

CovKind parse_cov_kind(std::string_view name) {
  if (name == "shared_spectrum") return CovKind::SharedSpectrum;
  if (name == "per_vector_diag") return CovKind::PerVectorDiagonal;
  throw InvalidParameter("unknown cov_model '" + std::string(name) + "'");
}

}  // namespace eigencoin
