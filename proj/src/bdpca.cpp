#include <string>

#include "eigencoin/baselines.hpp"
#include "eigencoin/eigenspace.hpp"
#include "eigencoin/error.hpp"
#include "linalg.hpp"

namespace eigencoin {

Eigen::MatrixXd to_matrix(const GrayImage& img) {
  const auto h = static_cast<Eigen::Index>(img.height());
  const auto w = static_cast<Eigen::Index>(img.width());
  Eigen::MatrixXd out(h, w);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      out(r, c) = img.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
  }
  return out;
}

Eigen::MatrixXd bdpca_row_scatter(std::span<const Eigen::MatrixXd> images,
                                  const Eigen::MatrixXd& mean) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(mean.rows(), mean.rows());
  for (const Eigen::MatrixXd& x : images) {
    const Eigen::MatrixXd d = x - mean;
    s.noalias() += d * d.transpose();
  }
  return s / static_cast<double>(images.size() * static_cast<std::size_t>(mean.cols()));
}

Eigen::MatrixXd bdpca_col_scatter(std::span<const Eigen::MatrixXd> images,
                                  const Eigen::MatrixXd& mean) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(mean.cols(), mean.cols());
  for (const Eigen::MatrixXd& x : images) {
    const Eigen::MatrixXd d = x - mean;
    s.noalias() += d.transpose() * d;
  }
  return s / static_cast<double>(images.size() * static_cast<std::size_t>(mean.rows()));
}

namespace {

void leading_eigenvectors(const Eigen::MatrixXd& scatter, std::size_t k, Eigen::MatrixXd& vectors,
                          Eigen::VectorXd& values) {
  detail::SortedEigen eig = detail::sorted_symmetric_eigen(scatter);
  const auto kk = static_cast<Eigen::Index>(k);
  vectors = eig.vectors.leftCols(kk);
  values = eig.values.head(kk).cwiseMax(0.0);
  for (Eigen::Index j = 0; j < kk; ++j) fix_sign(vectors.col(j));
}

}  // namespace

BdpcaModel bdpca_train(std::span<const GrayImage> images, std::size_t k_r, std::size_t k_c) {
  if (images.size() < 2) {
    throw InvalidParameter("bdpca_train: need at least 2 training images");
  }
  const std::size_t h = images.front().height();
  const std::size_t w = images.front().width();
  for (const GrayImage& img : images) {
    if (img.height() != h || img.width() != w) {
      throw InvalidParameter("bdpca_train: training images differ in size");
    }
  }
  if (k_r == 0 || k_r > h || k_c == 0 || k_c > w) {
    throw InvalidParameter("bdpca_train: need 1 <= k_r <= " + std::to_string(h) +
                           " and 1 <= k_c <= " + std::to_string(w) + ", got k_r=" +
                           std::to_string(k_r) + " k_c=" + std::to_string(k_c));
  }
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(images.size());
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h),
                                               static_cast<Eigen::Index>(w));
  for (const GrayImage& img : images) {
    mats.push_back(to_matrix(img));
    mean += mats.back();
  }
  mean /= static_cast<double>(images.size());

  BdpcaModel model;
  model.mean = mean;
  leading_eigenvectors(bdpca_row_scatter(mats, mean), k_r, model.row_projector,
                       model.row_eigenvalues);
  leading_eigenvectors(bdpca_col_scatter(mats, mean), k_c, model.col_projector,
                       model.col_eigenvalues);
  return model;
}

FeatureMatrix bdpca_features(const BdpcaModel& m, const GrayImage& img) {
  if (img.height() != m.height() || img.width() != m.width()) {
    throw DimensionError("bdpca_features: image is " + std::to_string(img.height()) + "x" +
                         std::to_string(img.width()) + ", model expects " +
                         std::to_string(m.height()) + "x" + std::to_string(m.width()));
  }
  return m.row_projector.transpose() * (to_matrix(img) - m.mean) * m.col_projector;
}

Eigen::MatrixXd bdpca_reconstruct(const BdpcaModel& m, const FeatureMatrix& y) {
  if (static_cast<std::size_t>(y.rows()) != m.k_r() ||
      static_cast<std::size_t>(y.cols()) != m.k_c()) {
    throw DimensionError("bdpca_reconstruct: feature shape does not match model");
  }
  return m.mean + m.row_projector * y * m.col_projector.transpose();
}

}  // namespace eigencoin
