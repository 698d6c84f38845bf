#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "eigencoin/baselines.hpp"
#include "eigencoin/dataset.hpp"
#include "eigencoin/distances.hpp"
#include "eigencoin/eigenspace.hpp"
#include "eigencoin/imaging.hpp"

namespace eigencoin {

enum class Method { EigenCoin, Bdpca, Wavelet, Harris };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct ClassifierConfig {
  Method method = Method::EigenCoin;

  // EigenCoin
  BasisSelection selection = ComponentCount{112};
  // BDPCA
  std::size_t k_r = 15;
  std::size_t k_c = 35;
  // wavelet
  std::size_t level = 4;
  // Harris
  HarrisConfig harris;

  /// Unset means the method default: AMD for BDPCA, Bhattacharyya otherwise.
  std::optional<DistanceKind> distance;
  CovKind cov = CovKind::SharedSpectrum;
  /// Unset means default_epsilon() of the model's spectrum.
  std::optional<double> epsilon;
  double amd_p = 1.0;
  /// Queries whose nearest distance is >= threshold are rejected.
  double threshold = std::numeric_limits<double>::infinity();

  DistanceKind resolved_distance() const;
  void validate() const;
};

/// Nearest-neighbor decision. `label` is empty when the query was rejected.
struct Prediction {
  std::optional<std::size_t> label;
  double distance = 0.0;
  /// Nearest distance among gallery entries of other classes.
  std::optional<double> runner_up;

  bool rejected() const noexcept { return !label.has_value(); }
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// A fitted classifier: the method's trained model (if any) plus a gallery
/// holding one feature vector per training image.
class ClassifierModel {
public:
  using Trained = std::variant<std::monostate, Manifold, BdpcaModel>;

  ClassifierModel() = default;
  ClassifierModel(ClassifierConfig config, PreprocessConfig preprocess,
                  std::vector<std::string> class_names, Trained trained,
                  std::vector<Eigen::VectorXd> gallery, std::vector<std::size_t> labels,
                  Eigen::VectorXd spectrum, double epsilon,
                  std::vector<std::size_t> corner_counts = {});

  const ClassifierConfig& config() const noexcept { return config_; }
  const PreprocessConfig& preprocess() const noexcept { return preprocess_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  std::size_t class_count() const noexcept { return class_names_.size(); }
  const Trained& trained() const noexcept { return trained_; }
  const Manifold* manifold() const noexcept { return std::get_if<Manifold>(&trained_); }
  const BdpcaModel* bdpca() const noexcept { return std::get_if<BdpcaModel>(&trained_); }
  const std::vector<Eigen::VectorXd>& gallery() const noexcept { return gallery_; }
  const std::vector<std::size_t>& labels() const noexcept { return labels_; }
  /// Diagonal covariance used by the shared-spectrum Bhattacharyya model.
  const Eigen::VectorXd& spectrum() const noexcept { return spectrum_; }
  double epsilon() const noexcept { return epsilon_; }
  /// Harris only: corners found in each gallery image before padding.
  const std::vector<std::size_t>& corner_counts() const noexcept { return corner_counts_; }
  std::size_t feature_length() const noexcept;

  /// Feature vector of an already normalized image.
  Eigen::VectorXd extract_feature(const GrayImage& normalized) const;
  double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  /// Copy with a different rejection threshold.
  ClassifierModel with_threshold(double threshold) const;

private:
  ClassifierConfig config_;
  PreprocessConfig preprocess_;
  std::vector<std::string> class_names_;
  Trained trained_;
  std::vector<Eigen::VectorXd> gallery_;
  std::vector<std::size_t> labels_;
  Eigen::VectorXd spectrum_;
  double epsilon_ = 1e-6;
  CovModel cov_;
  std::vector<std::size_t> corner_counts_;
};

/// Row-major flattening of a BDPCA feature matrix and its inverse.
Eigen::VectorXd flatten(const FeatureMatrix& m);
FeatureMatrix unflatten(const Eigen::VectorXd& v, std::size_t rows, std::size_t cols);

/// Runs extract_roi on every image.
std::vector<Sample> preprocess_samples(std::span<const Sample> raw, const PreprocessConfig& cfg);

/// Trains on already normalized samples. Every class in `class_names` must
/// have at least one sample.
ClassifierModel fit_normalized(std::span<const Sample> train, std::vector<std::string> class_names,
                               const ClassifierConfig& cfg, const PreprocessConfig& preprocess);

/// EigenCoin model over an existing manifold (used by the eigenvector sweep).
ClassifierModel fit_with_manifold(Manifold manifold, std::span<const Sample> train,
                                  std::vector<std::string> class_names,
                                  const ClassifierConfig& cfg, const PreprocessConfig& preprocess);

/// Preprocesses and trains on the train split of `ds`.
ClassifierModel fit(const LabeledDataset& ds, const ClassifierConfig& cfg,
                    const PreprocessConfig& preprocess);

Prediction predict_feature(const ClassifierModel& model, const Eigen::VectorXd& feature);
Prediction predict_normalized(const ClassifierModel& model, const GrayImage& normalized);
/// Raw image in, decision out. Segmentation problems surface as
/// PredictionFailure naming the stage.
Prediction predict(const ClassifierModel& model, const GrayImage& img);

struct BatchItem {
  std::optional<Prediction> prediction;
  std::string error;  // empty on success
  std::string stage;

  bool ok() const noexcept { return prediction.has_value(); }
};

/// Element-wise predict. Items are split across `threads` workers; results
/// keep input order and do not depend on the thread count.
std::vector<BatchItem> predict_batch(const ClassifierModel& model, std::span<const GrayImage> images,
                                     std::size_t threads = 1);

}  // namespace eigencoin
