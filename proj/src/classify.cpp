#include "eigencoin/classify.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "eigencoin/error.hpp"

namespace eigencoin {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::EigenCoin: return "eigencoin";
    case Method::Bdpca: return "bdpca";
    case Method::Wavelet: return "wavelet";
    case Method::Harris: return "harris";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "eigencoin") return Method::EigenCoin;
  if (name == "bdpca") return Method::Bdpca;
  if (name == "wavelet") return Method::Wavelet;
  if (name == "harris") return Method::Harris;
  throw InvalidParameter("unknown method '" + std::string(name) +
                         "' (expected eigencoin, bdpca, wavelet or harris)");
}

DistanceKind ClassifierConfig::resolved_distance() const {
  if (distance) return *distance;
  return method == Method::Bdpca ? DistanceKind::Amd : DistanceKind::Bhattacharyya;
}

void ClassifierConfig::validate() const {
  if (const auto* e = std::get_if<EnergyFraction>(&selection)) {
    if (!(e->value > 0.0 && e->value <= 1.0)) {
      throw InvalidParameter("energy_fraction must lie in (0,1]");
    }
  }
  if (method == Method::Wavelet && (level < 1 || level > kMaxWaveletLevel)) {
    throw InvalidParameter("wavelet level must be in 1..4");
  }
  if (method == Method::Bdpca && (k_r == 0 || k_c == 0)) {
    throw InvalidParameter("bdpca k_r and k_c must be >= 1");
  }
  if (method == Method::Harris) harris.validate();
  if (resolved_distance() == DistanceKind::Amd && method != Method::Bdpca) {
    throw InvalidParameter("the amd distance needs matrix features (method bdpca)");
  }
  if (!(amd_p >= 1.0) || !std::isfinite(amd_p)) throw InvalidParameter("amd_p must be >= 1");
  if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon))) {
    throw InvalidParameter("epsilon must be a positive finite number");
  }
  if (std::isnan(threshold) || threshold < 0.0) {
    throw InvalidParameter("threshold must be >= 0 or inf");
  }
}

Eigen::VectorXd flatten(const FeatureMatrix& m) {
  Eigen::VectorXd v(m.size());
  Eigen::Index i = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) v(i++) = m(r, c);
  }
  return v;
}

FeatureMatrix unflatten(const Eigen::VectorXd& v, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(v.size()) != rows * cols) {
    throw DimensionError("unflatten: vector length does not match " + std::to_string(rows) +
                         "x" + std::to_string(cols));
  }
  FeatureMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::Index i = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = v(i++);
  }
  return m;
}

ClassifierModel::ClassifierModel(ClassifierConfig config, PreprocessConfig preprocess,
                                 std::vector<std::string> class_names, Trained trained,
                                 std::vector<Eigen::VectorXd> gallery,
                                 std::vector<std::size_t> labels, Eigen::VectorXd spectrum,
                                 double epsilon, std::vector<std::size_t> corner_counts)
    : config_(std::move(config)),
      preprocess_(preprocess),
      class_names_(std::move(class_names)),
      trained_(std::move(trained)),
      gallery_(std::move(gallery)),
      labels_(std::move(labels)),
      spectrum_(std::move(spectrum)),
      epsilon_(epsilon),
      corner_counts_(std::move(corner_counts)) {
  config_.validate();
  if (gallery_.empty()) throw InvalidParameter("ClassifierModel: empty gallery");
  if (labels_.size() != gallery_.size()) {
    throw DimensionError("ClassifierModel: gallery and label counts differ");
  }
  const std::size_t len = feature_length();
  for (std::size_t i = 0; i < gallery_.size(); ++i) {
    if (static_cast<std::size_t>(gallery_[i].size()) != len) {
      throw DimensionError("ClassifierModel: gallery feature " + std::to_string(i) +
                           " has length " + std::to_string(gallery_[i].size()) +
                           ", expected " + std::to_string(len));
    }
    if (labels_[i] >= class_names_.size()) {
      throw InvalidParameter("ClassifierModel: label out of range");
    }
  }
  if (static_cast<std::size_t>(spectrum_.size()) != len) {
    throw DimensionError("ClassifierModel: spectrum length does not match features");
  }
  cov_ = config_.cov == CovKind::SharedSpectrum ? CovModel::shared_spectrum(spectrum_, epsilon_)
                                                : CovModel::per_vector_diagonal(epsilon_);
}

std::size_t ClassifierModel::feature_length() const noexcept {
  switch (config_.method) {
    case Method::EigenCoin: {
      const Manifold* m = manifold();
      return m ? m->components() : 0;
    }
    case Method::Bdpca: {
      const BdpcaModel* b = bdpca();
      return b ? b->k_r() * b->k_c() : 0;
    }
    case Method::Wavelet: return wavelet_feature_length(config_.level);
    case Method::Harris: return config_.harris.top_count;
  }
  return 0;
}

Eigen::VectorXd ClassifierModel::extract_feature(const GrayImage& normalized) const {
  switch (config_.method) {
    case Method::EigenCoin: {
      const Manifold& m = *manifold();
      const auto px = normalized.pixels();
      return project(m, Eigen::Map<const Eigen::VectorXd>(px.data(), static_cast<Eigen::Index>(px.size())));
    }
    case Method::Bdpca: return flatten(bdpca_features(*bdpca(), normalized));
    case Method::Wavelet: return wavelet_features(normalized, config_.level).values;
    case Method::Harris: return harris_features(normalized, config_.harris).values;
  }
  throw InvariantViolation("extract_feature: unknown method");
}

double ClassifierModel::distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  switch (config_.resolved_distance()) {
    case DistanceKind::Bhattacharyya: return bhattacharyya(a, b, cov_);
    case DistanceKind::Euclidean: return euclidean(a, b);
    case DistanceKind::Amd: {
      const BdpcaModel& m = *bdpca();
      return amd(unflatten(a, m.k_r(), m.k_c()), unflatten(b, m.k_r(), m.k_c()), config_.amd_p);
    }
  }
  throw InvariantViolation("distance: unknown distance kind");
}

ClassifierModel ClassifierModel::with_threshold(double threshold) const {
  ClassifierModel copy = *this;
  copy.config_.threshold = threshold;
  copy.config_.validate();
  return copy;
}

std::vector<Sample> preprocess_samples(std::span<const Sample> raw, const PreprocessConfig& cfg) {
  std::vector<Sample> out;
  out.reserve(raw.size());
  for (const Sample& s : raw) out.push_back({extract_roi(s.image, cfg), s.label});
  return out;
}

namespace {

void check_training_set(std::span<const Sample> train, const std::vector<std::string>& names) {
  if (names.empty()) throw InvalidDataset("no classes");
  std::vector<std::size_t> per_class(names.size(), 0);
  for (const Sample& s : train) {
    if (s.label >= names.size()) throw InvalidDataset("training label out of range");
    ++per_class[s.label];
  }
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (per_class[k] == 0) {
      throw InvalidDataset("class '" + names[k] + "' has no training images");
    }
  }
  const std::size_t h = train.front().image.height();
  const std::size_t w = train.front().image.width();
  for (const Sample& s : train) {
    if (s.image.height() != h || s.image.width() != w) {
      throw InvalidDataset("training images differ in size; preprocess them first");
    }
  }
}

/// Population variance of every coordinate across the gallery.
Eigen::VectorXd gallery_variance(const std::vector<Eigen::VectorXd>& gallery) {
  const Eigen::Index d = gallery.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& g : gallery) mean += g;
  mean /= static_cast<double>(gallery.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (const auto& g : gallery) var += (g - mean).cwiseAbs2();
  return var / static_cast<double>(gallery.size());
}

std::vector<ImageVector> vectorize(std::span<const Sample> samples) {
  std::vector<ImageVector> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    const auto px = s.image.pixels();
    out.emplace_back(Eigen::Map<const Eigen::VectorXd>(px.data(), static_cast<Eigen::Index>(px.size())));
  }
  return out;
}

}  // namespace

ClassifierModel fit_with_manifold(Manifold manifold, std::span<const Sample> train,
                                  std::vector<std::string> class_names,
                                  const ClassifierConfig& cfg, const PreprocessConfig& preprocess) {
  cfg.validate();
  if (cfg.method != Method::EigenCoin) {
    throw InvalidParameter("fit_with_manifold: method must be eigencoin");
  }
  if (train.empty()) throw InvalidDataset("empty training set");
  check_training_set(train, class_names);
  std::vector<Eigen::VectorXd> gallery;
  std::vector<std::size_t> labels;
  for (const ImageVector& x : vectorize(train)) gallery.push_back(project(manifold, x));
  for (const Sample& s : train) labels.push_back(s.label);
  Eigen::VectorXd spectrum = manifold.eigenvalues();
  const double eps = cfg.epsilon.value_or(default_epsilon(spectrum));
  return ClassifierModel(cfg, preprocess, std::move(class_names), std::move(manifold),
                         std::move(gallery), std::move(labels), std::move(spectrum), eps);
}

ClassifierModel fit_normalized(std::span<const Sample> train, std::vector<std::string> class_names,
                               const ClassifierConfig& cfg, const PreprocessConfig& preprocess) {
  cfg.validate();
  if (train.empty()) throw InvalidDataset("empty training set");
  check_training_set(train, class_names);

  if (cfg.method == Method::EigenCoin) {
    const std::vector<ImageVector> vecs = vectorize(train);
    return fit_with_manifold(build_manifold(vecs, cfg.selection), train, std::move(class_names),
                             cfg, preprocess);
  }

  ClassifierModel::Trained trained;
  std::vector<Eigen::VectorXd> gallery;
  std::vector<std::size_t> corner_counts;
  if (cfg.method == Method::Bdpca) {
    std::vector<GrayImage> images;
    for (const Sample& s : train) images.push_back(s.image);
    BdpcaModel model = bdpca_train(images, cfg.k_r, cfg.k_c);
    for (const GrayImage& img : images) gallery.push_back(flatten(bdpca_features(model, img)));
    trained = std::move(model);
  } else if (cfg.method == Method::Wavelet) {
    for (const Sample& s : train) gallery.push_back(wavelet_features(s.image, cfg.level).values);
  } else {
    for (const Sample& s : train) {
      HarrisFeature f = harris_features(s.image, cfg.harris);
      gallery.push_back(std::move(f.values));
      corner_counts.push_back(f.corner_count);
    }
  }
  std::vector<std::size_t> labels;
  for (const Sample& s : train) labels.push_back(s.label);
  Eigen::VectorXd spectrum = gallery_variance(gallery);
  const double eps = cfg.epsilon.value_or(default_epsilon(spectrum));
  return ClassifierModel(cfg, preprocess, std::move(class_names), std::move(trained),
                         std::move(gallery), std::move(labels), std::move(spectrum), eps,
                         std::move(corner_counts));
}

ClassifierModel fit(const LabeledDataset& ds, const ClassifierConfig& cfg,
                    const PreprocessConfig& preprocess) {
  const std::vector<Sample> raw = ds.samples(Split::Train);
  return fit_normalized(preprocess_samples(raw, preprocess), ds.class_names(), cfg, preprocess);
}

Prediction predict_feature(const ClassifierModel& model, const Eigen::VectorXd& feature) {
  if (static_cast<std::size_t>(feature.size()) != model.feature_length()) {
    throw DimensionError("predict: feature length does not match the model");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> class_min(model.class_count(), kInf);
  std::vector<bool> present(model.class_count(), false);
  const auto& gallery = model.gallery();
  const auto& labels = model.labels();
  for (std::size_t i = 0; i < gallery.size(); ++i) {
    const double d = model.distance(feature, gallery[i]);
    if (std::isnan(d)) throw PredictionFailure("distance", "distance evaluated to NaN");
    present[labels[i]] = true;
    class_min[labels[i]] = std::min(class_min[labels[i]], d);
  }
  // Lowest class id wins ties.
  std::size_t best = model.class_count();
  for (std::size_t k = 0; k < class_min.size(); ++k) {
    if (!present[k]) continue;
    if (best == model.class_count() || class_min[k] < class_min[best]) best = k;
  }
  Prediction p;
  p.distance = class_min[best];
  for (std::size_t k = 0; k < class_min.size(); ++k) {
    if (k == best || !present[k]) continue;
    if (!p.runner_up || class_min[k] < *p.runner_up) p.runner_up = class_min[k];
  }
  if (p.distance < model.config().threshold) p.label = best;
  return p;
}

Prediction predict_normalized(const ClassifierModel& model, const GrayImage& normalized) {
  Eigen::VectorXd feature;
  try {
    feature = model.extract_feature(normalized);
  } catch (const PredictionFailure&) {
    throw;
  } catch (const Error& e) {
    throw PredictionFailure("feature", std::string("feature extraction failed: ") + e.what());
  }
  return predict_feature(model, feature);
}

Prediction predict(const ClassifierModel& model, const GrayImage& img) {
  GrayImage normalized;
  try {
    normalized = extract_roi(img, model.preprocess());
  } catch (const SegmentationFailure& e) {
    throw PredictionFailure("preprocess:" + e.stage(), e.what());
  }
  return predict_normalized(model, normalized);
}

std::vector<BatchItem> predict_batch(const ClassifierModel& model, std::span<const GrayImage> images,
                                     std::size_t threads) {
  std::vector<BatchItem> out(images.size());
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < images.size(); i += stride) {
      try {
        out[i].prediction = predict(model, images[i]);
      } catch (const PredictionFailure& e) {
        out[i].error = e.what();
        out[i].stage = e.stage();
      } catch (const Error& e) {
        out[i].error = e.what();
        out[i].stage = to_string(e.kind());
      }
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(images.size(), 1));
  if (threads == 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  pool.clear();
  return out;
}

}  // namespace eigencoin
