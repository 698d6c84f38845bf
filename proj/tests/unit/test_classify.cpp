#include <doctest.h>

#include <cmath>
#include <limits>

#include "eigencoin/classify.hpp"
#include "eigencoin/error.hpp"
#include "oracles.hpp"

using namespace eigencoin;

namespace {

/// Three well separated clusters of 16x16 images.
std::vector<Sample> clusters(Rng& rng, std::size_t per_class, double spread) {
  std::vector<GrayImage> centers;
  for (int k = 0; k < 3; ++k) centers.push_back(oracle::random_image(rng, 16, 16));
  std::vector<Sample> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<double> px(centers[k].pixels().begin(), centers[k].pixels().end());
      for (double& v : px) v = std::clamp(v + spread * rng.normal(), 0.0, 1.0);
      out.push_back({GrayImage(16, 16, std::move(px)), k});
    }
  }
  return out;
}

ClassifierConfig config_for(Method m) {
  ClassifierConfig cfg;
  cfg.method = m;
  cfg.selection = ComponentCount{6};
  cfg.k_r = 4;
  cfg.k_c = 4;
  cfg.level = 2;
  cfg.harris.top_count = 16;
  return cfg;
}

const std::vector<std::string> kNames{"a", "b", "c"};

}  // namespace

TEST_CASE("flatten is row-major and inverts unflatten") {
  FeatureMatrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const Eigen::VectorXd v = flatten(m);
  CHECK(v(1) == 2);
  CHECK(v(3) == 4);
  CHECK(unflatten(v, 2, 3) == m);
  CHECK_THROWS_AS(unflatten(v, 4, 2), DimensionError);
}

TEST_CASE("config validation") {
  ClassifierConfig cfg;
  cfg.distance = DistanceKind::Amd;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg.method = Method::Bdpca;
  CHECK_NOTHROW(cfg.validate());
  cfg.amd_p = 0.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  ClassifierConfig w = config_for(Method::Wavelet);
  w.level = 5;
  CHECK_THROWS_AS(w.validate(), InvalidParameter);
  ClassifierConfig t;
  t.threshold = -1;
  CHECK_THROWS_AS(t.validate(), InvalidParameter);
  CHECK(ClassifierConfig{}.resolved_distance() == DistanceKind::Bhattacharyya);
  CHECK(config_for(Method::Bdpca).resolved_distance() == DistanceKind::Amd);
  for (Method m : {Method::EigenCoin, Method::Bdpca, Method::Wavelet, Method::Harris}) CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("sift"), InvalidParameter);
}

TEST_CASE("every method classifies separated clusters and retrieves its own gallery") {
  Rng rng(1);
  const auto train = clusters(rng, 6, 0.03);
  const auto test = clusters(rng, 0, 0.03);
  for (Method m : {Method::EigenCoin, Method::Bdpca, Method::Wavelet, Method::Harris}) {
    CAPTURE(to_string(m));
    const ClassifierModel model = fit_normalized(train, kNames, config_for(m), PreprocessConfig{});
    CHECK(model.gallery().size() == train.size());
    for (const Sample& s : train) {
      const Prediction p = predict_normalized(model, s.image);
      REQUIRE_FALSE(p.rejected());
      CHECK(*p.label == s.label);
      CHECK(p.distance < 1e-9);
      REQUIRE(p.runner_up.has_value());
      CHECK(*p.runner_up >= p.distance);
    }
  }
}

TEST_CASE("prediction picks the nearest class with lowest id on ties") {
  const ClassifierConfig cfg = [] {
    ClassifierConfig c;
    c.method = Method::Wavelet;
    c.level = 1;
    c.distance = DistanceKind::Euclidean;
    return c;
  }();
  std::vector<Eigen::VectorXd> gallery(3, Eigen::VectorXd::Zero(5));
  gallery[0](0) = 1.0;
  gallery[1](0) = -1.0;
  gallery[2](0) = 3.0;
  const ClassifierModel model(cfg, PreprocessConfig{}, {"x", "y", "z"}, std::monostate{}, gallery, {0, 1, 2},
                              Eigen::VectorXd::Ones(5), 1e-6);
  const Prediction tie = predict_feature(model, Eigen::VectorXd::Zero(5));
  CHECK(*tie.label == 0);
  CHECK(tie.distance == doctest::Approx(1.0));
  CHECK(*tie.runner_up == doctest::Approx(1.0));
  Eigen::VectorXd q = Eigen::VectorXd::Zero(5);
  q(0) = 2.2;
  const Prediction p = predict_feature(model, q);
  CHECK(*p.label == 2);
  CHECK(*p.runner_up == doctest::Approx(1.2));
  CHECK_THROWS_AS(predict_feature(model, Eigen::VectorXd::Zero(4)), DimensionError);
}

TEST_CASE("threshold rejects at or beyond the limit") {
  ClassifierConfig cfg;
  cfg.method = Method::Wavelet;
  cfg.level = 1;
  cfg.distance = DistanceKind::Euclidean;
  std::vector<Eigen::VectorXd> gallery{Eigen::VectorXd::Zero(5)};
  const ClassifierModel open(cfg, PreprocessConfig{}, {"x"}, std::monostate{}, gallery, {0}, Eigen::VectorXd::Ones(5), 1e-6);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(5);
  q(1) = 2.0;
  CHECK_FALSE(predict_feature(open, q).rejected());
  CHECK(predict_feature(open.with_threshold(2.0), q).rejected());
  CHECK_FALSE(predict_feature(open.with_threshold(2.5), q).rejected());
  CHECK(predict_feature(open.with_threshold(2.0), q).distance == doctest::Approx(2.0));
}

TEST_CASE("model construction checks consistency") {
  ClassifierConfig cfg;
  cfg.method = Method::Wavelet;
  cfg.level = 1;
  std::vector<Eigen::VectorXd> gallery{Eigen::VectorXd::Zero(5)};
  CHECK_THROWS_AS(ClassifierModel(cfg, {}, {"x"}, std::monostate{}, gallery, {0, 0}, Eigen::VectorXd::Ones(5), 1e-6), DimensionError);
  CHECK_THROWS_AS(ClassifierModel(cfg, {}, {"x"}, std::monostate{}, gallery, {1}, Eigen::VectorXd::Ones(5), 1e-6), InvalidParameter);
  CHECK_THROWS_AS(ClassifierModel(cfg, {}, {"x"}, std::monostate{}, {Eigen::VectorXd::Zero(4)}, {0}, Eigen::VectorXd::Ones(5), 1e-6), DimensionError);
  CHECK_THROWS_AS(ClassifierModel(cfg, {}, {"x"}, std::monostate{}, {}, {}, Eigen::VectorXd::Ones(5), 1e-6), InvalidParameter);
}

TEST_CASE("training rejects classes without images and mixed sizes") {
  Rng rng(2);
  auto train = clusters(rng, 3, 0.02);
  CHECK_THROWS_AS(fit_normalized(train, {"a", "b", "c", "d"}, config_for(Method::EigenCoin), {}), InvalidDataset);
  train.push_back({GrayImage(8, 8, 0.1), 0});
  CHECK_THROWS_AS(fit_normalized(train, kNames, config_for(Method::Wavelet), {}), InvalidDataset);
  CHECK_THROWS_AS(fit_normalized({}, kNames, config_for(Method::Wavelet), {}), InvalidDataset);
}

TEST_CASE("eigencoin spectrum is the manifold eigenvalues; others use gallery variance") {
  Rng rng(3);
  const auto train = clusters(rng, 4, 0.05);
  const ClassifierModel ec = fit_normalized(train, kNames, config_for(Method::EigenCoin), {});
  CHECK(ec.spectrum() == ec.manifold()->eigenvalues());
  // Projected coefficients are centered, so their variance is the eigenvalue.
  Eigen::VectorXd var = Eigen::VectorXd::Zero(6);
  for (const auto& g : ec.gallery()) var += g.cwiseAbs2() / static_cast<double>(ec.gallery().size());
  CHECK((var - ec.spectrum()).norm() < 1e-9 * ec.spectrum().norm());
  CHECK(ec.epsilon() == doctest::Approx(default_epsilon(ec.spectrum())));

  const ClassifierModel wv = fit_normalized(train, kNames, config_for(Method::Wavelet), {});
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(wv.feature_length());
  for (const auto& g : wv.gallery()) mean += g / static_cast<double>(wv.gallery().size());
  Eigen::VectorXd v2 = Eigen::VectorXd::Zero(wv.feature_length());
  for (const auto& g : wv.gallery()) v2 += (g - mean).cwiseAbs2() / static_cast<double>(wv.gallery().size());
  CHECK((v2 - wv.spectrum()).norm() < 1e-12);
}

TEST_CASE("batch prediction preserves order and isolates failures") {
  Rng rng(4);
  // Raw images: bright disks on dark background, plus one blank image.
  auto disk = [](double radius, double value) {
    GrayImage img(48, 48, 0.0);
    for (std::size_t r = 0; r < 48; ++r)
      for (std::size_t c = 0; c < 48; ++c)
        if (std::hypot(r - 24.0, c - 24.0) <= radius) img.set(r, c, value);
    return img;
  };
  std::vector<Sample> raw;
  for (int i = 0; i < 4; ++i) {
    raw.push_back({disk(14 + i, 0.4), 0});
    raw.push_back({disk(14 + i, 0.9), 1});
  }
  PreprocessConfig pre;
  pre.normalized_size = 16;
  ClassifierConfig cfg = config_for(Method::Wavelet);
  const ClassifierModel model = fit_normalized(preprocess_samples(raw, pre), {"dim", "bright"}, cfg, pre);
  std::vector<GrayImage> batch{disk(15, 0.9), GrayImage(48, 48, 0.3), disk(15, 0.4), disk(16, 0.9)};
  for (std::size_t threads : {1u, 3u}) {
    const auto res = predict_batch(model, batch, threads);
    REQUIRE(res.size() == 4);
    CHECK(res[0].ok());
    CHECK(*res[0].prediction->label == 1);
    CHECK_FALSE(res[1].ok());
    CHECK(res[1].stage == "preprocess:threshold");
    CHECK(*res[2].prediction->label == 0);
    CHECK(*res[3].prediction->label == 1);
  }
  CHECK_THROWS_AS(predict(model, GrayImage(48, 48, 0.3)), PredictionFailure);
  CHECK_THROWS_AS(predict_normalized(model, GrayImage(10, 10, 0.3)), PredictionFailure);
}
