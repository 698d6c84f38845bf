#include "eigencoin/eval.hpp"

#include <algorithm>
#include <numeric>

#include "eigencoin/error.hpp"

namespace eigencoin {

std::size_t ConfusionMatrix::accepted_row_total(std::size_t t) const {
  return std::accumulate(counts[t].begin(), counts[t].end(), std::size_t{0});
}

std::size_t ConfusionMatrix::row_total(std::size_t t) const {
  return accepted_row_total(t) + rejected[t];
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < classes(); ++t) n += row_total(t);
  return n;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < classes(); ++t) n += counts[t][t];
  return n;
}

ConfusionMatrix confusion(std::span<const std::size_t> truth, std::span<const Prediction> pred,
                          std::size_t classes) {
  if (truth.size() != pred.size()) {
    throw DimensionError("confusion: " + std::to_string(truth.size()) + " labels vs " +
                         std::to_string(pred.size()) + " predictions");
  }
  if (classes == 0) throw InvalidParameter("confusion: class count must be positive");
  ConfusionMatrix cm;
  cm.counts.assign(classes, std::vector<std::size_t>(classes, 0));
  cm.rejected.assign(classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= classes) throw InvalidParameter("confusion: true label out of range");
    if (pred[i].rejected()) {
      ++cm.rejected[truth[i]];
      continue;
    }
    if (*pred[i].label >= classes) throw InvalidParameter("confusion: predicted label out of range");
    ++cm.counts[truth[i]][*pred[i].label];
  }
  return cm;
}

std::vector<std::optional<double>> defined_rates(const ConfusionMatrix& cm, bool rejection_aware) {
  std::vector<std::optional<double>> rates(cm.classes());
  for (std::size_t i = 0; i < cm.classes(); ++i) {
    const std::size_t denom = rejection_aware ? cm.accepted_row_total(i) : cm.row_total(i);
    if (denom > 0) rates[i] = static_cast<double>(cm.counts[i][i]) / static_cast<double>(denom);
  }
  return rates;
}

std::vector<double> per_class_rates(const ConfusionMatrix& cm, bool rejection_aware) {
  std::vector<double> out;
  const auto rates = defined_rates(cm, rejection_aware);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!rates[i]) {
      throw UndefinedRate("per_class_rates: class " + std::to_string(i) + " has no test items");
    }
    out.push_back(*rates[i]);
  }
  return out;
}

double weighted_precision(std::span<const double> rates, std::span<const double> alphas) {
  if (rates.size() != alphas.size()) {
    throw DimensionError("weighted_precision: " + std::to_string(rates.size()) + " rates vs " +
                         std::to_string(alphas.size()) + " alphas");
  }
  if (rates.empty()) throw InvalidParameter("weighted_precision: no classes");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw InvalidParameter("weighted_precision: alphas must be > 0");
    num += alphas[i] * rates[i];
    den += alphas[i];
  }
  return num / den;
}

std::vector<double> alphas_from_counts(std::span<const std::size_t> counts, AlphaMode mode) {
  for (std::size_t c : counts) {
    if (c == 0) throw InvalidParameter("alphas_from_counts: class sizes must be positive");
  }
  std::vector<double> alphas(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (mode == AlphaMode::Reciprocal) {
      alphas[i] = 1.0 / static_cast<double>(counts[i]);
      continue;
    }
    const auto larger = std::count_if(counts.begin(), counts.end(),
                                      [&](std::size_t c) { return c > counts[i]; });
    alphas[i] = static_cast<double>(larger + 1);
  }
  return alphas;
}

AlphaMode parse_alpha_mode(const std::string& name) {
  if (name == "rank") return AlphaMode::Rank;
  if (name == "reciprocal") return AlphaMode::Reciprocal;
  throw InvalidParameter("unknown alpha_mode '" + name + "' (expected rank or reciprocal)");
}

std::string to_string(AlphaMode mode) {
  return mode == AlphaMode::Rank ? "rank" : "reciprocal";
}

EvalReport make_report(ConfusionMatrix cm, std::vector<double> alphas, bool rejection_aware) {
  if (alphas.size() != cm.classes()) {
    throw DimensionError("make_report: alpha count does not match class count");
  }
  EvalReport r;
  r.rates = defined_rates(cm, rejection_aware);
  const std::size_t denom = rejection_aware ? cm.total() - std::accumulate(cm.rejected.begin(), cm.rejected.end(), std::size_t{0})
                                            : cm.total();
  r.overall_accuracy = denom > 0 ? static_cast<double>(cm.trace()) / static_cast<double>(denom) : 0.0;
  std::vector<double> rates;
  std::vector<double> used_alphas;
  for (std::size_t i = 0; i < r.rates.size(); ++i) {
    if (!r.rates[i]) continue;
    rates.push_back(*r.rates[i]);
    used_alphas.push_back(alphas[i]);
  }
  r.weighted_precision = rates.empty() ? 0.0 : weighted_precision(rates, used_alphas);
  r.confusion = std::move(cm);
  r.alphas = std::move(alphas);
  r.rejection_aware = rejection_aware;
  return r;
}

EvalReport evaluate(const ClassifierModel& model, std::span<const Sample> test,
                    std::vector<double> alphas, bool rejection_aware) {
  std::vector<std::size_t> truth;
  std::vector<Prediction> preds;
  for (const Sample& s : test) {
    truth.push_back(s.label);
    preds.push_back(predict_normalized(model, s.image));
  }
  return make_report(confusion(truth, preds, model.class_count()), std::move(alphas),
                     rejection_aware);
}

std::vector<SweepRow> sweep(std::span<const Sample> train, std::span<const Sample> test,
                            const std::vector<std::string>& class_names,
                            std::vector<std::size_t> ks, const ClassifierConfig& cfg,
                            const PreprocessConfig& preprocess, const std::vector<double>& alphas,
                            bool rejection_aware) {
  if (cfg.method != Method::EigenCoin) throw InvalidParameter("sweep: method must be eigencoin");
  if (ks.empty()) throw InvalidParameter("sweep: empty K list");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::vector<ImageVector> vecs;
  for (const Sample& s : train) {
    const auto px = s.image.pixels();
    vecs.emplace_back(Eigen::Map<const Eigen::VectorXd>(px.data(), static_cast<Eigen::Index>(px.size())));
  }
  const Manifold full = build_manifold(vecs, ComponentCount{ks.back()});

  std::vector<SweepRow> rows;
  for (std::size_t k : ks) {
    ClassifierConfig row_cfg = cfg;
    row_cfg.selection = ComponentCount{k};
    Manifold m = full.truncated(k);
    SweepRow row;
    row.k = k;
    row.mse_train = train_mse(m, vecs);
    const ClassifierModel model =
        fit_with_manifold(std::move(m), train, class_names, row_cfg, preprocess);
    row.report = evaluate(model, test, alphas, rejection_aware);
    rows.push_back(std::move(row));
  }
  return rows;
}

CompareRow compare_one(std::span<const Sample> train, std::span<const Sample> test,
                       const std::vector<std::string>& class_names, const ClassifierConfig& cfg,
                       const PreprocessConfig& preprocess, const std::vector<double>& alphas,
                       bool rejection_aware) {
  const ClassifierModel model = fit_normalized(train, class_names, cfg, preprocess);
  return {std::string(to_string(cfg.method)), cfg, evaluate(model, test, alphas, rejection_aware)};
}

}  // namespace eigencoin
