#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eigencoin/classify.hpp"

namespace eigencoin {

/// counts[t][p]: test items of true class t predicted as p. Rejected
/// predictions are tallied per true class and kept out of the columns.
struct ConfusionMatrix {
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::size_t> rejected;

  std::size_t classes() const noexcept { return counts.size(); }
  /// Accepted plus rejected items of class t.
  std::size_t row_total(std::size_t t) const;
  std::size_t accepted_row_total(std::size_t t) const;
  std::size_t total() const;
  std::size_t trace() const;
};

/// Labels are 0-based class indices < C.
ConfusionMatrix confusion(std::span<const std::size_t> truth, std::span<const Prediction> pred,
                          std::size_t classes);

/// R_i = counts[i][i] / row total. With `rejection_aware` the denominator
/// excludes rejected items. Throws UndefinedRate for an empty row.
std::vector<double> per_class_rates(const ConfusionMatrix& cm, bool rejection_aware = false);

/// Same as per_class_rates but empty rows yield nullopt.
std::vector<std::optional<double>> defined_rates(const ConfusionMatrix& cm,
                                                 bool rejection_aware = false);

/// sum(alpha_i R_i) / sum(alpha_i).
double weighted_precision(std::span<const double> rates, std::span<const double> alphas);

enum class AlphaMode { Rank, Reciprocal };

/// Rank: largest class -> 1, next -> 2, ...; equal sizes share the lower
/// rank. Reciprocal: 1 / C_i.
std::vector<double> alphas_from_counts(std::span<const std::size_t> counts,
                                       AlphaMode mode = AlphaMode::Rank);

AlphaMode parse_alpha_mode(const std::string& name);
std::string to_string(AlphaMode mode);

struct EvalReport {
  ConfusionMatrix confusion;
  std::vector<std::optional<double>> rates;
  double overall_accuracy = 0.0;
  /// Over classes with a defined rate; alphas renormalized to those classes.
  double weighted_precision = 0.0;
  std::vector<double> alphas;
  bool rejection_aware = false;
};

EvalReport make_report(ConfusionMatrix cm, std::vector<double> alphas, bool rejection_aware);

/// Predicts every (normalized) test sample and scores the result.
EvalReport evaluate(const ClassifierModel& model, std::span<const Sample> test,
                    std::vector<double> alphas, bool rejection_aware = false);

struct SweepRow {
  std::size_t k = 0;
  EvalReport report;
  double mse_train = 0.0;
};

/// Eigenvector-count sweep. One manifold is built at the largest K and
/// truncated for each row. Rows come back in ascending K.
std::vector<SweepRow> sweep(std::span<const Sample> train, std::span<const Sample> test,
                            const std::vector<std::string>& class_names,
                            std::vector<std::size_t> ks, const ClassifierConfig& cfg,
                            const PreprocessConfig& preprocess, const std::vector<double>& alphas,
                            bool rejection_aware = false);

struct CompareRow {
  std::string method;
  ClassifierConfig config;
  EvalReport report;
};

CompareRow compare_one(std::span<const Sample> train, std::span<const Sample> test,
                       const std::vector<std::string>& class_names, const ClassifierConfig& cfg,
                       const PreprocessConfig& preprocess, const std::vector<double>& alphas,
                       bool rejection_aware = false);

}  // namespace eigencoin
