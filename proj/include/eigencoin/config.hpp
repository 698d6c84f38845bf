#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eigencoin/classify.hpp"
#include "eigencoin/eval.hpp"
#include "eigencoin/imaging.hpp"

namespace eigencoin {

nlohmann::json to_json(const PreprocessConfig& cfg);
PreprocessConfig preprocess_from_json(const nlohmann::json& j);

/// Flat classifier object: {"method", method parameters, "distance",
/// distance parameters, "threshold": number | "inf"}.
nlohmann::json to_json(const ClassifierConfig& cfg);
ClassifierConfig classifier_from_json(const nlohmann::json& j);

struct EvalConfig {
  AlphaMode alpha_mode = AlphaMode::Rank;
  std::optional<std::vector<double>> alphas;
  bool rejection_aware = false;
  std::vector<std::size_t> sweep_ks{8, 32, 48, 104, 112, 120, 128, 176};
  std::vector<std::string> methods{"eigencoin", "bdpca", "wavelet", "harris"};
};

/// Merged configuration with the origin of every value ("default", "env",
/// "file" or "flag").
class RunConfig {
public:
  static RunConfig defaults();

  /// Overlays a {section: {key: value}} object. Unknown sections or keys are
  /// rejected with FormatError.
  void merge(const nlohmann::json& overrides, const std::string& source);
  /// Sets one value addressed as "section.key".
  void set(const std::string& dotted_key, const nlohmann::json& value, const std::string& source);

  const nlohmann::json& values() const noexcept { return values_; }
  const nlohmann::json& provenance() const noexcept { return provenance_; }

  PreprocessConfig preprocess() const;
  ClassifierConfig classifier() const;
  EvalConfig eval() const;
  std::optional<std::uint64_t> seed() const;

  /// {"values": ..., "provenance": ...} with the distance resolved.
  nlohmann::json to_json() const;

private:
  nlohmann::json values_;
  nlohmann::json provenance_;
};

nlohmann::json read_json_file(const std::string& path);

}  // namespace eigencoin
