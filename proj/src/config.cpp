#include "eigencoin/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "eigencoin/error.hpp"

namespace eigencoin {

using nlohmann::json;

json to_json(const PreprocessConfig& cfg) {
  return {{"sobel_threshold", cfg.sobel_threshold},
          {"se_length", cfg.se_length},
          {"normalized_size", cfg.normalized_size}};
}

PreprocessConfig preprocess_from_json(const json& j) {
  PreprocessConfig cfg;
  try {
    if (j.contains("sobel_threshold")) cfg.sobel_threshold = j["sobel_threshold"].get<double>();
    if (j.contains("se_length")) cfg.se_length = j["se_length"].get<std::size_t>();
    if (j.contains("normalized_size")) cfg.normalized_size = j["normalized_size"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("preprocess config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

namespace {

json threshold_to_json(double t) {
  if (std::isinf(t)) return "inf";
  return t;
}

double threshold_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw FormatError("threshold must be a number or \"inf\"");
  }
  return j.get<double>();
}

}  // namespace

json to_json(const ClassifierConfig& cfg) {
  json j;
  j["method"] = std::string(to_string(cfg.method));
  if (const auto* e = std::get_if<EnergyFraction>(&cfg.selection)) {
    j["components"] = nullptr;
    j["energy_fraction"] = e->value;
  } else {
    j["components"] = std::get<ComponentCount>(cfg.selection).value;
    j["energy_fraction"] = nullptr;
  }
  j["k_r"] = cfg.k_r;
  j["k_c"] = cfg.k_c;
  j["level"] = cfg.level;
  j["k"] = cfg.harris.k;
  j["window_radius"] = cfg.harris.window_radius;
  j["threshold_fraction"] = cfg.harris.threshold_fraction;
  j["top_count"] = cfg.harris.top_count;
  j["distance"] = std::string(to_string(cfg.resolved_distance()));
  j["cov_model"] = std::string(to_string(cfg.cov));
  j["epsilon"] = cfg.epsilon ? json(*cfg.epsilon) : json("auto");
  j["amd_p"] = cfg.amd_p;
  j["threshold"] = threshold_to_json(cfg.threshold);
  return j;
}

ClassifierConfig classifier_from_json(const json& j) {
  ClassifierConfig cfg;
  try {
    if (j.contains("method")) cfg.method = parse_method(j["method"].get<std::string>());
    if (j.contains("energy_fraction") && !j["energy_fraction"].is_null()) {
      cfg.selection = EnergyFraction{j["energy_fraction"].get<double>()};
    } else if (j.contains("components") && !j["components"].is_null()) {
      cfg.selection = ComponentCount{j["components"].get<std::size_t>()};
    }
    if (j.contains("k_r")) cfg.k_r = j["k_r"].get<std::size_t>();
    if (j.contains("k_c")) cfg.k_c = j["k_c"].get<std::size_t>();
    if (j.contains("level")) cfg.level = j["level"].get<std::size_t>();
    if (j.contains("k")) cfg.harris.k = j["k"].get<double>();
    if (j.contains("window_radius")) cfg.harris.window_radius = j["window_radius"].get<std::size_t>();
    if (j.contains("threshold_fraction")) {
      cfg.harris.threshold_fraction = j["threshold_fraction"].get<double>();
    }
    if (j.contains("top_count")) cfg.harris.top_count = j["top_count"].get<std::size_t>();
    if (j.contains("distance") && !j["distance"].is_null()) {
      cfg.distance = parse_distance_kind(j["distance"].get<std::string>());
    }
    if (j.contains("cov_model")) cfg.cov = parse_cov_kind(j["cov_model"].get<std::string>());
    if (j.contains("epsilon") && !j["epsilon"].is_null() &&
        !(j["epsilon"].is_string() && j["epsilon"].get<std::string>() == "auto")) {
      cfg.epsilon = j["epsilon"].get<double>();
    }
    if (j.contains("amd_p")) cfg.amd_p = j["amd_p"].get<double>();
    if (j.contains("threshold")) cfg.threshold = threshold_from_json(j["threshold"]);
  } catch (const json::exception& e) {
    throw FormatError(std::string("classifier config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::defaults() {
  RunConfig rc;
  json classifier = eigencoin::to_json(ClassifierConfig{});
  classifier["distance"] = nullptr;  // method default
  rc.values_ = {
      {"preprocess", eigencoin::to_json(PreprocessConfig{})},
      {"classifier", classifier},
      {"eval",
       {{"alpha_mode", "rank"},
        {"alphas", nullptr},
        {"rejection_aware", false},
        {"sweep_ks", EvalConfig{}.sweep_ks},
        {"methods", EvalConfig{}.methods}}},
      {"dataset", {{"seed", nullptr}}},
  };
  rc.provenance_ = json::object();
  for (const auto& [section, body] : rc.values_.items()) {
    for (const auto& [key, value] : body.items()) {
      rc.provenance_[section + "." + key] = "default";
    }
  }
  return rc;
}

void RunConfig::set(const std::string& dotted_key, const json& value, const std::string& source) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw FormatError("config key must be section.key: " + dotted_key);
  const std::string section = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);
  if (!values_.contains(section) || !values_[section].contains(key)) {
    throw FormatError("unknown config key '" + dotted_key + "'");
  }
  values_[section][key] = value;
  provenance_[dotted_key] = source;
}

void RunConfig::merge(const json& overrides, const std::string& source) {
  if (!overrides.is_object()) throw FormatError("config must be a JSON object");
  for (const auto& [section, body] : overrides.items()) {
    if (!values_.contains(section)) throw FormatError("unknown config section '" + section + "'");
    if (!body.is_object()) throw FormatError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) set(section + "." + key, value, source);
  }
}

PreprocessConfig RunConfig::preprocess() const { return preprocess_from_json(values_["preprocess"]); }

ClassifierConfig RunConfig::classifier() const { return classifier_from_json(values_["classifier"]); }

EvalConfig RunConfig::eval() const {
  EvalConfig cfg;
  const json& e = values_["eval"];
  try {
    cfg.alpha_mode = parse_alpha_mode(e["alpha_mode"].get<std::string>());
    if (!e["alphas"].is_null()) cfg.alphas = e["alphas"].get<std::vector<double>>();
    cfg.rejection_aware = e["rejection_aware"].get<bool>();
    cfg.sweep_ks = e["sweep_ks"].get<std::vector<std::size_t>>();
    cfg.methods = e["methods"].get<std::vector<std::string>>();
  } catch (const json::exception& ex) {
    throw FormatError(std::string("eval config: ") + ex.what());
  }
  return cfg;
}

std::optional<std::uint64_t> RunConfig::seed() const {
  const json& s = values_["dataset"]["seed"];
  if (s.is_null()) return std::nullopt;
  try {
    return s.get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("dataset.seed: ") + e.what());
  }
}

json RunConfig::to_json() const {
  json resolved = values_;
  resolved["classifier"] = eigencoin::to_json(classifier());
  resolved["preprocess"] = eigencoin::to_json(preprocess());
  return {{"values", resolved}, {"provenance", provenance_}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw FormatError(path + " is not valid JSON: " + e.what());
  }
}

}  // namespace eigencoin
