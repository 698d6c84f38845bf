#include "eigencoin/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "eigencoin/classify.hpp"
#include "eigencoin/config.hpp"
#include "eigencoin/dataset.hpp"
#include "eigencoin/error.hpp"
#include "eigencoin/eval.hpp"
#include "eigencoin/image_io.hpp"
#include "eigencoin/model_io.hpp"
#include "eigencoin/synth.hpp"

namespace eigencoin::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kReportFormatVersion = 1;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::string out_dir;
  std::size_t threads = 1;
  std::vector<std::string> sets;
  std::string method;
  std::optional<std::size_t> components;
};

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::DimensionError:
    case ErrorKind::FormatError:
      return kUsageError;
    case ErrorKind::SegmentationFailure:
    case ErrorKind::InvalidDataset:
    case ErrorKind::LoadError:
    case ErrorKind::UndefinedRate:
    case ErrorKind::PredictionFailure:
      return kDataError;
    case ErrorKind::InvariantViolation:
      return kInternalError;
  }
  return kInternalError;
}

json parse_flag_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig rc = RunConfig::defaults();
  if (!g.config_path.empty()) {
    rc.merge(read_json_file(g.config_path), "file");
  } else if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') {
    rc.merge(read_json_file(env), "env");
  }
  for (const std::string& s : g.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw FormatError("--set expects section.key=value, got " + s);
    rc.set(s.substr(0, eq), parse_flag_value(s.substr(eq + 1)), "flag");
  }
  if (!g.method.empty()) rc.set("classifier.method", g.method, "flag");
  if (g.components) {
    rc.set("classifier.components", *g.components, "flag");
    rc.set("classifier.energy_fraction", nullptr, "flag");
  }
  if (g.seed) rc.set("dataset.seed", *g.seed, "flag");
  // Parse every section now so no stage starts on a bad config.
  (void)rc.preprocess();
  (void)rc.classifier();
  (void)rc.eval();
  (void)rc.seed();
  return rc;
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

std::string percent_or_na(const std::optional<double>& fraction) {
  return fraction ? percent(*fraction) : std::string("NA");
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw LoadError("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Wall-clock details live only in this sidecar so reports stay reproducible.
void append_log(const fs::path& path, const std::vector<std::string>& args, const std::string& note) {
  std::ofstream f(path, std::ios::app);
  if (!f) return;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  f << stamp << " ";
  for (const std::string& a : args) f << a << ' ';
  f << "| " << note << '\n';
}

fs::path require_out_dir(const GlobalOptions& g) {
  if (g.out_dir.empty()) throw FormatError("--out DIR is required for this command");
  fs::create_directories(g.out_dir);
  return g.out_dir;
}

json report_header(const std::string& command, const RunConfig& rc) {
  return {{"format_version", kReportFormatVersion},
          {"command", command},
          {"run_config", rc.to_json()}};
}

json optional_array(const std::vector<std::optional<double>>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(x ? json(*x) : json(nullptr));
  return a;
}

json report_to_json(const EvalReport& r) {
  return {{"confusion", r.confusion.counts},
          {"rejected", r.confusion.rejected},
          {"rates", optional_array(r.rates)},
          {"overall_accuracy", r.overall_accuracy},
          {"weighted_precision", r.weighted_precision},
          {"alphas", r.alphas},
          {"rejection_aware", r.rejection_aware}};
}

struct PreparedData {
  LabeledDataset dataset;
  std::vector<Sample> train;
  std::vector<Sample> test;
  std::vector<double> alphas;
  std::uint64_t seed = 0;
};

/// Loads the manifest, applies the stratified split and normalizes both
/// halves with `preprocess`.
PreparedData prepare(const std::string& manifest_path, const RunConfig& rc,
                     const PreprocessConfig& preprocess) {
  const DatasetManifest manifest = read_manifest(manifest_path);
  const fs::path root = fs::path(manifest_path).parent_path();
  PreparedData d;
  d.seed = rc.seed().value_or(manifest.seed);
  d.dataset = split(load(root, manifest), manifest.fraction, d.seed);
  d.train = preprocess_samples(d.dataset.samples(Split::Train), preprocess);
  d.test = preprocess_samples(d.dataset.samples(Split::Test), preprocess);
  const EvalConfig ec = rc.eval();
  if (ec.alphas) {
    if (ec.alphas->size() != d.dataset.class_count()) {
      throw InvalidParameter("eval.alphas must list one weight per class");
    }
    d.alphas = *ec.alphas;
  } else {
    d.alphas = alphas_from_counts(d.dataset.class_sizes(), ec.alpha_mode);
  }
  return d;
}

json dataset_summary(const PreparedData& d) {
  return {{"class_names", d.dataset.class_names()},
          {"class_sizes", d.dataset.class_sizes()},
          {"train_counts", d.dataset.split_sizes(Split::Train)},
          {"test_counts", d.dataset.split_sizes(Split::Test)},
          {"split_seed", d.seed}};
}

json model_summary(const ClassifierModel& model) {
  json j{{"method", std::string(to_string(model.config().method))},
         {"classifier", to_json(model.config())},
         {"epsilon", model.epsilon()},
         {"gallery_size", model.gallery().size()},
         {"feature_length", model.feature_length()}};
  if (const Manifold* m = model.manifold()) {
    j["K"] = m->components();
    j["energy_fraction"] = m->energy_fraction();
  }
  return j;
}

// ---------------------------------------------------------------------------

int cmd_synth(const GlobalOptions& g, const std::string& preset_path, std::optional<double> noise,
              const std::vector<std::string>& args, std::ostream& out) {
  SynthConfig cfg = preset_path.empty() ? tenth_scale_preset()
                                        : synth_config_from_json(read_json_file(preset_path));
  if (g.seed) cfg.seed = *g.seed;
  if (noise) cfg.noise = *noise;
  cfg.validate();
  const fs::path dir = require_out_dir(g);
  const LabeledDataset ds = synthesize(cfg);
  DatasetManifest manifest;
  manifest.seed = cfg.seed;
  for (const DatasetClass& cls : ds.classes()) {
    fs::create_directories(dir / cls.name);
    for (std::size_t i = 0; i < cls.images.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "%04zu.png", i);
      write_png(dir / cls.name / name, cls.images[i].image);
    }
    manifest.classes.push_back({cls.name, cls.name, std::nullopt});
  }
  write_manifest(dir / "manifest.json", manifest);
  write_json(dir / "synth_config.json", to_json(cfg));
  append_log(dir / "run.log", args, "synth");
  std::size_t total = 0;
  for (std::size_t n : ds.class_sizes()) total += n;
  out << "synthesized " << total << " images in " << ds.class_count() << " classes -> "
      << (dir / "manifest.json").string() << "\n";
  return kOk;
}

int cmd_preprocess(const GlobalOptions& g, const std::string& in_dir,
                   const std::vector<std::string>& args, std::ostream& out) {
  const RunConfig rc = resolve_config(g);
  const PreprocessConfig pre = rc.preprocess();
  const fs::path dir = require_out_dir(g);
  json items = json::array();
  std::size_t ok = 0;
  std::size_t failed = 0;
  for (const fs::path& file : list_images(in_dir)) {
    json item{{"file", file.filename().string()}};
    try {
      const GrayImage roi = extract_roi(read_image(file), pre);
      const std::string name = file.stem().string() + ".png";
      write_png(dir / name, roi);
      item["status"] = "ok";
      item["output"] = name;
      ++ok;
    } catch (const SegmentationFailure& e) {
      item["status"] = "segmentation-failure";
      item["stage"] = e.stage();
      item["message"] = e.what();
      ++failed;
    } catch (const LoadError& e) {
      item["status"] = "load-error";
      item["message"] = e.what();
      ++failed;
    }
    items.push_back(item);
  }
  json summary = report_header("preprocess", rc);
  summary["items"] = items;
  summary["successes"] = ok;
  summary["failures"] = failed;
  write_json(dir / "summary.json", summary);
  append_log(dir / "run.log", args, "preprocess");
  out << "preprocessed " << ok << " of " << ok + failed << " images\n";
  return failed > 0 && g.strict ? kDataError : kOk;
}

int cmd_train(const GlobalOptions& g, const std::string& manifest_path, const std::string& model_path,
              const std::vector<std::string>& args, std::ostream& out) {
  if (model_path.empty()) throw FormatError("--model FILE is required");
  const RunConfig rc = resolve_config(g);
  const PreprocessConfig pre = rc.preprocess();
  const PreparedData data = prepare(manifest_path, rc, pre);
  const ClassifierModel model = fit_normalized(data.train, data.dataset.class_names(),
                                               rc.classifier(), pre);
  save_model(model_path, model, rc.to_json());
  append_log(model_path + ".log", args, "train");
  out << "method: " << to_string(model.config().method) << "\n";
  out << "gallery: " << model.gallery().size() << "\n";
  if (const Manifold* m = model.manifold()) {
    out << "K: " << m->components() << "\n";
    out << "energy_fraction: " << number(m->energy_fraction()) << "\n";
  }
  out << "model: " << model_path << "\n";
  return kOk;
}

int cmd_classify(const GlobalOptions& g, const std::string& model_path,
                 const std::vector<std::string>& images, std::ostream& out) {
  const ClassifierModel model = load_model(model_path);
  std::vector<GrayImage> decoded(images.size());
  std::vector<std::string> load_errors(images.size());
  std::vector<GrayImage> batch;
  std::vector<std::size_t> batch_index;
  for (std::size_t i = 0; i < images.size(); ++i) {
    try {
      batch.push_back(read_image(images[i]));
      batch_index.push_back(i);
    } catch (const LoadError& e) {
      load_errors[i] = e.what();
    }
  }
  const std::vector<BatchItem> results = predict_batch(model, batch, g.threads);
  std::vector<json> lines(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!load_errors[i].empty()) {
      lines[i] = {{"image", images[i]}, {"error", load_errors[i]}, {"stage", "load"}};
    }
  }
  bool any_failed = false;
  for (std::size_t b = 0; b < results.size(); ++b) {
    const std::size_t i = batch_index[b];
    const BatchItem& item = results[b];
    if (!item.ok()) {
      lines[i] = {{"image", images[i]}, {"error", item.error}, {"stage", item.stage}};
      continue;
    }
    const Prediction& p = *item.prediction;
    json j{{"image", images[i]}};
    j["label"] = p.rejected() ? std::string("REJECTED") : model.class_names()[*p.label];
    j["class_index"] = p.rejected() ? json(nullptr) : json(*p.label);
    j["distance"] = p.distance;
    j["runner_up"] = p.runner_up ? json(*p.runner_up) : json(nullptr);
    lines[i] = j;
  }
  for (const json& j : lines) {
    if (j.contains("error")) any_failed = true;
    out << j.dump() << "\n";
  }
  return any_failed && g.strict ? kDataError : kOk;
}

int cmd_eval(const GlobalOptions& g, const std::string& model_path, const std::string& manifest_path,
             const std::vector<std::string>& args, std::ostream& out) {
  const RunConfig rc = resolve_config(g);
  const fs::path dir = require_out_dir(g);
  const ClassifierModel model = load_model(model_path);
  const PreparedData data = prepare(manifest_path, rc, model.preprocess());
  const EvalReport report = evaluate(model, data.test, data.alphas, rc.eval().rejection_aware);

  json j = report_header("eval", rc);
  j["model"] = model_summary(model);
  j["dataset"] = dataset_summary(data);
  j["alpha_mode"] = rc.eval().alphas ? std::string("explicit") : to_string(rc.eval().alpha_mode);
  j["report"] = report_to_json(report);
  write_json(dir / "eval_report.json", j);

  std::ostringstream csv;
  const auto names = model.class_names();
  csv << "true\\predicted";
  for (const auto& n : names) csv << ',' << csv_field(n);
  csv << ",rejected\n";
  for (std::size_t t = 0; t < names.size(); ++t) {
    csv << csv_field(names[t]);
    for (std::size_t p = 0; p < names.size(); ++p) csv << ',' << report.confusion.counts[t][p];
    csv << ',' << report.confusion.rejected[t] << '\n';
  }
  write_text(dir / "confusion.csv", csv.str());
  append_log(dir / "run.log", args, "eval");

  out << "overall_accuracy: " << percent(report.overall_accuracy) << "%\n";
  out << "weighted_precision: " << percent(report.weighted_precision) << "%\n";
  return kOk;
}

std::string rate_header(const std::vector<std::string>& names) {
  std::string h;
  for (std::size_t i = 0; i < names.size(); ++i) h += ",R_" + std::to_string(i + 1);
  return h;
}

int cmd_sweep(const GlobalOptions& g, const std::string& manifest_path,
              std::vector<std::size_t> ks, const std::vector<std::string>& args, std::ostream& out) {
  const RunConfig rc = resolve_config(g);
  const fs::path dir = require_out_dir(g);
  const PreprocessConfig pre = rc.preprocess();
  const EvalConfig ec = rc.eval();
  if (ks.empty()) ks = ec.sweep_ks;
  ClassifierConfig cfg = rc.classifier();
  if (cfg.method != Method::EigenCoin) throw InvalidParameter("sweep only supports eigencoin");
  const PreparedData data = prepare(manifest_path, rc, pre);
  const auto names = data.dataset.class_names();
  const std::vector<SweepRow> rows =
      sweep(data.train, data.test, names, ks, cfg, pre, data.alphas, ec.rejection_aware);

  std::ostringstream csv;
  csv << "K,acc_overall" << rate_header(names) << ",weighted_precision,mse_train\n";
  json jrows = json::array();
  for (const SweepRow& row : rows) {
    csv << row.k << ',' << percent(row.report.overall_accuracy);
    for (const auto& r : row.report.rates) csv << ',' << percent_or_na(r);
    csv << ',' << percent(row.report.weighted_precision) << ',' << number(row.mse_train) << '\n';
    json jr = report_to_json(row.report);
    jr["K"] = row.k;
    jr["mse_train"] = row.mse_train;
    jrows.push_back(jr);
  }
  write_text(dir / "sweep.csv", csv.str());
  json j = report_header("sweep", rc);
  j["dataset"] = dataset_summary(data);
  j["rows"] = jrows;
  write_json(dir / "sweep.json", j);
  append_log(dir / "run.log", args, "sweep");
  out << "sweep rows: " << rows.size() << " -> " << (dir / "sweep.csv").string() << "\n";
  return kOk;
}

int cmd_compare(const GlobalOptions& g, const std::string& manifest_path,
                std::vector<std::string> methods, const std::vector<std::string>& args,
                std::ostream& out) {
  const RunConfig rc = resolve_config(g);
  const fs::path dir = require_out_dir(g);
  const PreprocessConfig pre = rc.preprocess();
  const EvalConfig ec = rc.eval();
  if (methods.empty()) methods = ec.methods;
  const ClassifierConfig base = rc.classifier();
  std::vector<ClassifierConfig> configs;
  for (const std::string& name : methods) {
    ClassifierConfig cfg = base;
    cfg.method = parse_method(name);
    // The configured distance applies to eigencoin; the others use their
    // method default unless it is valid for them too.
    if (cfg.method != base.method) cfg.distance.reset();
    cfg.validate();
    configs.push_back(cfg);
  }
  const PreparedData data = prepare(manifest_path, rc, pre);
  const auto names = data.dataset.class_names();

  std::ostringstream csv;
  csv << "method";
  for (const auto& n : names) csv << ',' << csv_field(n);
  csv << ",acc_overall,weighted_precision\n";
  json jrows = json::array();
  for (const ClassifierConfig& cfg : configs) {
    const CompareRow row = compare_one(data.train, data.test, names, cfg, pre, data.alphas,
                                       ec.rejection_aware);
    csv << row.method;
    for (const auto& r : row.report.rates) csv << ',' << percent_or_na(r);
    csv << ',' << percent(row.report.overall_accuracy) << ',' << percent(row.report.weighted_precision)
        << '\n';
    json jr = report_to_json(row.report);
    jr["method"] = row.method;
    jr["classifier"] = to_json(row.config);
    jrows.push_back(jr);
  }
  write_text(dir / "compare.csv", csv.str());
  json j = report_header("compare", rc);
  j["dataset"] = dataset_summary(data);
  j["rows"] = jrows;
  write_json(dir / "compare.json", j);
  append_log(dir / "run.log", args, "compare");
  out << "compared " << configs.size() << " methods -> " << (dir / "compare.csv").string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"eigencoin: coin image classification with PCA manifolds and Bhattacharyya distance"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config file (default: $EIGENCOIN_CONFIG)");
  app.add_option("--seed", g.seed, "Seed for splitting and synthesis");
  app.add_flag("--strict", g.strict, "Exit non-zero if any item fails");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads for batch prediction")->check(CLI::PositiveNumber);
  app.add_option("--set", g.sets, "Override a config value: section.key=value");
  app.add_option("--method", g.method, "Classifier method");
  app.add_option("--components", g.components, "EigenCoin eigenvector count K");

  std::string preset;
  std::optional<double> noise;
  auto* synth = app.add_subcommand("synth", "Render a synthetic coin dataset");
  synth->add_option("--preset", preset, "Synthetic dataset config (JSON)");
  synth->add_option("--noise", noise, "Override the noise level");

  std::string in_dir;
  auto* pre = app.add_subcommand("preprocess", "Segment and normalize coin images");
  pre->add_option("--in", in_dir, "Input image directory")->required();

  std::string manifest;
  std::string model;
  auto* train = app.add_subcommand("train", "Fit a classifier and write a model file");
  train->add_option("--manifest", manifest, "Dataset manifest")->required();
  train->add_option("--model", model, "Model output file")->required();

  std::vector<std::string> images;
  auto* classify = app.add_subcommand("classify", "Classify images; prints JSON lines");
  classify->add_option("--model", model, "Model file")->required();
  classify->add_option("images", images, "Image files")->required();

  auto* eval = app.add_subcommand("eval", "Score a model on the test split");
  eval->add_option("--model", model, "Model file")->required();
  eval->add_option("--manifest", manifest, "Dataset manifest")->required();

  std::vector<std::size_t> ks;
  auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy and MSE across eigenvector counts");
  sweep_cmd->add_option("--manifest", manifest, "Dataset manifest")->required();
  sweep_cmd->add_option("--ks", ks, "Eigenvector counts")->delimiter(',');

  std::vector<std::string> methods;
  auto* compare = app.add_subcommand("compare", "Per-class rates for several methods");
  compare->add_option("--manifest", manifest, "Dataset manifest")->required();
  compare->add_option("--methods", methods, "Methods to compare")->delimiter(',');

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  }

  try {
    if (synth->parsed()) return cmd_synth(g, preset, noise, args, out);
    if (pre->parsed()) return cmd_preprocess(g, in_dir, args, out);
    if (train->parsed()) return cmd_train(g, manifest, model, args, out);
    if (classify->parsed()) return cmd_classify(g, model, images, out);
    if (eval->parsed()) return cmd_eval(g, model, manifest, args, out);
    if (sweep_cmd->parsed()) return cmd_sweep(g, manifest, ks, args, out);
    if (compare->parsed()) return cmd_compare(g, manifest, methods, args, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error (filesystem): " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kUsageError;
}

}  // namespace eigencoin::cli
