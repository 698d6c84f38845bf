#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eigencoin/cli.hpp"
#include "eigencoin/image_io.hpp"
#include "eigencoin/model_io.hpp"

using namespace eigencoin;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = EIGENCOIN_FIXTURES;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "eigencoin");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("eigencoin_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

/// Synthesizes the two-class fixture once per test binary.
const fs::path& two_class_data() {
  static const fs::path dir = [] {
    const fs::path d = scratch("data");
    const Result r = run({"--out", d.string(), "synth", "--preset", kFixtures + "/synth_two_class_v1.json"});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::vector<std::string> small(std::vector<std::string> args) {
  args.insert(args.begin(), {"--config", kFixtures + "/run_config_small.json"});
  return args;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"train", "--manifest", "x.json"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("synth writes a loadable dataset") {
  const fs::path& d = two_class_data();
  CHECK(fs::exists(d / "manifest.json"));
  CHECK(fs::exists(d / "synth_config.json"));
  CHECK(fs::exists(d / "obverse_a" / "0000.png"));
  CHECK(fs::exists(d / "obverse_b" / "0005.png"));
}

TEST_CASE("preprocess reports failures and honors --strict") {
  const fs::path in = scratch("pre_in");
  fs::copy(two_class_data() / "obverse_a" / "0000.png", in / "coin.png");
  write_png(in / "blank.png", GrayImage(40, 40, 0.5));
  const fs::path out = scratch("pre_out");
  Result r = run({"--out", out.string(), "preprocess", "--in", in.string()});
  CHECK(r.code == 0);
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary["successes"] == 1);
  CHECK(summary["failures"] == 1);
  CHECK(summary["items"][0]["file"] == "blank.png");
  CHECK(summary["items"][0]["status"] == "segmentation-failure");
  CHECK(summary["items"][0]["stage"] == "threshold");
  CHECK(summary["format_version"] == 1);
  CHECK(summary["run_config"].contains("values"));
  CHECK(read_image(out / "coin.png").height() == 64);
  r = run({"--strict", "--out", out.string(), "preprocess", "--in", in.string()});
  CHECK(r.code == 2);

  const fs::path empty = scratch("pre_empty");
  r = run({"--strict", "--out", scratch("pre_empty_out").string(), "preprocess", "--in", empty.string()});
  CHECK(r.code == 0);
}

TEST_CASE("train, classify and eval") {
  const fs::path& d = two_class_data();
  const fs::path work = scratch("train");
  const std::string model = (work / "m.ecm").string();
  Result r = run(small({"train", "--manifest", (d / "manifest.json").string(), "--model", model}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("gallery: 8") != std::string::npos);
  CHECK(r.out.find("K: 4") != std::string::npos);
  CHECK(r.out.find("energy_fraction") != std::string::npos);

  const std::string img = (d / "obverse_b" / "0001.png").string();
  r = run({"classify", "--model", model, img, (work / "missing.png").string(), img});
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() == 3);
  const json first = json::parse(lines[0]);
  CHECK(first["image"] == img);
  CHECK(first.contains("distance"));
  CHECK(json::parse(lines[1]).contains("error"));
  CHECK(json::parse(lines[2]) == first);
  CHECK(run({"--strict", "classify", "--model", model, (work / "missing.png").string()}).code == 2);
  CHECK(run({"classify", "--model", (work / "nope.ecm").string(), img}).code == 2);

  r = run(small({"--out", (work / "eval").string(), "eval", "--model", model, "--manifest", (d / "manifest.json").string()}));
  REQUIRE(r.code == 0);
  const json rep = json::parse(slurp(work / "eval" / "eval_report.json"));
  CHECK(rep["format_version"] == 1);
  CHECK(rep["report"]["alphas"].size() == 2);
  CHECK(rep["run_config"]["values"]["classifier"]["components"] == 4);
  const auto& counts = rep["report"]["confusion"];
  CHECK(counts[0][0].get<int>() + counts[0][1].get<int>() == 2);
  CHECK(counts[1][0].get<int>() + counts[1][1].get<int>() == 2);
  const auto csv = split_lines(slurp(work / "eval" / "confusion.csv"));
  CHECK(csv.size() == 3);
  CHECK(csv[0] == "true\\predicted,obverse_a,obverse_b,rejected");
}

TEST_CASE("train refuses K beyond M-1") {
  const fs::path& d = two_class_data();
  const Result r = run({"--components", "8", "train", "--manifest", (d / "manifest.json").string(), "--model",
                        (scratch("bigk") / "m.ecm").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("M-1") != std::string::npos);
}

TEST_CASE("config errors exit 1 and name the key") {
  const fs::path& d = two_class_data();
  const Result r = run({"--set", "classifier.colour=3", "train", "--manifest", (d / "manifest.json").string(),
                        "--model", (scratch("badcfg") / "m.ecm").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("classifier.colour") != std::string::npos);
}

TEST_CASE("sweep rows: MSE nonincreasing and singleton equals eval") {
  const fs::path& d = two_class_data();
  const fs::path work = scratch("sweep");
  Result r = run(small({"--out", (work / "s").string(), "sweep", "--manifest", (d / "manifest.json").string()}));
  REQUIRE(r.code == 0);
  const auto lines = split_lines(slurp(work / "s" / "sweep.csv"));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "K,acc_overall,R_1,R_2,weighted_precision,mse_train");
  const json sj = json::parse(slurp(work / "s" / "sweep.json"));
  double prev = 2.0;
  for (const auto& row : sj["rows"]) {
    CHECK(row["mse_train"].get<double>() <= prev + 1e-12);
    prev = row["mse_train"].get<double>();
  }

  r = run(small({"--out", (work / "one").string(), "sweep", "--ks", "4", "--manifest", (d / "manifest.json").string()}));
  REQUIRE(r.code == 0);
  const std::string model = (work / "m.ecm").string();
  REQUIRE(run(small({"train", "--manifest", (d / "manifest.json").string(), "--model", model})).code == 0);
  REQUIRE(run(small({"--out", (work / "ev").string(), "eval", "--model", model, "--manifest", (d / "manifest.json").string()})).code == 0);
  const json one = json::parse(slurp(work / "one" / "sweep.json"))["rows"][0];
  const json ev = json::parse(slurp(work / "ev" / "eval_report.json"))["report"];
  CHECK(one["confusion"] == ev["confusion"]);
  CHECK(one["weighted_precision"] == ev["weighted_precision"]);
}

TEST_CASE("compare emits one row per method and consistent weighted precision") {
  const fs::path& d = two_class_data();
  const fs::path work = scratch("compare");
  Result r = run(small({"--out", work.string(), "compare", "--manifest", (d / "manifest.json").string()}));
  REQUIRE(r.code == 0);
  const auto lines = split_lines(slurp(work / "compare.csv"));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "method,obverse_a,obverse_b,acc_overall,weighted_precision");
  const json cj = json::parse(slurp(work / "compare.json"));
  for (const auto& row : cj["rows"]) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < row["rates"].size(); ++i) {
      num += row["alphas"][i].get<double>() * row["rates"][i].get<double>();
      den += row["alphas"][i].get<double>();
    }
    CHECK(std::abs(num / den - row["weighted_precision"].get<double>()) < 1e-9);
  }
  r = run(small({"--out", work.string(), "compare", "--methods", "eigencoin,sift", "--manifest", (d / "manifest.json").string()}));
  CHECK(r.code == 1);
}

TEST_CASE("environment variable supplies the config") {
  const fs::path& d = two_class_data();
  const fs::path work = scratch("env");
  ::setenv(cli::kConfigEnv, (kFixtures + "/run_config_small.json").c_str(), 1);
  const Result r = run({"--out", work.string(), "sweep", "--manifest", (d / "manifest.json").string()});
  ::unsetenv(cli::kConfigEnv);
  REQUIRE(r.code == 0);
  const json sj = json::parse(slurp(work / "sweep.json"));
  CHECK(sj["run_config"]["provenance"]["classifier.components"] == "env");
  CHECK(sj["rows"].size() == 3);
}
