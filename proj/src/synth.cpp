#include "eigencoin/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eigencoin/error.hpp"

namespace eigencoin {

void SynthConfig::validate() const {
  if (counts.empty()) throw InvalidParameter("synth: no classes");
  if (class_names.size() != counts.size()) {
    throw InvalidParameter("synth: class_names and counts differ in length");
  }
  for (std::size_t c : counts) {
    if (c < 1) throw InvalidParameter("synth: every class needs at least one image");
  }
  if (image_size < 48) throw InvalidParameter("synth: image_size must be >= 48");
  if (!(noise >= 0.0)) throw InvalidParameter("synth: noise must be >= 0");
  if (!(jitter >= 0.0)) throw InvalidParameter("synth: jitter must be >= 0");
  if (patterns.size() > counts.size()) throw InvalidParameter("synth: more patterns than classes");
}

CoinPattern default_pattern(std::size_t class_index) {
  CoinPattern p;
  switch (class_index) {
    case 0:
      break;
    case 1:
      p.bust_dx = -0.12;
      p.bust_dy = 0.28;
      p.bust_rx = 0.40;
      p.bust_ry = 0.30;
      p.head_radius = 0.20;
      p.rim_count = 2;
      p.star_angles = {180.0, 0.0, 270.0};
      p.crown_span = 200.0;
      p.legend_start = 200.0;
      p.legend_span = 120.0;
      p.legend_ticks = 14;
      break;
    case 2:
      p.bust_dx = 0.14;
      p.bust_dy = 0.10;
      p.bust_rx = 0.24;
      p.bust_ry = 0.46;
      p.head_radius = 0.13;
      p.star_angles = {135.0, 45.0, 250.0};
      p.crown_gap = 0.12;
      p.crown_span = 70.0;
      p.legend_start = 100.0;
      p.legend_span = 60.0;
      p.legend_ticks = 6;
      break;
    case 3:
      p.bust_dx = 0.0;
      p.bust_dy = 0.32;
      p.bust_rx = 0.46;
      p.bust_ry = 0.24;
      p.head_radius = 0.22;
      p.rim_count = 2;
      p.star_angles = {160.0, 20.0, 300.0};
      p.crown_gap = 0.02;
      p.crown_span = 160.0;
      p.legend_start = 300.0;
      p.legend_span = 100.0;
      p.legend_ticks = 18;
      break;
    default: {
      Rng rng(derive_seed(0xC011Full, class_index));
      p.bust_dx = rng.uniform(-0.15, 0.15);
      p.bust_dy = rng.uniform(0.05, 0.35);
      p.bust_rx = rng.uniform(0.22, 0.46);
      p.bust_ry = rng.uniform(0.22, 0.46);
      p.head_radius = rng.uniform(0.12, 0.22);
      p.rim_count = 1 + rng.below(2);
      for (double& a : p.star_angles) a = rng.uniform(0.0, 360.0);
      p.crown_gap = rng.uniform(0.02, 0.12);
      p.crown_span = rng.uniform(60.0, 200.0);
      p.legend_start = rng.uniform(0.0, 360.0);
      p.legend_span = rng.uniform(40.0, 160.0);
      p.legend_ticks = 4 + rng.below(16);
      break;
    }
  }
  return p;
}

namespace {

constexpr double kBackground = 0.05;
constexpr double kField = 0.55;
constexpr double kRim = 0.85;
constexpr double kLegend = 0.35;
constexpr double kStar = 0.95;
constexpr double kMoon = 0.30;
constexpr double kBust = 0.78;
constexpr double kHead = 0.82;
constexpr double kCrown = 0.95;
constexpr double kDigit = 0.9;

// 3x5 bitmaps for "0", "1", "4", "7".
constexpr std::array<std::array<const char*, 5>, 4> kGlyphs{{
    {"###", "#.#", "#.#", "#.#", "###"},
    {".#.", "##.", ".#.", ".#.", "###"},
    {"#.#", "#.#", "###", "..#", "..#"},
    {"###", "..#", ".#.", ".#.", ".#."},
}};

double angle_deg(double u, double v) {
  double a = std::atan2(-v, u) * 180.0 / std::numbers::pi;
  if (a < 0.0) a += 360.0;
  return a;
}

double angular_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

GrayImage render_coin(const CoinPattern& p, const SynthConfig& cfg, Rng& rng) {
  const std::size_t size = cfg.image_size;
  const double sz = static_cast<double>(size);
  const double radius = 0.34 * sz;
  const double cx = sz / 2.0 + rng.uniform(-cfg.jitter, cfg.jitter);
  const double cy = sz / 2.0 + rng.uniform(-cfg.jitter, cfg.jitter);
  const double bdx = p.bust_dx + rng.uniform(-cfg.jitter, cfg.jitter) * 0.5 / radius;
  const double bdy = p.bust_dy + rng.uniform(-cfg.jitter, cfg.jitter) * 0.5 / radius;
  const double legend_phase = rng.uniform(-2.0, 2.0);
  const double head_x = bdx;
  const double head_y = bdy - p.bust_ry - 0.6 * p.head_radius;
  const double crown_r = p.head_radius + p.crown_gap;

  std::vector<double> px(size * size, kBackground);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const double u = (static_cast<double>(c) + 0.5 - cx) / radius;
      const double v = (static_cast<double>(r) + 0.5 - cy) / radius;
      const double rho = std::hypot(u, v);
      if (rho > 1.0) continue;
      double val = kField;
      const double theta = angle_deg(u, v);

      for (std::size_t i = 0; i < p.rim_count; ++i) {
        const double outer = 0.97 - 0.09 * static_cast<double>(i);
        if (rho <= outer && rho >= outer - 0.04) val = kRim;
      }
      if (rho >= 0.72 && rho <= 0.84 && p.legend_ticks > 0) {
        const double step =
            p.legend_ticks > 1 ? p.legend_span / static_cast<double>(p.legend_ticks - 1) : 0.0;
        for (std::size_t t = 0; t < p.legend_ticks; ++t) {
          const double at = p.legend_start + legend_phase + step * static_cast<double>(t);
          if (angular_gap(theta, at) <= 1.3) val = kLegend;
        }
      }
      for (double a : p.star_angles) {
        const double sx = 0.60 * std::cos(rad(a));
        const double sy = -0.60 * std::sin(rad(a));
        const double mx = 0.60 * std::cos(rad(a + 9.0));
        const double my = -0.60 * std::sin(rad(a + 9.0));
        const double in_moon = std::hypot(u - mx, v - my);
        const double cut = std::hypot(u - mx * 1.05, v - my * 1.05);
        if (in_moon <= 0.07 && cut > 0.055) val = kMoon;
        if (std::hypot(u - sx, v - sy) <= 0.045) val = kStar;
      }
      const double eu = (u - bdx) / p.bust_rx;
      const double ev = (v - bdy) / p.bust_ry;
      if (eu * eu + ev * ev <= 1.0) val = kBust;
      const double hr = std::hypot(u - head_x, v - head_y);
      if (hr <= p.head_radius) val = kHead;
      if (hr >= crown_r && hr <= crown_r + 0.045 &&
          angular_gap(angle_deg(u - head_x, v - head_y), 90.0) <= p.crown_span / 2.0) {
        val = kCrown;
      }
      px[r * size + c] = val;
    }
  }

  // Id-number marks in the lower-right corner, well clear of the disk.
  if (cfg.max_digit_marks > 0) {
    const std::size_t marks = 1 + static_cast<std::size_t>(rng.below(cfg.max_digit_marks));
    const std::size_t row0 = size - 9;
    for (std::size_t j = 0; j < marks; ++j) {
      const auto& glyph = kGlyphs[rng.below(kGlyphs.size())];
      if (size < 8 + 5 * (j + 1)) break;
      const std::size_t col0 = size - 7 - 5 * (j + 1);
      bool clear = true;
      for (std::size_t gr = 0; gr < 5 && clear; ++gr) {
        for (std::size_t gc = 0; gc < 3; ++gc) {
          const double d = std::hypot(static_cast<double>(col0 + gc) + 0.5 - cx,
                                      static_cast<double>(row0 + gr) + 0.5 - cy);
          if (d < radius + 6.0) clear = false;
        }
      }
      if (!clear) break;
      for (std::size_t gr = 0; gr < 5; ++gr) {
        for (std::size_t gc = 0; gc < 3; ++gc) {
          if (glyph[gr][gc] == '#') px[(row0 + gr) * size + col0 + gc] = kDigit;
        }
      }
    }
  }

  if (cfg.noise > 0.0) {
    for (double& value : px) value = std::clamp(value + cfg.noise * rng.normal(), 0.0, 1.0);
  }
  return GrayImage(size, size, std::move(px));
}

LabeledDataset synthesize(const SynthConfig& cfg) {
  cfg.validate();
  LabeledDataset ds;
  for (std::size_t k = 0; k < cfg.counts.size(); ++k) {
    const CoinPattern pattern = k < cfg.patterns.size() ? cfg.patterns[k] : default_pattern(k);
    DatasetClass cls;
    cls.name = cfg.class_names[k];
    for (std::size_t i = 0; i < cfg.counts[k]; ++i) {
      Rng rng(derive_seed(derive_seed(cfg.seed, k), i));
      cls.images.push_back({render_coin(pattern, cfg, rng),
                            "synthetic:" + cls.name + ":" + std::to_string(i), Split::Train});
    }
    ds.add_class(std::move(cls));
  }
  return ds;
}

namespace {

nlohmann::json pattern_to_json(const CoinPattern& p) {
  return {{"bust_dx", p.bust_dx},         {"bust_dy", p.bust_dy},
          {"bust_rx", p.bust_rx},         {"bust_ry", p.bust_ry},
          {"head_radius", p.head_radius}, {"rim_count", p.rim_count},
          {"star_angles", p.star_angles}, {"crown_gap", p.crown_gap},
          {"crown_span", p.crown_span},   {"legend_start", p.legend_start},
          {"legend_span", p.legend_span}, {"legend_ticks", p.legend_ticks}};
}

CoinPattern pattern_from_json(const nlohmann::json& j, std::size_t index) {
  CoinPattern p = default_pattern(index);
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  read("bust_dx", p.bust_dx);
  read("bust_dy", p.bust_dy);
  read("bust_rx", p.bust_rx);
  read("bust_ry", p.bust_ry);
  read("head_radius", p.head_radius);
  read("rim_count", p.rim_count);
  read("star_angles", p.star_angles);
  read("crown_gap", p.crown_gap);
  read("crown_span", p.crown_span);
  read("legend_start", p.legend_start);
  read("legend_span", p.legend_span);
  read("legend_ticks", p.legend_ticks);
  return p;
}

}  // namespace

nlohmann::json to_json(const SynthConfig& cfg) {
  nlohmann::json j{{"class_names", cfg.class_names}, {"counts", cfg.counts},
                   {"image_size", cfg.image_size},   {"noise", cfg.noise},
                   {"jitter", cfg.jitter},           {"max_digit_marks", cfg.max_digit_marks},
                   {"seed", cfg.seed}};
  j["patterns"] = nlohmann::json::array();
  for (const CoinPattern& p : cfg.patterns) j["patterns"].push_back(pattern_to_json(p));
  return j;
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig cfg;
  try {
    cfg.counts = j.at("counts").get<std::vector<std::size_t>>();
    if (j.contains("class_names")) {
      cfg.class_names = j["class_names"].get<std::vector<std::string>>();
    } else {
      for (std::size_t k = 0; k < cfg.counts.size(); ++k) {
        cfg.class_names.push_back("class_" + std::to_string(k + 1));
      }
    }
    if (j.contains("image_size")) cfg.image_size = j["image_size"].get<std::size_t>();
    if (j.contains("noise")) cfg.noise = j["noise"].get<double>();
    if (j.contains("jitter")) cfg.jitter = j["jitter"].get<double>();
    if (j.contains("max_digit_marks")) cfg.max_digit_marks = j["max_digit_marks"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("patterns")) {
      std::size_t i = 0;
      for (const auto& jp : j["patterns"]) cfg.patterns.push_back(pattern_from_json(jp, i++));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("synth config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SynthConfig tenth_scale_preset(std::uint64_t seed, double noise) {
  SynthConfig cfg;
  cfg.class_names = {"khosrow_i", "khosrow_ii", "hormozd_iv", "hormozd_v"};
  cfg.counts = {5, 49, 10, 1};
  cfg.noise = noise;
  cfg.seed = seed;
  return cfg;
}

}  // namespace eigencoin
