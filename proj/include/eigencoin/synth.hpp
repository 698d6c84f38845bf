#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "eigencoin/dataset.hpp"
#include "eigencoin/random.hpp"

namespace eigencoin {

/// Geometry of one synthetic coin type. Lengths are in units of the coin
/// radius, angles in degrees counter-clockwise from the +x axis.
struct CoinPattern {
  double bust_dx = 0.0;
  double bust_dy = 0.2;
  double bust_rx = 0.32;
  double bust_ry = 0.38;
  double head_radius = 0.16;
  std::size_t rim_count = 1;
  std::array<double, 3> star_angles{210.0, 330.0, 90.0};
  double crown_gap = 0.05;
  double crown_span = 120.0;
  double legend_start = 20.0;
  double legend_span = 140.0;
  std::size_t legend_ticks = 10;
};

struct SynthConfig {
  std::vector<std::string> class_names;
  std::vector<std::size_t> counts;
  /// One per class; missing entries fall back to default_pattern(i).
  std::vector<CoinPattern> patterns;
  std::size_t image_size = 128;
  double noise = 0.02;
  double jitter = 1.0;  // pixels
  std::size_t max_digit_marks = 3;
  std::uint64_t seed = 1;

  void validate() const;
};

CoinPattern default_pattern(std::size_t class_index);

/// Renders one coin: dark background, disk, rims, legend ticks, three
/// star-moon marks, bust, crown arc, plus id-number marks outside the disk.
GrayImage render_coin(const CoinPattern& pattern, const SynthConfig& cfg, Rng& rng);

/// Deterministic for a given config; image i of class k uses its own
/// derived seed.
LabeledDataset synthesize(const SynthConfig& cfg);

nlohmann::json to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const nlohmann::json& j);

/// Four classes in the 51/490/99/4 reference proportions at one tenth scale:
/// (5, 49, 10, 1).
SynthConfig tenth_scale_preset(std::uint64_t seed = 1, double noise = 0.02);

}  // namespace eigencoin
