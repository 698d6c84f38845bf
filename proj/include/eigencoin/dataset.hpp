#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eigencoin/imaging.hpp"

namespace eigencoin {

enum class Split { Train, Test };

struct DatasetImage {
  GrayImage image;
  std::string source;  // file path or synthetic id
  Split split = Split::Train;
};

struct DatasetClass {
  std::string name;
  std::vector<DatasetImage> images;
  /// Explicit train size that overrides the split fraction.
  std::optional<std::size_t> train_count;
};

/// An image paired with a 0-based class index.
struct Sample {
  GrayImage image;
  std::size_t label = 0;
};

/// Class-partitioned images. Class indices are positions in `classes()`.
class LabeledDataset {
public:
  /// Throws InvalidDataset on a duplicate or empty name.
  void add_class(DatasetClass cls);

  const std::vector<DatasetClass>& classes() const noexcept { return classes_; }
  std::vector<DatasetClass>& classes() noexcept { return classes_; }
  std::size_t class_count() const noexcept { return classes_.size(); }
  std::vector<std::string> class_names() const;
  std::vector<std::size_t> class_sizes() const;
  std::vector<std::size_t> split_sizes(Split which) const;

  /// Images of one split in class order, then file order.
  std::vector<Sample> samples(Split which) const;

private:
  std::vector<DatasetClass> classes_;
};

/// Per-class train size: explicit override, otherwise round-half-up of
/// fraction * n, at least 1 when n >= 1.
std::size_t train_size(std::size_t class_size, double fraction,
                       std::optional<std::size_t> override_count = std::nullopt);

/// Stratified split: each class is shuffled with a seed derived from
/// (seed, class index); the first train_size() images go to train.
LabeledDataset split(const LabeledDataset& ds, double fraction, std::uint64_t seed);

struct ManifestClass {
  std::string name;
  std::string dir;
  std::optional<std::size_t> train_count;
};

struct DatasetManifest {
  std::vector<ManifestClass> classes;
  double fraction = 0.7;
  std::uint64_t seed = 0;
};

/// Parses {classes:[{name, dir, train_count?}], fraction, seed}.
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Decodes every image file in each class directory (relative to `root`),
/// in lexicographic file-name order. No split is applied.
LabeledDataset load(const std::filesystem::path& root, const DatasetManifest& manifest);

/// Sorted image files directly inside `dir`.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace eigencoin
