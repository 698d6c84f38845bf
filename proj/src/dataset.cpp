#include "eigencoin/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "eigencoin/error.hpp"
#include "eigencoin/image_io.hpp"
#include "eigencoin/random.hpp"

namespace eigencoin {

void LabeledDataset::add_class(DatasetClass cls) {
  if (cls.name.empty()) throw InvalidDataset("class name must not be empty");
  for (const DatasetClass& existing : classes_) {
    if (existing.name == cls.name) {
      throw InvalidDataset("duplicate class name '" + cls.name + "'");
    }
  }
  classes_.push_back(std::move(cls));
}

std::vector<std::string> LabeledDataset::class_names() const {
  std::vector<std::string> names;
  for (const DatasetClass& c : classes_) names.push_back(c.name);
  return names;
}

std::vector<std::size_t> LabeledDataset::class_sizes() const {
  std::vector<std::size_t> sizes;
  for (const DatasetClass& c : classes_) sizes.push_back(c.images.size());
  return sizes;
}

std::vector<std::size_t> LabeledDataset::split_sizes(Split which) const {
  std::vector<std::size_t> sizes;
  for (const DatasetClass& c : classes_) {
    sizes.push_back(static_cast<std::size_t>(
        std::count_if(c.images.begin(), c.images.end(),
                      [&](const DatasetImage& im) { return im.split == which; })));
  }
  return sizes;
}

std::vector<Sample> LabeledDataset::samples(Split which) const {
  std::vector<Sample> out;
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    for (const DatasetImage& im : classes_[k].images) {
      if (im.split == which) out.push_back({im.image, k});
    }
  }
  return out;
}

std::size_t train_size(std::size_t class_size, double fraction,
                       std::optional<std::size_t> override_count) {
  if (override_count) {
    if (*override_count > class_size) {
      throw InvalidDataset("train_count " + std::to_string(*override_count) +
                           " exceeds class size " + std::to_string(class_size));
    }
    return *override_count;
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidParameter("split fraction must lie in (0,1)");
  }
  if (class_size == 0) return 0;
  // Guard keeps exact halves (e.g. 0.7 * 5) rounding up despite 0.7's
  // binary representation.
  const auto n = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(class_size) + 0.5 + 1e-9));
  return std::clamp<std::size_t>(n, 1, class_size);
}

LabeledDataset split(const LabeledDataset& ds, double fraction, std::uint64_t seed) {
  LabeledDataset out = ds;
  for (std::size_t k = 0; k < out.class_count(); ++k) {
    DatasetClass& cls = out.classes()[k];
    const std::size_t n_train = train_size(cls.images.size(), fraction, cls.train_count);
    std::vector<std::size_t> order(cls.images.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, k));
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i = 0; i < order.size(); ++i) {
      cls.images[order[i]].split = i < n_train ? Split::Train : Split::Test;
    }
  }
  return out;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  DatasetManifest m;
  try {
    if (!j.is_object() || !j.contains("classes") || !j["classes"].is_array()) {
      throw InvalidDataset("manifest " + path.string() + " has no 'classes' array");
    }
    for (const auto& c : j["classes"]) {
      ManifestClass mc;
      mc.name = c.at("name").get<std::string>();
      mc.dir = c.contains("dir") ? c["dir"].get<std::string>() : mc.name;
      if (c.contains("train_count") && !c["train_count"].is_null()) {
        mc.train_count = c["train_count"].get<std::size_t>();
      }
      m.classes.push_back(std::move(mc));
    }
    if (j.contains("fraction")) m.fraction = j["fraction"].get<double>();
    if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
  if (!(m.fraction > 0.0 && m.fraction < 1.0)) {
    throw InvalidParameter("manifest fraction must lie in (0,1)");
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  nlohmann::json j;
  j["classes"] = nlohmann::json::array();
  for (const ManifestClass& c : manifest.classes) {
    nlohmann::json jc{{"name", c.name}, {"dir", c.dir}};
    if (c.train_count) jc["train_count"] = *c.train_count;
    j["classes"].push_back(jc);
  }
  j["fraction"] = manifest.fraction;
  j["seed"] = manifest.seed;
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw LoadError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

LabeledDataset load(const std::filesystem::path& root, const DatasetManifest& manifest) {
  if (manifest.classes.empty()) throw InvalidDataset("manifest lists no classes");
  std::set<std::string> names;
  for (const ManifestClass& mc : manifest.classes) {
    if (!names.insert(mc.name).second) {
      throw InvalidDataset("duplicate class name '" + mc.name + "' in manifest");
    }
  }
  LabeledDataset ds;
  for (const ManifestClass& mc : manifest.classes) {
    DatasetClass cls;
    cls.name = mc.name;
    cls.train_count = mc.train_count;
    for (const auto& file : list_images(root / mc.dir)) {
      cls.images.push_back({read_image(file), file.string(), Split::Train});
    }
    if (cls.images.empty()) {
      throw InvalidDataset("class '" + mc.name + "' has no images in " + (root / mc.dir).string());
    }
    ds.add_class(std::move(cls));
  }
  return ds;
}

}  // namespace eigencoin
