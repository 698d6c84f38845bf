#include "eigencoin/model_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "eigencoin/config.hpp"
#include "eigencoin/error.hpp"

namespace eigencoin {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'E', 'C', 'M', 'O', 'D', 'E', 'L', '1'};

template <typename T>
void append_le(std::string& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <typename T>
T read_le(const std::string& in, std::size_t offset) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

/// Collects named row-major sections and their table entries.
class SectionWriter {
public:
  void add_matrix(const std::string& name, const Eigen::MatrixXd& m) {
    begin(name, "float64", m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) append_le<double>(payload_, m(r, c));
    }
  }
  void add_vector(const std::string& name, const Eigen::VectorXd& v) {
    begin(name, "float64", 1, v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) append_le<double>(payload_, v(i));
  }
  void add_rows(const std::string& name, const std::vector<Eigen::VectorXd>& rows) {
    const Eigen::Index cols = rows.empty() ? 0 : rows.front().size();
    begin(name, "float64", static_cast<Eigen::Index>(rows.size()), cols);
    for (const auto& row : rows) {
      for (Eigen::Index i = 0; i < row.size(); ++i) append_le<double>(payload_, row(i));
    }
  }
  void add_indices(const std::string& name, const std::vector<std::size_t>& values) {
    begin(name, "int64", 1, static_cast<Eigen::Index>(values.size()));
    for (std::size_t v : values) append_le<std::int64_t>(payload_, static_cast<std::int64_t>(v));
  }

  json table() const { return table_; }
  const std::string& payload() const { return payload_; }

private:
  void begin(const std::string& name, const char* dtype, Eigen::Index rows, Eigen::Index cols) {
    table_.push_back({{"name", name},
                      {"dtype", dtype},
                      {"rows", rows},
                      {"cols", cols},
                      {"offset", payload_.size()}});
  }

  json table_ = json::array();
  std::string payload_;
};

class SectionReader {
public:
  SectionReader(const std::string& bytes, std::size_t base, const json& table)
      : bytes_(bytes), base_(base) {
    for (const auto& entry : table) {
      entries_[entry.at("name").get<std::string>()] = entry;
    }
  }

  bool has(const std::string& name) const { return entries_.count(name) > 0; }

  Eigen::MatrixXd matrix(const std::string& name) const {
    const auto [rows, cols, offset] = locate(name, "float64");
    Eigen::MatrixXd m(rows, cols);
    std::size_t pos = offset;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c, pos += 8) m(r, c) = read_le<double>(bytes_, pos);
    }
    return m;
  }
  Eigen::VectorXd vector(const std::string& name) const {
    const Eigen::MatrixXd m = matrix(name);
    if (m.rows() != 1) throw FormatError("model section '" + name + "' is not a vector");
    return m.row(0).transpose();
  }
  std::vector<Eigen::VectorXd> rows(const std::string& name) const {
    const Eigen::MatrixXd m = matrix(name);
    std::vector<Eigen::VectorXd> out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(m.row(r).transpose());
    return out;
  }
  std::vector<std::size_t> indices(const std::string& name) const {
    const auto [rows, cols, offset] = locate(name, "int64");
    std::vector<std::size_t> out;
    std::size_t pos = offset;
    for (Eigen::Index i = 0; i < rows * cols; ++i, pos += 8) {
      const auto v = read_le<std::int64_t>(bytes_, pos);
      if (v < 0) throw FormatError("model section '" + name + "' holds a negative index");
      out.push_back(static_cast<std::size_t>(v));
    }
    return out;
  }

private:
  struct Location {
    Eigen::Index rows;
    Eigen::Index cols;
    std::size_t offset;
  };

  Location locate(const std::string& name, const char* dtype) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw FormatError("model file lacks section '" + name + "'");
    const json& e = it->second;
    if (e.at("dtype").get<std::string>() != dtype) {
      throw FormatError("model section '" + name + "' has unexpected dtype");
    }
    const auto rows = e.at("rows").get<Eigen::Index>();
    const auto cols = e.at("cols").get<Eigen::Index>();
    const std::size_t offset = base_ + e.at("offset").get<std::size_t>();
    if (rows < 0 || cols < 0 ||
        offset + static_cast<std::size_t>(rows * cols) * 8 > bytes_.size()) {
      throw FormatError("model section '" + name + "' is truncated");
    }
    return {rows, cols, offset};
  }

  const std::string& bytes_;
  std::size_t base_;
  std::map<std::string, json> entries_;
};

}  // namespace

std::string serialize_model(const ClassifierModel& model, const json& run_config) {
  SectionWriter sections;
  json manifest;
  manifest["format_version"] = kModelFormatVersion;
  manifest["byte_order"] = "little-endian";
  manifest["scalar"] = "float64";
  manifest["layout"] = "row-major";
  manifest["method"] = std::string(to_string(model.config().method));
  manifest["normalized_size"] = model.preprocess().normalized_size;
  manifest["preprocess"] = to_json(model.preprocess());
  manifest["classifier"] = to_json(model.config());
  manifest["class_names"] = model.class_names();
  manifest["gallery_size"] = model.gallery().size();
  manifest["feature_length"] = model.feature_length();
  manifest["N"] = model.preprocess().normalized_size * model.preprocess().normalized_size;
  manifest["M"] = model.gallery().size();
  manifest["K"] = nullptr;

  if (const Manifold* m = model.manifold()) {
    manifest["N"] = m->dim();
    manifest["M"] = m->training_count();
    manifest["K"] = m->components();
    manifest["rank"] = m->rank();
    sections.add_vector("mean", m->mean());
    sections.add_matrix("basis", m->basis().transpose());
    sections.add_vector("eigenvalues", m->eigenvalues());
    sections.add_vector("total_energy", Eigen::VectorXd::Constant(1, m->total_energy()));
  } else if (const BdpcaModel* b = model.bdpca()) {
    sections.add_matrix("bdpca_mean", b->mean);
    sections.add_matrix("row_projector", b->row_projector);
    sections.add_matrix("col_projector", b->col_projector);
    sections.add_vector("row_eigenvalues", b->row_eigenvalues);
    sections.add_vector("col_eigenvalues", b->col_eigenvalues);
  }
  sections.add_rows("gallery", model.gallery());
  sections.add_indices("labels", model.labels());
  sections.add_vector("spectrum", model.spectrum());
  sections.add_vector("epsilon", Eigen::VectorXd::Constant(1, model.epsilon()));
  if (!model.corner_counts().empty()) sections.add_indices("corner_counts", model.corner_counts());
  manifest["sections"] = sections.table();
  manifest["run_config"] = run_config;

  const std::string header = manifest.dump();
  std::string out(kMagic, sizeof(kMagic));
  append_le<std::uint64_t>(out, header.size());
  out += header;
  out += sections.payload();
  return out;
}

json read_model_manifest(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not an eigencoin model file");
  }
  const auto len = read_le<std::uint64_t>(bytes, 8);
  if (16 + len > bytes.size()) throw FormatError("model manifest is truncated");
  json manifest;
  try {
    manifest = json::parse(bytes.substr(16, len));
  } catch (const json::exception& e) {
    throw FormatError(std::string("model manifest is not valid JSON: ") + e.what());
  }
  if (manifest.value("format_version", 0) != kModelFormatVersion) {
    throw FormatError("unsupported model format version");
  }
  if (manifest.value("byte_order", "") != "little-endian" ||
      manifest.value("scalar", "") != "float64" || manifest.value("layout", "") != "row-major") {
    throw FormatError("unsupported model encoding");
  }
  return manifest;
}

ClassifierModel deserialize_model(const std::string& bytes) {
  const json manifest = read_model_manifest(bytes);
  const std::size_t base = 16 + read_le<std::uint64_t>(bytes, 8);
  try {
    const SectionReader sections(bytes, base, manifest.at("sections"));
    const PreprocessConfig preprocess = preprocess_from_json(manifest.at("preprocess"));
    const ClassifierConfig cfg = classifier_from_json(manifest.at("classifier"));
    auto names = manifest.at("class_names").get<std::vector<std::string>>();

    ClassifierModel::Trained trained;
    if (cfg.method == Method::EigenCoin) {
      Eigen::MatrixXd basis = sections.matrix("basis").transpose();
      trained = Manifold(sections.vector("mean"), std::move(basis), sections.vector("eigenvalues"),
                         manifest.at("M").get<std::size_t>(), manifest.at("rank").get<std::size_t>(),
                         sections.vector("total_energy")(0));
    } else if (cfg.method == Method::Bdpca) {
      BdpcaModel b;
      b.mean = sections.matrix("bdpca_mean");
      b.row_projector = sections.matrix("row_projector");
      b.col_projector = sections.matrix("col_projector");
      b.row_eigenvalues = sections.vector("row_eigenvalues");
      b.col_eigenvalues = sections.vector("col_eigenvalues");
      trained = std::move(b);
    }
    std::vector<std::size_t> corners;
    if (sections.has("corner_counts")) corners = sections.indices("corner_counts");
    return ClassifierModel(cfg, preprocess, std::move(names), std::move(trained),
                           sections.rows("gallery"), sections.indices("labels"),
                           sections.vector("spectrum"), sections.vector("epsilon")(0),
                           std::move(corners));
  } catch (const json::exception& e) {
    throw FormatError(std::string("model manifest: ") + e.what());
  }
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LoadError("write failed for " + path.string());
}

void save_model(const std::filesystem::path& path, const ClassifierModel& model,
                const json& run_config) {
  write_file_bytes(path, serialize_model(model, run_config));
}

ClassifierModel load_model(const std::filesystem::path& path) {
  return deserialize_model(read_file_bytes(path));
}

}  // namespace eigencoin
