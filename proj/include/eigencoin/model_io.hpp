#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "eigencoin/classify.hpp"

namespace eigencoin {

constexpr int kModelFormatVersion = 1;

/// Model file layout:
///
///   bytes 0..7    magic "ECMODEL1"
///   bytes 8..15   manifest length L, uint64 little-endian
///   next L bytes  JSON manifest (format_version, N, M, K, normalized_size,
///                 preprocess, classifier, byte order, scalar type, layout,
///                 section table)
///   remainder     binary sections in manifest order; float64 or int64,
///                 little-endian, matrices row-major
///
/// For EigenCoin the sections start with mean, basis (K x N) and
/// eigenvalues, followed by the gallery (G x K) and its labels.
std::string serialize_model(const ClassifierModel& model,
                            const nlohmann::json& run_config = nlohmann::json::object());
ClassifierModel deserialize_model(const std::string& bytes);

/// Manifest of a serialized model, without decoding the payload.
nlohmann::json read_model_manifest(const std::string& bytes);

void save_model(const std::filesystem::path& path, const ClassifierModel& model,
                const nlohmann::json& run_config = nlohmann::json::object());
ClassifierModel load_model(const std::filesystem::path& path);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace eigencoin
