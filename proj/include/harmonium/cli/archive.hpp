#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "harmonium/data.hpp"
#include "harmonium/model.hpp"
#include "harmonium/training.hpp"

namespace harmonium::cli {

inline constexpr int kArchiveVersion = 1;

struct ModelArchive {
  int version = kArchiveVersion;
  VariableSchema schema;
  PreprocessState preprocess;
  ModelParameters parameters;
  TrainConfig config;
  std::size_t epochs_completed = 0;
  /// Last epoch record, if any epochs ran.
  std::vector<EpochRecord> log_tail;
  std::uint64_t seed = 0;
};

/// Base64 of the little-endian IEEE-754 bytes.
std::string encode_tensor(std::span<const double> values);
/// Throws FormatError on malformed text or a length mismatch.
std::vector<double> decode_tensor(std::string_view text, std::size_t expected);

nlohmann::json to_json(const ModelArchive& archive);
/// Throws FormatError for missing fields or a version other than kArchiveVersion.
ModelArchive archive_from_json(const nlohmann::json& j);

std::string serialize(const ModelArchive& archive);
void save_archive(const std::filesystem::path& path, const ModelArchive& archive);
ModelArchive load_archive(const std::filesystem::path& path);

}  // namespace harmonium::cli
