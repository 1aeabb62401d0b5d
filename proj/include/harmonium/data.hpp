#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "harmonium/model.hpp"
#include "harmonium/training.hpp"

namespace harmonium {

enum class ColumnKind { categorical, binary, numeric, time, event_indicator, ignore };

std::string_view to_string(ColumnKind kind);
ColumnKind parse_column_kind(std::string_view text);

struct ColumnDeclaration {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  /// For time columns: name of the linked event-indicator column.
  std::string indicator;
};

/// Sidecar declaration mapping CSV columns to kinds.
struct SchemaDeclaration {
  std::vector<ColumnDeclaration> columns;
  std::string missing_sentinel = "NA";

  /// Throws DataError on duplicate names, unlinked time columns, or dangling indicators.
  void validate() const;
  const ColumnDeclaration* find(std::string_view name) const;

  static SchemaDeclaration from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static SchemaDeclaration load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::string indicator;
  /// Parsed values for every kind except categorical.
  std::vector<double> numbers;
  /// Labels for categorical columns.
  std::vector<std::string> labels;
  std::vector<std::uint8_t> missing;

  std::size_t size() const noexcept { return missing.size(); }
};

/// Column-oriented table with typed columns, in declaration order (ignored columns dropped).
struct RawDataset {
  std::vector<RawColumn> columns;

  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
  const RawColumn& column(std::string_view name) const;
  RawDataset select_rows(std::span<const std::size_t> rows) const;
};

/// Parses comma-separated text with a header row. Empty cells and the sentinel become missing.
/// Throws DataError for malformed rows (reported with line numbers), undeclared columns, and
/// non-binary indicator or binary values.
RawDataset parse_csv(std::istream& in, const SchemaDeclaration& declaration,
                     const std::string& source = "<input>");
RawDataset ingest_csv(const std::filesystem::path& path, const SchemaDeclaration& declaration);

/// Writes the dataset back as CSV using the sentinel for missing cells; values round-trip exactly.
void write_csv(std::ostream& out, const RawDataset& data, const std::string& missing_sentinel = "NA");
void write_csv(const std::filesystem::path& path, const RawDataset& data,
               const std::string& missing_sentinel = "NA");

struct PreprocessOptions {
  /// Drop binary features that are on (or off) in more than `low_variance_threshold` of rows.
  bool drop_low_variance = false;
  double low_variance_threshold = 0.95;
  /// When set, observed event times of exactly 0 are clamped to this value instead of rejected.
  std::optional<double> time_epsilon;
};

/// Censoring times at or beyond the horizon are stored just below it.
inline constexpr double kMaxCensoringTime = 1.0 - 1e-9;

/// Statistics frozen on a training split.
struct PreprocessState {
  struct Binary {
    std::string name;
    bool kept = true;
    double median = 0.0;
  };
  struct Categorical {
    std::string name;
    std::vector<std::string> categories;
    std::vector<std::uint8_t> kept;
    std::vector<double> medians;
  };
  struct Time {
    std::string name;
    std::string indicator;
    double horizon = 1.0;
    double median = 0.5;  ///< scaled
  };
  struct Numeric {
    std::string name;
    double mean = 0.0;
    double sd = 1.0;  ///< population (divisor n)
    double median = 0.0;  ///< standardized
  };

  std::vector<Binary> binaries;
  std::vector<Categorical> categoricals;
  std::vector<Time> times;
  std::vector<Numeric> numerics;
  PreprocessOptions options;

  /// Schema of the produced observations: binaries then dummies (A), times (B), numerics (C).
  VariableSchema schema() const;
  /// Training medians aligned with schema().
  ImputationValues imputation() const;

  double scale_time(std::size_t time_index, double raw) const;
  double unscale_time(std::size_t time_index, double scaled) const;
  double standardize(std::size_t numeric_index, double raw) const;
  double unstandardize(std::size_t numeric_index, double z) const;

  nlohmann::json to_json() const;
  static PreprocessState from_json(const nlohmann::json& j);
};

/// Fits horizons (max recorded time per time column), population mean/sd per numeric column,
/// sorted category lists, and medians. Throws DataError for all-missing or zero-variance columns.
PreprocessState fit_preprocess(const RawDataset& raw, const PreprocessOptions& options = {});

struct PreparedData {
  VariableSchema schema;
  std::vector<Observation> observations;
  std::size_t unseen_categories = 0;
  std::size_t clamped_times = 0;
};

PreparedData apply_preprocess(const RawDataset& raw, const PreprocessState& state);

/// Seeded k-fold partition of 0..n-1 into (train, test) index pairs; fold sizes differ by <= 1.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_split(
    std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace harmonium
