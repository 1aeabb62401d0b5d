#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "harmonium/cli/archive.hpp"
#include "harmonium/data.hpp"
#include "harmonium/inference.hpp"
#include "harmonium/training.hpp"

namespace harmonium::cli {

/// Parses arguments, runs one subcommand, and returns the process exit code.
int run(int argc, const char* const* argv);

/// Fits preprocessing on `raw`, trains, and packages the result.
ModelArchive train_model(const RawDataset& raw, const TrainConfig& config, const PreprocessOptions& options,
                         const EpochCallback& on_epoch = {});

struct RiskRequest {
  std::string target;
  /// Raw time units; defaults to half the target's horizon.
  std::optional<double> time;
  std::vector<std::string> marginalize;
  InferenceOptions inference;
  std::size_t threads = 1;
};

/// Predicted survival S(t | other variables) per row of `raw`.
std::vector<double> predict_survival(const ModelArchive& archive, const RawDataset& raw, const RiskRequest& request);

struct EvaluationResult {
  double c_index = 0.0;
  double brier = 0.0;
  double time = 0.0;
  std::size_t n = 0;
};

/// C-index and IPCW Brier of the archive's predictions against the raw labels of the target.
EvaluationResult evaluate_model(const ModelArchive& archive, const RawDataset& raw, const RiskRequest& request);

/// Seeded k-fold: preprocessing and training see only the training folds.
std::vector<EvaluationResult> cross_validate(const RawDataset& raw, const TrainConfig& config,
                                             const PreprocessOptions& options, const RiskRequest& request,
                                             std::size_t k, std::uint64_t seed);

}  // namespace harmonium::cli
