#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "harmonium/data.hpp"
#include "harmonium/model.hpp"

namespace harmonium {

struct XorMode {
  std::array<double, 2> center{};
  int color = 0;
  std::array<GammaParams, 2> gamma{};
};

/// Two-dimensional survival distribution: four equally weighted modes, each a product of
/// right-truncated gammas, with a binary color per mode.
struct XorSpec {
  std::array<XorMode, 4> modes{};
  std::size_t n_samples = 1000;
  double censor_threshold = 0.75;
  double censor_prob = 0.75;
  std::uint64_t seed = 0;

  /// Rates derived from the mode locations: β = (α-1)/v, with α = 8.1 at 1/4 and 29 at 3/4.
  static XorSpec defaults();
  /// The literal (α, β) pairs (8.1, 58) at 1/4 and (29, 76) at 3/4.
  static XorSpec literal_rates();
  void validate() const;
};

/// Generated samples plus ground truth. Schema: `color` (binary), `t1`, `t2` (time, horizon 1).
struct SyntheticData {
  VariableSchema schema;
  std::vector<Observation> observations;
  std::vector<std::array<double, 2>> event_times;
  std::vector<int> modes;

  /// Columns color, t1, e1, t2, e2 with recorded (possibly censored) times.
  RawDataset raw() const;
  SchemaDeclaration declaration() const;
  double censored_fraction() const;
};

VariableSchema xor_schema();

SyntheticData generate_xor(const XorSpec& spec);

/// (1/4) Σ over modes of the given color of the product of the coordinate densities.
double xor_reference_density(int color, double t1, double t2, const XorSpec& spec);

/// Two survival times that share a latent mode, with a weakly informative binary covariate.
/// Knowing t2 reveals the mode and therefore carries information about t1.
struct CorrelatedSurvivalSpec {
  std::size_t n_samples = 1000;
  /// P(color = mode index).
  double covariate_agreement = 0.6;
  std::array<double, 2> centers{0.25, 0.7};
  double shape = 12.0;
  double censor_threshold = 0.75;
  double censor_prob = 0.75;
  std::uint64_t seed = 0;

  void validate() const;
};

SyntheticData generate_correlated_survival(const CorrelatedSurvivalSpec& spec);

}  // namespace harmonium
