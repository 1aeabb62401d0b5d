#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "harmonium/model.hpp"
#include "harmonium/rng.hpp"
#include "harmonium/training.hpp"

namespace harmonium {

enum class MarginalizationMethod {
  /// Enumerate latent states; per state the visible integral factorizes in closed form.
  exact_latent,
  /// Sum latent states analytically, integrate unobserved continuous variables by
  /// tensor-product Gauss-Legendre quadrature.
  numeric_visible,
  /// exact_latent when n_hidden < automatic_threshold, numeric_visible otherwise.
  automatic,
};

struct InferenceOptions {
  MarginalizationMethod method = MarginalizationMethod::automatic;
  std::size_t automatic_threshold = 10;
  std::size_t max_exact_hidden = 25;
  std::size_t max_numeric_dimensions = 4;
  std::size_t quadrature_nodes = 64;
};

/// ln Σ_h e^{-E(x,h)} = -E_visible(x) + Σ_j softplus(-φ_j(x)).
double log_unnormalized_marginal(const VisibleState& x, const ModelParameters& theta);

/// ln ∫dx Σ_h e^{-E(x,h)} χ(x, o), up to the θ-dependent constant ln Z.
/// Throws CapacityError when the chosen method exceeds its configured size limit.
double log_observation_weight(const Observation& o, const ModelParameters& theta,
                              const InferenceOptions& options = {});

/// Predicted survival of one time variable, S(t | o_{-target}).
struct RiskQuery {
  std::size_t target = 0;
  /// Scaled evaluation time.
  double time = 0.5;
  /// Observation of the other variables; the target entry is ignored.
  Observation conditioning;
  /// Time variables integrated away by censoring them at zero.
  std::vector<std::size_t> marginalize_out;
};

/// Ratio of observation weights with the target censored at t and at 0; lies in [0,1].
double risk_score(const RiskQuery& query, const ModelParameters& theta,
                  const InferenceOptions& options = {});

/// Posterior mean of the latent units. Fully observed input gives p(h = 1 | ξ) exactly;
/// otherwise μ is averaged over n_gibbs constrained Gibbs sweeps.
std::vector<double> latent_embedding(const Observation& o, const ModelParameters& theta,
                                     std::size_t n_gibbs, RngStream& rng,
                                     const std::optional<ImputationValues>& fill = std::nullopt);

}  // namespace harmonium
