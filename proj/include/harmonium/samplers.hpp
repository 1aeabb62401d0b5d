#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "harmonium/model.hpp"
#include "harmonium/rng.hpp"

namespace harmonium {

/// Below this |λ| the truncated exponential is sampled as its uniform limit.
inline constexpr double kExponentialRateEpsilon = 1e-9;

/// Tangent point of the exponential envelope in the truncated-gamma rejection sampler.
enum class EnvelopeAnchor {
  /// Tangent at x = 1: the envelope e^{(α-1-β)x} / e^{α-1}.
  unit,
  /// Tangent at the untruncated mean α/β clamped into [t_lower, 1]; identical to `unit`
  /// whenever β <= 0 or α/β >= 1.
  adaptive,
};

struct RejectionOptions {
  std::uint64_t max_iterations = 1'000'000;
  EnvelopeAnchor anchor = EnvelopeAnchor::adaptive;
};

/// Returns 1 with probability sigmoid(logit).
int sample_bernoulli_sigmoid(double logit, RngStream& rng);

/// Draws from λ e^{-λx} / (1 - e^{-tλ}) on [0, t]; λ may take either sign.
double sample_truncated_exponential(double lambda, double t, RngStream& rng);

/// ln of the rejection sampler's acceptance probability, (α-1)(ln(x/x0) - x/x0 + 1).
double log_acceptance_probability(double x, double alpha, double anchor = 1.0);

/// Draws from the gamma density x^{α-1} e^{-βx} renormalized to [t_lower, 1].
/// α = 1 is sampled by inverse CDF; α > 1 by exponential-envelope rejection.
/// Throws SamplerError when the iteration cap is reached.
double sample_interval_truncated_gamma(const GammaParams& p, double t_lower, RngStream& rng,
                                       const RejectionOptions& options = {});

double sample_gaussian(double mu, double sigma, RngStream& rng);

/// One unconstrained draw x ~ p(x | h).
VisibleState gibbs_visible_step(std::span<const double> h, const ModelParameters& theta,
                                RngStream& rng, const RejectionOptions& options = {});

/// One draw x ~ p(x | h, o): observed entries are clamped, censored times are drawn from
/// [ξ, 1], and missing binary/numeric entries come from their full conditional.
VisibleState gibbs_visible_step(std::span<const double> h, const ModelParameters& theta,
                                const Observation& constraint, RngStream& rng,
                                const RejectionOptions& options = {});

/// h_j ~ Bernoulli(sigmoid(-φ_j)) independently; returned as 0.0 / 1.0.
std::vector<double> gibbs_latent_step(const VisibleState& x, const ModelParameters& theta,
                                      RngStream& rng);

}  // namespace harmonium
