#include "harmonium/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "harmonium/error.hpp"
#include "harmonium/special_functions.hpp"

namespace harmonium {

int sample_bernoulli_sigmoid(double logit, RngStream& rng) {
  return rng.uniform() < sigmoid(logit) ? 1 : 0;
}

double sample_truncated_exponential(double lambda, double t, RngStream& rng) {
  const double u = rng.uniform();
  if (std::abs(lambda) < kExponentialRateEpsilon) return u * t;
  if (lambda > 0.0) {
    // x = -ln(1 - u (1 - e^{-tλ})) / λ
    return std::min(t, -std::log1p(u * std::expm1(-t * lambda)) / lambda);
  }
  // Growing density: reflect so the exponent stays bounded.
  const double mirrored = -std::log1p(u * std::expm1(t * lambda)) / -lambda;
  return std::max(0.0, t - std::min(t, mirrored));
}

double log_acceptance_probability(double x, double alpha, double anchor) {
  const double r = x / anchor;
  return (alpha - 1.0) * (std::log(r) - r + 1.0);
}

double sample_interval_truncated_gamma(const GammaParams& p, double t_lower, RngStream& rng,
                                       const RejectionOptions& options) {
  if (!(p.alpha >= 1.0) || !std::isfinite(p.beta)) {
    std::ostringstream msg;
    msg << "truncated gamma sampler requires alpha >= 1 and finite beta, got alpha=" << p.alpha
        << ", beta=" << p.beta;
    throw DomainError(msg.str());
  }
  if (!(t_lower >= 0.0 && t_lower < 1.0)) {
    std::ostringstream msg;
    msg << "truncated gamma lower bound must lie in [0,1), got " << t_lower;
    throw DomainError(msg.str());
  }
  const double width = 1.0 - t_lower;
  if (p.alpha == 1.0) {
    const double x = t_lower + sample_truncated_exponential(p.beta, width, rng);
    return std::clamp(x, std::max(t_lower, std::numeric_limits<double>::min()), 1.0);
  }

  double anchor = 1.0;
  if (options.anchor == EnvelopeAnchor::adaptive && p.beta > 0.0)
    anchor = std::clamp(p.alpha / p.beta, std::max(t_lower, 1e-300), 1.0);
  const double lambda = (p.alpha - 1.0) / anchor - p.beta;

  for (std::uint64_t iter = 0; iter < options.max_iterations; ++iter) {
    const double u = rng.uniform();
    const double y = sample_truncated_exponential(lambda, width, rng);
    const double x = 1.0 - y;
    if (!(x > 0.0)) continue;
    if (std::log(u) <= log_acceptance_probability(x, p.alpha, anchor)) return std::max(x, t_lower);
  }
  std::ostringstream msg;
  msg << "truncated gamma rejection sampler exceeded " << options.max_iterations
      << " iterations (alpha=" << p.alpha << ", beta=" << p.beta << ", t_lower=" << t_lower << ")";
  throw SamplerError(msg.str(), p.alpha, p.beta, t_lower);
}

double sample_gaussian(double mu, double sigma, RngStream& rng) {
  if (!(sigma > 0.0)) throw DomainError("gaussian sampler requires sigma > 0");
  return mu + sigma * rng.normal();
}

VisibleState gibbs_visible_step(std::span<const double> h, const ModelParameters& theta,
                                RngStream& rng, const RejectionOptions& options) {
  const auto cond = visible_conditional_params(h, theta);
  VisibleState x;
  x.binary.resize(theta.n_binary());
  x.time.resize(theta.n_time());
  x.numeric.resize(theta.n_numeric());
  for (std::size_t i = 0; i < x.binary.size(); ++i)
    x.binary[i] = sample_bernoulli_sigmoid(-cond.binary_activation[i], rng);
  for (std::size_t i = 0; i < x.time.size(); ++i)
    x.time[i] = sample_interval_truncated_gamma(cond.time[i], 0.0, rng, options);
  for (std::size_t i = 0; i < x.numeric.size(); ++i)
    x.numeric[i] = sample_gaussian(cond.numeric_mean[i], cond.numeric_sd[i], rng);
  return x;
}

VisibleState gibbs_visible_step(std::span<const double> h, const ModelParameters& theta,
                                const Observation& constraint, RngStream& rng,
                                const RejectionOptions& options) {
  const auto cond = visible_conditional_params(h, theta);
  VisibleState x;
  x.binary.resize(theta.n_binary());
  x.time.resize(theta.n_time());
  x.numeric.resize(theta.n_numeric());
  for (std::size_t i = 0; i < x.binary.size(); ++i) {
    x.binary[i] = constraint.binary.observed[i]
                      ? constraint.binary.value[i]
                      : sample_bernoulli_sigmoid(-cond.binary_activation[i], rng);
  }
  for (std::size_t i = 0; i < x.time.size(); ++i) {
    x.time[i] = constraint.time.observed[i]
                    ? constraint.time.value[i]
                    : sample_interval_truncated_gamma(cond.time[i], constraint.time.value[i], rng,
                                                      options);
  }
  for (std::size_t i = 0; i < x.numeric.size(); ++i) {
    x.numeric[i] = constraint.numeric.observed[i]
                       ? constraint.numeric.value[i]
                       : sample_gaussian(cond.numeric_mean[i], cond.numeric_sd[i], rng);
  }
  return x;
}

std::vector<double> gibbs_latent_step(const VisibleState& x, const ModelParameters& theta,
                                      RngStream& rng) {
  const auto latent = latent_conditional(x, theta);
  std::vector<double> h(latent.phi.size());
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = sample_bernoulli_sigmoid(-latent.phi[j], rng);
  return h;
}

}  // namespace harmonium
