#include "harmonium/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "harmonium/error.hpp"
#include "harmonium/quadrature.hpp"
#include "harmonium/special_functions.hpp"

namespace harmonium {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Streaming log-sum-exp accumulator.
class LogSum {
 public:
  void add(double v) {
    if (v == kNegInf) return;
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }
  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

double log_weight_exact(const Observation& o, const ModelParameters& theta) {
  const std::size_t nh = theta.n_hidden();
  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  LogSum total;
  std::vector<double> h(nh);
  const std::uint64_t states = std::uint64_t{1} << nh;
  for (std::uint64_t s = 0; s < states; ++s) {
    double log_w = 0.0;
    for (std::size_t j = 0; j < nh; ++j) {
      h[j] = static_cast<double>((s >> j) & 1U);
      log_w -= theta.b_latent[j] * h[j];
    }
    const auto cond = visible_conditional_params(h, theta);
    for (std::size_t i = 0; i < theta.n_binary(); ++i) {
      const double z = cond.binary_activation[i];
      log_w += o.binary.observed[i] ? -o.binary.value[i] * z : softplus(-z);
    }
    for (std::size_t i = 0; i < theta.n_time(); ++i) {
      const auto& g = cond.time[i];
      const double xi = o.time.value[i];
      if (o.time.observed[i]) {
        log_w += (g.alpha - 1.0) * std::log(xi) - g.beta * xi;
      } else {
        log_w += log_gamma_tail_integral(g.alpha, g.beta, xi);
      }
    }
    for (std::size_t i = 0; i < theta.n_numeric(); ++i) {
      const double s_i = theta.sigma[i];
      const double a = theta.a_numeric[i];
      const double mu = cond.numeric_mean[i];
      if (o.numeric.observed[i]) {
        const double x = o.numeric.value[i];
        const double coupling = (a - mu) / s_i;  // Σ_j W_ij h_j
        const double d = x - a;
        log_w -= x * coupling / s_i + d * d / (2.0 * s_i * s_i);
      } else {
        log_w += half_log_two_pi + std::log(s_i) + (mu * mu - a * a) / (2.0 * s_i * s_i);
      }
    }
    total.add(log_w);
  }
  return total.value();
}

struct Axis {
  std::vector<double> points;
  std::vector<double> log_weights;
};

Axis time_axis(double lower, std::size_t nodes) {
  // x = u², u ∈ [√lower, 1]; smooths the x^p behaviour at the origin.
  const auto& rule = quadrature::gauss_legendre(nodes);
  const double u_lo = std::sqrt(lower);
  const double center = 0.5 * (1.0 + u_lo);
  const double half = 0.5 * (1.0 - u_lo);
  Axis axis;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double u = center + half * rule.nodes[k];
    axis.points.push_back(u * u);
    axis.log_weights.push_back(std::log(rule.weights[k] * half * 2.0 * u));
  }
  return axis;
}

Axis numeric_axis(const ModelParameters& theta, std::size_t i, std::size_t nodes) {
  const double s = theta.sigma[i];
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t j = 0; j < theta.n_hidden(); ++j) {
    pos += std::max(theta.w_numeric(i, j), 0.0);
    neg += std::min(theta.w_numeric(i, j), 0.0);
  }
  const double lo = theta.a_numeric[i] - s * pos - 12.0 * s;
  const double hi = theta.a_numeric[i] - s * neg + 12.0 * s;
  const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / (4.0 * s)));
  const std::size_t per_panel = std::max<std::size_t>(8, nodes / std::max<std::size_t>(panels, 1));
  const auto& rule = quadrature::gauss_legendre(per_panel);
  const double width = (hi - lo) / static_cast<double>(panels);
  Axis axis;
  for (std::size_t p = 0; p < panels; ++p) {
    const double center = lo + (static_cast<double>(p) + 0.5) * width;
    for (std::size_t k = 0; k < per_panel; ++k) {
      axis.points.push_back(center + 0.5 * width * rule.nodes[k]);
      axis.log_weights.push_back(std::log(0.5 * width * rule.weights[k]));
    }
  }
  return axis;
}

double log_weight_numeric(const Observation& o, const ModelParameters& theta,
                          const InferenceOptions& options) {
  VisibleState x;
  x.binary.resize(theta.n_binary());
  x.time.resize(theta.n_time());
  x.numeric.resize(theta.n_numeric());

  std::vector<std::size_t> missing_binary;
  for (std::size_t i = 0; i < x.binary.size(); ++i) {
    if (o.binary.observed[i]) x.binary[i] = o.binary.value[i];
    else missing_binary.push_back(i);
  }
  struct Slot {
    double* target;
    Axis axis;
  };
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < x.time.size(); ++i) {
    if (o.time.observed[i]) x.time[i] = o.time.value[i];
    else slots.push_back({&x.time[i], time_axis(o.time.value[i], options.quadrature_nodes)});
  }
  for (std::size_t i = 0; i < x.numeric.size(); ++i) {
    if (o.numeric.observed[i]) x.numeric[i] = o.numeric.value[i];
    else slots.push_back({&x.numeric[i], numeric_axis(theta, i, options.quadrature_nodes)});
  }
  if (slots.size() > options.max_numeric_dimensions) {
    std::ostringstream msg;
    msg << "numeric marginalization over " << slots.size()
        << " continuous variables exceeds the limit of " << options.max_numeric_dimensions;
    throw CapacityError(msg.str());
  }
  if (missing_binary.size() > 20)
    throw CapacityError("numeric marginalization over more than 20 missing binaries refused");

  LogSum total;
  std::vector<std::size_t> index(slots.size(), 0);
  const std::uint64_t binary_states = std::uint64_t{1} << missing_binary.size();
  while (true) {
    double log_node_weight = 0.0;
    for (std::size_t d = 0; d < slots.size(); ++d) {
      *slots[d].target = slots[d].axis.points[index[d]];
      log_node_weight += slots[d].axis.log_weights[index[d]];
    }
    for (std::uint64_t s = 0; s < binary_states; ++s) {
      for (std::size_t k = 0; k < missing_binary.size(); ++k)
        x.binary[missing_binary[k]] = static_cast<double>((s >> k) & 1U);
      total.add(log_node_weight + log_unnormalized_marginal(x, theta));
    }
    std::size_t d = 0;
    while (d < slots.size()) {
      if (++index[d] < slots[d].axis.points.size()) break;
      index[d] = 0;
      ++d;
    }
    if (d == slots.size()) break;
  }
  return total.value();
}

}  // namespace

double log_unnormalized_marginal(const VisibleState& x, const ModelParameters& theta) {
  const auto latent = latent_conditional(x, theta);
  double v = -visible_energy(x, theta);
  for (double phi : latent.phi) v += softplus(-phi);
  return v;
}

double log_observation_weight(const Observation& o, const ModelParameters& theta,
                              const InferenceOptions& options) {
  validate_observation(o, theta.n_binary(), theta.n_time(), theta.n_numeric());
  auto method = options.method;
  if (method == MarginalizationMethod::automatic) {
    method = theta.n_hidden() < options.automatic_threshold ? MarginalizationMethod::exact_latent
                                                            : MarginalizationMethod::numeric_visible;
  }
  if (method == MarginalizationMethod::exact_latent) {
    if (theta.n_hidden() > options.max_exact_hidden) {
      std::ostringstream msg;
      msg << "latent enumeration over " << theta.n_hidden() << " hidden units exceeds the limit of "
          << options.max_exact_hidden;
      throw CapacityError(msg.str());
    }
    return log_weight_exact(o, theta);
  }
  return log_weight_numeric(o, theta, options);
}

double risk_score(const RiskQuery& query, const ModelParameters& theta,
                  const InferenceOptions& options) {
  if (query.target >= theta.n_time()) throw DataError("risk target is not a time variable");
  if (std::find(query.marginalize_out.begin(), query.marginalize_out.end(), query.target) !=
      query.marginalize_out.end())
    throw DataError("risk target cannot be marginalized out");
  if (!(query.time > 0.0)) return 1.0;
  if (query.time >= 1.0) return 0.0;

  Observation o = query.conditioning;
  for (auto j : query.marginalize_out) {
    if (j >= theta.n_time()) throw DataError("marginalized variable is not a time variable");
    o.censor_time(j, 0.0);
  }
  o.censor_time(query.target, query.time);
  const double log_num = log_observation_weight(o, theta, options);
  o.censor_time(query.target, 0.0);
  const double log_den = log_observation_weight(o, theta, options);
  return std::clamp(std::exp(log_num - log_den), 0.0, 1.0);
}

std::vector<double> latent_embedding(const Observation& o, const ModelParameters& theta,
                                     std::size_t n_gibbs, RngStream& rng,
                                     const std::optional<ImputationValues>& fill) {
  validate_observation(o, theta.n_binary(), theta.n_time(), theta.n_numeric());
  ImputationValues start;
  if (fill) {
    start = *fill;
  } else {
    start.binary.assign(theta.n_binary(), 0.5);
    start.numeric = theta.a_numeric;
    start.time.assign(theta.n_time(), 0.5);
  }
  VisibleState x = initial_state(o, start);
  for (std::size_t i = 0; i < x.time.size(); ++i)
    if (!o.time.observed[i]) x.time[i] = 0.5 * (o.time.value[i] + 1.0);
  if (o.fully_observed() || n_gibbs == 0) return latent_conditional(x, theta).prob_on;

  std::vector<double> mean(theta.n_hidden(), 0.0);
  for (std::size_t sweep = 0; sweep < n_gibbs; ++sweep) {
    const auto h = gibbs_latent_step(x, theta, rng);
    x = gibbs_visible_step(h, theta, o, rng);
    const auto mu = latent_conditional(x, theta).prob_on;
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += mu[j];
  }
  for (double& m : mean) m /= static_cast<double>(n_gibbs);
  return mean;
}

}  // namespace harmonium
