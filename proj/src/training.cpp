#include "harmonium/training.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "harmonium/error.hpp"
#include "harmonium/special_functions.hpp"

namespace harmonium {
namespace {

double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
  }
}

double median_of(std::vector<double> values, bool lower) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1 || lower) return values[(n - 1) / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

constexpr std::size_t kCouplingTensors = 4;
constexpr std::size_t kSigmaTensor = 8;

template <typename P>
auto tensor_views(P& p) {
  using Span = std::conditional_t<std::is_const_v<P>, std::span<const double>, std::span<double>>;
  return std::array<Span, 10>{p.w_binary.values(), p.w_time.values(),    p.w_numeric.values(),
                              p.v_shape.values(),  Span(p.a_binary),     Span(p.a_time),
                              Span(p.c_shape),     Span(p.a_numeric),    Span(p.sigma),
                              Span(p.b_latent)};
}

}  // namespace

void TrainConfig::validate(std::size_t dataset_size) const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (n_hidden < 1) fail("hidden units must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning rate must be > 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (minibatch_size < 1) fail("minibatch size must be >= 1");
  if (dataset_size > 0 && minibatch_size > dataset_size) {
    std::ostringstream msg;
    msg << "minibatch size " << minibatch_size << " exceeds dataset size " << dataset_size;
    fail(msg.str());
  }
  if (cd_steps < 1) fail("contrastive divergence steps must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must lie in [0, 1)");
  if (!(l2_penalty >= 0.0) || !std::isfinite(l2_penalty)) fail("l2 penalty must be >= 0");
  if (threads < 1) fail("threads must be >= 1");
}

Gradient Gradient::zeros_like(const ModelParameters& theta) {
  Gradient g;
  g.w_binary = Matrix(theta.w_binary.rows(), theta.w_binary.cols());
  g.w_time = Matrix(theta.w_time.rows(), theta.w_time.cols());
  g.w_numeric = Matrix(theta.w_numeric.rows(), theta.w_numeric.cols());
  g.v_shape = Matrix(theta.v_shape.rows(), theta.v_shape.cols());
  g.a_binary.assign(theta.a_binary.size(), 0.0);
  g.a_time.assign(theta.a_time.size(), 0.0);
  g.c_shape.assign(theta.c_shape.size(), 0.0);
  g.a_numeric.assign(theta.a_numeric.size(), 0.0);
  g.sigma.assign(theta.sigma.size(), 0.0);
  g.b_latent.assign(theta.b_latent.size(), 0.0);
  return g;
}

std::array<std::span<double>, 10> Gradient::tensors() { return tensor_views(*this); }
std::array<std::span<const double>, 10> Gradient::tensors() const { return tensor_views(*this); }
std::array<std::span<double>, 10> parameter_tensors(ModelParameters& theta) {
  return tensor_views(theta);
}
std::array<std::span<const double>, 10> parameter_tensors(const ModelParameters& theta) {
  return tensor_views(theta);
}

Gradient& Gradient::operator+=(const Gradient& other) {
  auto mine = tensors();
  auto theirs = other.tensors();
  for (std::size_t k = 0; k < mine.size(); ++k)
    for (std::size_t n = 0; n < mine[k].size(); ++n) mine[k][n] += theirs[k][n];
  return *this;
}

Gradient& Gradient::operator-=(const Gradient& other) {
  auto mine = tensors();
  auto theirs = other.tensors();
  for (std::size_t k = 0; k < mine.size(); ++k)
    for (std::size_t n = 0; n < mine[k].size(); ++n) mine[k][n] -= theirs[k][n];
  return *this;
}

Gradient& Gradient::operator*=(double factor) {
  for (auto t : tensors())
    for (double& v : t) v *= factor;
  return *this;
}

double Gradient::norm() const {
  double sum = 0.0;
  for (auto t : tensors())
    for (double v : t) sum += v * v;
  return std::sqrt(sum);
}

double parameter_norm(const ModelParameters& theta) {
  double sum = 0.0;
  for (auto t : parameter_tensors(theta))
    for (double v : t) sum += v * v;
  return std::sqrt(sum);
}

void accumulate_energy_gradient(const VisibleState& x, std::span<const double> h_mean,
                                const ModelParameters& theta, double weight, Gradient& out) {
  require_time_domain(x);
  const std::size_t nh = theta.n_hidden();
  for (std::size_t i = 0; i < x.binary.size(); ++i) {
    const double xi = x.binary[i];
    for (std::size_t j = 0; j < nh; ++j) out.w_binary(i, j) += weight * (xi * h_mean[j]);
    out.a_binary[i] += weight * xi;
  }
  for (std::size_t i = 0; i < x.time.size(); ++i) {
    const double xi = x.time[i];
    const double log_x = std::log(xi);
    for (std::size_t j = 0; j < nh; ++j) {
      out.w_time(i, j) += weight * (xi * h_mean[j]);
      out.v_shape(i, j) += weight * (-log_x * h_mean[j] * sign(theta.v_shape(i, j)));
    }
    out.a_time[i] += weight * xi;
    out.c_shape[i] += weight * (-log_x * sign(theta.c_shape[i]));
  }
  for (std::size_t i = 0; i < x.numeric.size(); ++i) {
    const double xi = x.numeric[i];
    const double s = theta.sigma[i];
    const double scaled = xi / s;
    const double d = xi - theta.a_numeric[i];
    double coupling = 0.0;
    for (std::size_t j = 0; j < nh; ++j) {
      out.w_numeric(i, j) += weight * (scaled * h_mean[j]);
      coupling += xi * theta.w_numeric(i, j) * h_mean[j];
    }
    out.a_numeric[i] += weight * (-d / (s * s));
    out.sigma[i] += weight * (-coupling / (s * s) - d * d / (s * s * s));
  }
  for (std::size_t j = 0; j < nh; ++j) out.b_latent[j] += weight * h_mean[j];
}

Gradient energy_gradient(const VisibleState& x, std::span<const double> h_mean,
                         const ModelParameters& theta) {
  Gradient g = Gradient::zeros_like(theta);
  accumulate_energy_gradient(x, h_mean, theta, 1.0, g);
  return g;
}

ImputationValues compute_imputation(std::span<const Observation> data, std::size_t n_binary,
                                    std::size_t n_time, std::size_t n_numeric) {
  ImputationValues fill;
  fill.binary.resize(n_binary);
  fill.time.resize(n_time);
  fill.numeric.resize(n_numeric);
  for (std::size_t i = 0; i < n_binary; ++i) {
    std::vector<double> v;
    for (const auto& o : data)
      if (o.binary.observed[i]) v.push_back(o.binary.value[i]);
    const double m = median_of(std::move(v), true);
    fill.binary[i] = std::isnan(m) ? 0.0 : m;
  }
  for (std::size_t i = 0; i < n_time; ++i) {
    std::vector<double> v;
    for (const auto& o : data)
      if (o.time.value[i] > 0.0) v.push_back(o.time.value[i]);
    const double m = median_of(std::move(v), false);
    fill.time[i] = std::isnan(m) ? 0.5 : m;
  }
  for (std::size_t i = 0; i < n_numeric; ++i) {
    std::vector<double> v;
    for (const auto& o : data)
      if (o.numeric.observed[i]) v.push_back(o.numeric.value[i]);
    const double m = median_of(std::move(v), false);
    fill.numeric[i] = std::isnan(m) ? 0.0 : m;
  }
  return fill;
}

VisibleState initial_state(const Observation& o, const ImputationValues& fill) {
  VisibleState x;
  x.binary.resize(o.binary.size());
  x.time.resize(o.time.size());
  x.numeric.resize(o.numeric.size());
  for (std::size_t i = 0; i < x.binary.size(); ++i)
    x.binary[i] = o.binary.observed[i] ? o.binary.value[i] : fill.binary[i];
  for (std::size_t i = 0; i < x.time.size(); ++i) {
    const double xi = o.time.value[i];
    x.time[i] = (o.time.observed[i] || xi > 0.0) ? xi : fill.time[i];
  }
  for (std::size_t i = 0; i < x.numeric.size(); ++i)
    x.numeric[i] = o.numeric.observed[i] ? o.numeric.value[i] : fill.numeric[i];
  return x;
}

PhaseResult positive_phase(const Observation& o, const VisibleState& start,
                           const ModelParameters& theta, std::size_t k, RngStream& rng,
                           const RejectionOptions& options) {
  PhaseResult r{start, {}};
  for (std::size_t step = 0; step < k; ++step) {
    const auto h = gibbs_latent_step(r.x, theta, rng);
    r.x = gibbs_visible_step(h, theta, o, rng, options);
  }
  r.h_mean = latent_conditional(r.x, theta).prob_on;
  return r;
}

PhaseResult positive_phase(const Observation& o, const ModelParameters& theta, std::size_t k,
                           RngStream& rng, const ImputationValues& fill,
                           const RejectionOptions& options) {
  return positive_phase(o, initial_state(o, fill), theta, k, rng, options);
}

PhaseResult negative_phase(const VisibleState& x_init, const ModelParameters& theta,
                           std::size_t k, RngStream& rng, const RejectionOptions& options) {
  PhaseResult r{x_init, {}};
  for (std::size_t step = 0; step < k; ++step) {
    const auto h = gibbs_latent_step(r.x, theta, rng);
    r.x = gibbs_visible_step(h, theta, rng, options);
  }
  r.h_mean = latent_conditional(r.x, theta).prob_on;
  return r;
}

ModelParameters initialize_parameters(std::span<const Observation> data, std::size_t n_binary,
                                      std::size_t n_time, std::size_t n_numeric,
                                      std::size_t n_hidden, RngStream& rng) {
  ModelParameters theta(n_binary, n_time, n_numeric, n_hidden);
  const double nh = static_cast<double>(n_hidden);
  for (double& w : theta.w_binary.values()) w = 0.01 * rng.normal();
  for (std::size_t i = 0; i < n_binary; ++i) {
    double sum = 0.0;
    double count = 0.0;
    for (const auto& o : data) {
      if (o.binary.observed[i]) {
        sum += o.binary.value[i];
        count += 1.0;
      }
    }
    // Frequencies of exactly 0 or 1 would give an infinite bias.
    const double p = std::clamp(count > 0.0 ? sum / count : 0.5, 1e-3, 1.0 - 1e-3);
    theta.a_binary[i] = std::log((1.0 - p) / p);
  }
  const double time_range = std::sqrt(6.0 / (nh + static_cast<double>(n_time)));
  for (double& w : theta.w_time.values()) w = time_range * (2.0 * rng.uniform() - 1.0);
  for (double& v : theta.v_shape.values()) v = 2.0 * time_range * rng.uniform();
  for (double& c : theta.c_shape) c = 2.0 * time_range * rng.uniform();
  const double numeric_range = std::sqrt(6.0 / (nh + static_cast<double>(n_numeric)));
  for (double& w : theta.w_numeric.values()) w = numeric_range * (2.0 * rng.uniform() - 1.0);
  return theta;
}

double reconstruction_error(std::span<const Observation> data, const ModelParameters& theta,
                            const ImputationValues& fill) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& o : data) {
    const auto x = initial_state(o, fill);
    const auto mu = latent_conditional(x, theta).prob_on;
    const auto cond = visible_conditional_params(mu, theta);
    for (std::size_t i = 0; i < x.binary.size(); ++i) {
      if (!o.binary.observed[i]) continue;
      const double d = x.binary[i] - sigmoid(-cond.binary_activation[i]);
      sum += d * d;
      ++count;
    }
    for (std::size_t i = 0; i < x.time.size(); ++i) {
      if (!o.time.observed[i]) continue;
      const double d = x.time[i] - right_truncated_gamma_mean(cond.time[i]);
      sum += d * d;
      ++count;
    }
    for (std::size_t i = 0; i < x.numeric.size(); ++i) {
      if (!o.numeric.observed[i]) continue;
      const double d = x.numeric[i] - cond.numeric_mean[i];
      sum += d * d;
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

std::uint64_t chain_stream_id(std::size_t epoch, std::size_t sample, ChainRole role) {
  return stream_key({static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(sample),
                     static_cast<std::uint64_t>(role)});
}

Trainer::Trainer(std::span<const Observation> data, ModelParameters initial, TrainConfig config,
                 ImputationValues fill, RejectionOptions rejection)
    : data_(data),
      theta_(std::move(initial)),
      config_(config),
      fill_(std::move(fill)),
      rejection_(rejection),
      velocity_(Gradient::zeros_like(theta_)),
      chains_(data.size()),
      chain_started_(data.size(), 0) {
  if (data_.empty()) throw DataError("training data is empty");
  config_.validate(data_.size());
  theta_.validate();
  for (const auto& o : data_)
    validate_observation(o, theta_.n_binary(), theta_.n_time(), theta_.n_numeric());
}

void Trainer::apply_update(const Gradient& mean_gradient) {
  auto params = parameter_tensors(theta_);
  auto velocity = velocity_.tensors();
  const auto grad = mean_gradient.tensors();
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t n = 0; n < params[k].size(); ++n) {
      double g = grad[k][n];
      if (k < kCouplingTensors) g += config_.l2_penalty * params[k][n];
      if (k == kSigmaTensor) {
        // σ is trained through s = ln σ, with ∂E/∂s = σ ∂E/∂σ.
        g *= params[k][n];
        velocity[k][n] = config_.momentum * velocity[k][n] - config_.learning_rate * g;
        params[k][n] = std::exp(std::log(params[k][n]) + velocity[k][n]);
      } else {
        velocity[k][n] = config_.momentum * velocity[k][n] - config_.learning_rate * g;
        params[k][n] += velocity[k][n];
      }
    }
  }
}

EpochRecord Trainer::run_epoch() {
  const std::size_t n = data_.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  {
    RngStream shuffle_rng(config_.seed, chain_stream_id(epoch_, 0, ChainRole::shuffle));
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(shuffle_rng.uniform() * static_cast<double>(i + 1));
      std::swap(order[i], order[std::min(j, i)]);
    }
  }

  EpochRecord record;
  record.epoch = epoch_ + 1;
  double gradient_norm_sum = 0.0;
  std::size_t batches = 0;
  std::vector<PhaseResult> positive(config_.minibatch_size);
  std::vector<PhaseResult> negative(config_.minibatch_size);

  for (std::size_t start = 0; start < n; start += config_.minibatch_size) {
    const std::size_t m = std::min(config_.minibatch_size, n - start);
    parallel_for(m, config_.threads, [&](std::size_t b) {
      const std::size_t idx = order[start + b];
      const Observation& o = data_[idx];
      const VisibleState x0 = initial_state(o, fill_);
      RngStream pos_rng(config_.seed, chain_stream_id(epoch_, idx, ChainRole::positive));
      positive[b] = positive_phase(o, x0, theta_, config_.cd_steps, pos_rng, rejection_);
      const VisibleState& neg_start =
          (config_.persistent && chain_started_[idx]) ? chains_[idx] : x0;
      RngStream neg_rng(config_.seed, chain_stream_id(epoch_, idx, ChainRole::negative));
      negative[b] = negative_phase(neg_start, theta_, config_.cd_steps, neg_rng, rejection_);
    });

    Gradient batch = Gradient::zeros_like(theta_);
    for (std::size_t b = 0; b < m; ++b) {
      accumulate_energy_gradient(positive[b].x, positive[b].h_mean, theta_, 1.0, batch);
      accumulate_energy_gradient(negative[b].x, negative[b].h_mean, theta_, -1.0, batch);
      record.positive_energy += energy(positive[b].x, positive[b].h_mean, theta_);
      record.negative_energy += energy(negative[b].x, negative[b].h_mean, theta_);
      if (config_.persistent) {
        const std::size_t idx = order[start + b];
        chains_[idx] = negative[b].x;
        chain_started_[idx] = 1;
      }
    }
    batch *= 1.0 / static_cast<double>(m);
    gradient_norm_sum += batch.norm();
    ++batches;
    apply_update(batch);
    try {
      theta_.validate();
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "training diverged at epoch " << epoch_ + 1 << ": " << e.what();
      throw NumericalError(msg.str());
    }
  }

  record.positive_energy /= static_cast<double>(n);
  record.negative_energy /= static_cast<double>(n);
  record.gradient_norm = gradient_norm_sum / static_cast<double>(batches);
  record.parameter_norm = parameter_norm(theta_);
  record.reconstruction_error = reconstruction_error(data_, theta_, fill_);
  ++epoch_;
  return record;
}

FitResult fit(std::span<const Observation> data, const VariableSchema& schema,
              const TrainConfig& config, const EpochCallback& on_epoch,
              const RejectionOptions& rejection) {
  if (data.empty()) throw DataError("training data is empty");
  config.validate(data.size());
  const std::size_t na = schema.n_binary();
  const std::size_t nb = schema.n_time();
  const std::size_t nc = schema.n_numeric();
  for (const auto& o : data) validate_observation(o, na, nb, nc);
  RngStream init_rng(config.seed, chain_stream_id(0, 0, ChainRole::init));
  auto theta = initialize_parameters(data, na, nb, nc, config.n_hidden, init_rng);
  auto fill = compute_imputation(data, na, nb, nc);
  Trainer trainer(data, std::move(theta), config, fill, rejection);
  FitResult result;
  result.log.reserve(config.epochs);
  for (std::size_t e = 0; e < config.epochs; ++e) {
    result.log.push_back(trainer.run_epoch());
    if (on_epoch) on_epoch(result.log.back(), trainer.parameters());
  }
  result.parameters = trainer.parameters();
  result.imputation = trainer.imputation();
  return result;
}

}  // namespace harmonium
