#include "harmonium/model.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "harmonium/error.hpp"
#include "harmonium/special_functions.hpp"

namespace harmonium {

std::string_view to_string(VariableGroup group) {
  switch (group) {
    case VariableGroup::binary: return "binary";
    case VariableGroup::time_to_event: return "time_to_event";
    case VariableGroup::numeric: return "numeric";
  }
  return "unknown";
}

VariableGroup parse_variable_group(std::string_view text) {
  if (text == "binary") return VariableGroup::binary;
  if (text == "time_to_event") return VariableGroup::time_to_event;
  if (text == "numeric") return VariableGroup::numeric;
  throw DataError("unknown variable group '" + std::string(text) + "'");
}

VariableSchema::VariableSchema(std::vector<VariableSpec> variables)
    : variables_(std::move(variables)) {
  std::set<std::string> seen;
  for (std::size_t k = 0; k < variables_.size(); ++k) {
    const auto& v = variables_[k];
    if (v.name.empty()) throw DataError("variable names must be non-empty");
    if (!seen.insert(v.name).second) throw DataError("duplicate variable name '" + v.name + "'");
    switch (v.group) {
      case VariableGroup::binary: binary_.push_back(k); break;
      case VariableGroup::time_to_event: time_.push_back(k); break;
      case VariableGroup::numeric: numeric_.push_back(k); break;
    }
    if (v.group == VariableGroup::time_to_event) {
      if (!v.time_horizon || !(*v.time_horizon > 0.0) || !std::isfinite(*v.time_horizon))
        throw DataError("time-to-event variable '" + v.name + "' needs a positive time horizon");
    } else if (v.time_horizon) {
      throw DataError("variable '" + v.name + "' is not a time variable but has a time horizon");
    }
  }
}

const std::vector<std::size_t>& VariableSchema::members(VariableGroup group) const {
  switch (group) {
    case VariableGroup::binary: return binary_;
    case VariableGroup::time_to_event: return time_;
    case VariableGroup::numeric: return numeric_;
  }
  return binary_;
}

std::optional<VariableRef> VariableSchema::find(std::string_view name) const {
  for (auto group : {VariableGroup::binary, VariableGroup::time_to_event, VariableGroup::numeric}) {
    const auto& m = members(group);
    for (std::size_t i = 0; i < m.size(); ++i)
      if (variables_[m[i]].name == name) return VariableRef{group, i};
  }
  return std::nullopt;
}

const VariableSpec& VariableSchema::spec(VariableGroup group, std::size_t index) const {
  return variables_.at(members(group).at(index));
}

std::vector<std::string> VariableSchema::names(VariableGroup group) const {
  std::vector<std::string> out;
  for (auto k : members(group)) out.push_back(variables_[k].name);
  return out;
}

void GroupObservation::resize(std::size_t n) {
  value.assign(n, std::numeric_limits<double>::quiet_NaN());
  observed.assign(n, 0);
}

Observation Observation::empty(std::size_t n_binary, std::size_t n_time, std::size_t n_numeric) {
  Observation o;
  o.binary.resize(n_binary);
  o.time.resize(n_time);
  o.numeric.resize(n_numeric);
  // An unobserved time with no information is censored at zero.
  for (auto& v : o.time.value) v = 0.0;
  return o;
}

bool Observation::fully_observed() const {
  for (const auto* g : {&binary, &time, &numeric})
    for (auto e : g->observed)
      if (!e) return false;
  return true;
}

void Observation::set_binary(std::size_t i, double value) {
  binary.value.at(i) = value;
  binary.observed.at(i) = 1;
}
void Observation::set_time(std::size_t i, double value) {
  time.value.at(i) = value;
  time.observed.at(i) = 1;
}
void Observation::censor_time(std::size_t i, double lower_bound) {
  time.value.at(i) = lower_bound;
  time.observed.at(i) = 0;
}
void Observation::set_numeric(std::size_t i, double value) {
  numeric.value.at(i) = value;
  numeric.observed.at(i) = 1;
}
void Observation::set_binary_missing(std::size_t i) {
  binary.value.at(i) = std::numeric_limits<double>::quiet_NaN();
  binary.observed.at(i) = 0;
}
void Observation::set_numeric_missing(std::size_t i) {
  numeric.value.at(i) = std::numeric_limits<double>::quiet_NaN();
  numeric.observed.at(i) = 0;
}

void validate_observation(const Observation& o, std::size_t n_binary, std::size_t n_time,
                          std::size_t n_numeric) {
  auto check_shape = [](const GroupObservation& g, std::size_t n, const char* name) {
    if (g.value.size() != n || g.observed.size() != n) {
      std::ostringstream msg;
      msg << "observation " << name << " group has " << g.value.size() << " entries, expected " << n;
      throw DataError(msg.str());
    }
  };
  check_shape(o.binary, n_binary, "binary");
  check_shape(o.time, n_time, "time");
  check_shape(o.numeric, n_numeric, "numeric");
  for (std::size_t i = 0; i < n_binary; ++i) {
    if (o.binary.observed[i] && o.binary.value[i] != 0.0 && o.binary.value[i] != 1.0)
      throw DataError("observed binary value must be 0 or 1");
  }
  for (std::size_t i = 0; i < n_time; ++i) {
    const double v = o.time.value[i];
    if (o.time.observed[i]) {
      if (!(v > 0.0 && v <= 1.0)) throw DataError("observed event time must lie in (0,1]");
    } else if (!(v >= 0.0 && v < 1.0)) {
      throw DataError("censoring time must lie in [0,1)");
    }
  }
  for (std::size_t i = 0; i < n_numeric; ++i) {
    if (o.numeric.observed[i] && !std::isfinite(o.numeric.value[i]))
      throw DataError("observed numeric value must be finite");
  }
}

ModelParameters::ModelParameters(std::size_t n_binary, std::size_t n_time, std::size_t n_numeric,
                                 std::size_t n_hidden)
    : w_binary(n_binary, n_hidden),
      w_time(n_time, n_hidden),
      w_numeric(n_numeric, n_hidden),
      v_shape(n_time, n_hidden),
      a_binary(n_binary, 0.0),
      a_time(n_time, 0.0),
      c_shape(n_time, 0.0),
      a_numeric(n_numeric, 0.0),
      sigma(n_numeric, 1.0),
      b_latent(n_hidden, 0.0) {}

void ModelParameters::validate() const {
  auto finite = [](std::span<const double> values) {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  };
  const std::size_t nh = n_hidden();
  if (w_binary.rows() != n_binary() || w_binary.cols() != nh || w_time.rows() != n_time() ||
      w_time.cols() != nh || v_shape.rows() != n_time() || v_shape.cols() != nh ||
      w_numeric.rows() != n_numeric() || w_numeric.cols() != nh || c_shape.size() != n_time() ||
      sigma.size() != n_numeric())
    throw NumericalError("model parameter shapes are inconsistent");
  for (auto span : {w_binary.values(), w_time.values(), w_numeric.values(), v_shape.values(),
                    std::span<const double>(a_binary), std::span<const double>(a_time),
                    std::span<const double>(c_shape), std::span<const double>(a_numeric),
                    std::span<const double>(sigma), std::span<const double>(b_latent)})
    if (!finite(span)) throw NumericalError("model parameters contain non-finite values");
  for (double s : sigma)
    if (!(s > 0.0)) throw NumericalError("numeric scales sigma must be positive");
}

void require_time_domain(const VisibleState& x) {
  for (double t : x.time) {
    if (!(t > 0.0 && t <= 1.0)) {
      std::ostringstream msg;
      msg << "time-to-event value " << t << " outside (0,1]";
      throw DomainError(msg.str());
    }
  }
}

double visible_energy(const VisibleState& x, const ModelParameters& theta) {
  require_time_domain(x);
  double e = 0.0;
  for (std::size_t i = 0; i < x.binary.size(); ++i) e += x.binary[i] * theta.a_binary[i];
  for (std::size_t i = 0; i < x.time.size(); ++i)
    e += x.time[i] * theta.a_time[i] - std::log(x.time[i]) * std::abs(theta.c_shape[i]);
  for (std::size_t i = 0; i < x.numeric.size(); ++i) {
    const double d = x.numeric[i] - theta.a_numeric[i];
    e += d * d / (2.0 * theta.sigma[i] * theta.sigma[i]);
  }
  return e;
}

double energy(const VisibleState& x, std::span<const double> h, const ModelParameters& theta) {
  const auto latent = latent_conditional(x, theta);
  // E = visible part + Σ_j h_j φ_j, since φ_j collects every term multiplying h_j.
  double e = visible_energy(x, theta);
  for (std::size_t j = 0; j < h.size(); ++j) e += h[j] * latent.phi[j];
  return e;
}

VisibleConditional visible_conditional_params(std::span<const double> h,
                                              const ModelParameters& theta) {
  const std::size_t nh = theta.n_hidden();
  VisibleConditional out;
  out.binary_activation.resize(theta.n_binary());
  out.time.resize(theta.n_time());
  out.numeric_mean.resize(theta.n_numeric());
  out.numeric_sd = theta.sigma;
  for (std::size_t i = 0; i < theta.n_binary(); ++i) {
    double z = theta.a_binary[i];
    for (std::size_t j = 0; j < nh; ++j) z += theta.w_binary(i, j) * h[j];
    out.binary_activation[i] = z;
  }
  for (std::size_t i = 0; i < theta.n_time(); ++i) {
    double alpha = std::abs(theta.c_shape[i]) + 1.0;
    double beta = theta.a_time[i];
    for (std::size_t j = 0; j < nh; ++j) {
      alpha += std::abs(theta.v_shape(i, j)) * h[j];
      beta += theta.w_time(i, j) * h[j];
    }
    out.time[i] = {alpha, beta};
  }
  for (std::size_t i = 0; i < theta.n_numeric(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < nh; ++j) s += theta.w_numeric(i, j) * h[j];
    out.numeric_mean[i] = theta.a_numeric[i] - theta.sigma[i] * s;
  }
  return out;
}

LatentConditional latent_conditional(const VisibleState& x, const ModelParameters& theta) {
  require_time_domain(x);
  const std::size_t nh = theta.n_hidden();
  LatentConditional out;
  out.phi = theta.b_latent;
  out.prob_on.resize(nh);
  for (std::size_t i = 0; i < x.binary.size(); ++i) {
    const auto row = theta.w_binary.row(i);
    for (std::size_t j = 0; j < nh; ++j) out.phi[j] += x.binary[i] * row[j];
  }
  for (std::size_t i = 0; i < x.time.size(); ++i) {
    const double log_t = std::log(x.time[i]);
    const auto w = theta.w_time.row(i);
    const auto v = theta.v_shape.row(i);
    for (std::size_t j = 0; j < nh; ++j) out.phi[j] += x.time[i] * w[j] - log_t * std::abs(v[j]);
  }
  for (std::size_t i = 0; i < x.numeric.size(); ++i) {
    const double scaled = x.numeric[i] / theta.sigma[i];
    const auto row = theta.w_numeric.row(i);
    for (std::size_t j = 0; j < nh; ++j) out.phi[j] += scaled * row[j];
  }
  for (std::size_t j = 0; j < nh; ++j) out.prob_on[j] = sigmoid(-out.phi[j]);
  return out;
}

double log_right_truncated_gamma_pdf(double x, const GammaParams& p) {
  if (!(x > 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << "truncated gamma density evaluated at " << x << " outside (0,1]";
    throw DomainError(msg.str());
  }
  return (p.alpha - 1.0) * std::log(x) - p.beta * x - log_gamma_integral(p.alpha, p.beta);
}

double right_truncated_gamma_pdf(double x, const GammaParams& p) {
  return std::exp(log_right_truncated_gamma_pdf(x, p));
}

double right_truncated_gamma_mean(const GammaParams& p) {
  return std::exp(log_gamma_integral(p.alpha + 1.0, p.beta) - log_gamma_integral(p.alpha, p.beta));
}

}  // namespace harmonium
