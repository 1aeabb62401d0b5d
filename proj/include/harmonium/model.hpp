#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "harmonium/matrix.hpp"

namespace harmonium {

/// Visible variable groups: binary (A), time-to-event (B), numeric (C).
enum class VariableGroup { binary, time_to_event, numeric };

std::string_view to_string(VariableGroup group);
VariableGroup parse_variable_group(std::string_view text);

struct VariableSpec {
  std::string name;
  VariableGroup group = VariableGroup::binary;
  /// Scaling divisor mapping raw times into (0,1]; only set for time-to-event variables.
  std::optional<double> time_horizon;

  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

/// Position of a variable inside its group.
struct VariableRef {
  VariableGroup group;
  std::size_t index;
};

/// Ordered declaration of the visible variables. Within-group order follows declaration order.
class VariableSchema {
 public:
  VariableSchema() = default;
  explicit VariableSchema(std::vector<VariableSpec> variables);

  const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
  std::size_t n_binary() const noexcept { return binary_.size(); }
  std::size_t n_time() const noexcept { return time_.size(); }
  std::size_t n_numeric() const noexcept { return numeric_.size(); }

  std::optional<VariableRef> find(std::string_view name) const;
  /// Variable declaration for a group-local index.
  const VariableSpec& spec(VariableGroup group, std::size_t index) const;
  std::vector<std::string> names(VariableGroup group) const;

  friend bool operator==(const VariableSchema& a, const VariableSchema& b) {
    return a.variables_ == b.variables_;
  }

 private:
  const std::vector<std::size_t>& members(VariableGroup group) const;

  std::vector<VariableSpec> variables_;
  std::vector<std::size_t> binary_;
  std::vector<std::size_t> time_;
  std::vector<std::size_t> numeric_;
};

/// Values and observed flags for one variable group. Unobserved binary and numeric
/// entries hold NaN; unobserved time entries hold the censoring time in [0,1).
struct GroupObservation {
  std::vector<double> value;
  std::vector<std::uint8_t> observed;

  std::size_t size() const noexcept { return value.size(); }
  void resize(std::size_t n);

  friend bool operator==(const GroupObservation&, const GroupObservation&) = default;
};

/// One sample: per-variable (value, observed) pairs.
struct Observation {
  GroupObservation binary;
  GroupObservation time;
  GroupObservation numeric;

  static Observation empty(std::size_t n_binary, std::size_t n_time, std::size_t n_numeric);

  bool fully_observed() const;
  void set_binary(std::size_t i, double value);
  void set_time(std::size_t i, double value);
  void censor_time(std::size_t i, double lower_bound);
  void set_numeric(std::size_t i, double value);
  void set_binary_missing(std::size_t i);
  void set_numeric_missing(std::size_t i);
};

/// Throws DataError when o violates the observation invariants for the given group sizes.
void validate_observation(const Observation& o, std::size_t n_binary, std::size_t n_time,
                          std::size_t n_numeric);

/// A full visible configuration x = (x^A, x^B, x^C).
struct VisibleState {
  std::vector<double> binary;
  std::vector<double> time;
  std::vector<double> numeric;

  friend bool operator==(const VisibleState&, const VisibleState&) = default;
};

/// All free parameters. V and c enter the energy through their absolute values.
struct ModelParameters {
  Matrix w_binary;   ///< |A| x |H|
  Matrix w_time;     ///< |B| x |H|
  Matrix w_numeric;  ///< |C| x |H|
  Matrix v_shape;    ///< |B| x |H|
  std::vector<double> a_binary;
  std::vector<double> a_time;
  std::vector<double> c_shape;
  std::vector<double> a_numeric;
  std::vector<double> sigma;
  std::vector<double> b_latent;

  ModelParameters() = default;
  /// Zero couplings and biases, unit scales.
  ModelParameters(std::size_t n_binary, std::size_t n_time, std::size_t n_numeric,
                  std::size_t n_hidden);

  std::size_t n_binary() const noexcept { return a_binary.size(); }
  std::size_t n_time() const noexcept { return a_time.size(); }
  std::size_t n_numeric() const noexcept { return a_numeric.size(); }
  std::size_t n_hidden() const noexcept { return b_latent.size(); }

  /// Throws NumericalError on non-finite entries or non-positive scales.
  void validate() const;

  friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

/// Shape and rate of a unit-interval truncated gamma. Any finite rate is allowed.
struct GammaParams {
  double alpha = 1.0;
  double beta = 0.0;
};

/// Per-variable parameters of p(x_i | h).
struct VisibleConditional {
  /// z_i; p(x_i = 1 | h) = sigmoid(-z_i).
  std::vector<double> binary_activation;
  std::vector<GammaParams> time;
  std::vector<double> numeric_mean;
  std::vector<double> numeric_sd;
};

/// φ_j and p(h_j = 1 | x) = sigmoid(-φ_j).
struct LatentConditional {
  std::vector<double> phi;
  std::vector<double> prob_on;
};

/// E(x, h). h may hold conditional means in [0,1]; the energy is affine in h.
double energy(const VisibleState& x, std::span<const double> h, const ModelParameters& theta);

/// Latent-free part of the energy: every term that does not multiply an h_j.
double visible_energy(const VisibleState& x, const ModelParameters& theta);

VisibleConditional visible_conditional_params(std::span<const double> h,
                                              const ModelParameters& theta);

LatentConditional latent_conditional(const VisibleState& x, const ModelParameters& theta);

/// x^{α-1} e^{-βx} / (Γ(α) γ*(α, β)) on (0, 1].
double right_truncated_gamma_pdf(double x, const GammaParams& p);
double log_right_truncated_gamma_pdf(double x, const GammaParams& p);

/// Mean of the right-truncated gamma on (0, 1].
double right_truncated_gamma_mean(const GammaParams& p);

/// Throws DomainError unless every time component lies in (0, 1].
void require_time_domain(const VisibleState& x);

}  // namespace harmonium
