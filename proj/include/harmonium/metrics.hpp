#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace harmonium {

/// One evaluated sample: scaled time, event flag, and predicted survival at the
/// evaluation time point.
struct ScoredSample {
  double time = 0.0;
  bool event = false;
  double risk = 0.0;
};

/// Harrell's C over comparable pairs (time_i < time_j, event_i). A pair is concordant when the
/// earlier failure has the lower predicted survival; risk ties count 1/2. Equal times are not
/// comparable. Throws DataError when no comparable pair exists.
double concordance_index(std::span<const ScoredSample> samples);

/// Product-limit estimator. Right-continuous step function with S(t) = 1 before the first event.
class KaplanMeier {
 public:
  KaplanMeier(std::span<const double> times, std::span<const std::uint8_t> events);

  /// Ŝ(t), right-continuous.
  double operator()(double t) const;
  /// Ŝ(t-).
  double left_limit(double t) const;

  const std::vector<double>& jump_times() const noexcept { return times_; }
  const std::vector<double>& survival_after_jump() const noexcept { return survival_; }

 private:
  std::vector<double> times_;
  std::vector<double> survival_;
};

enum class BrierWeighting { ipcw, unweighted };

/// Smallest censoring-survival value accepted for inverse weighting.
inline constexpr double kCensoringSurvivalFloor = 1e-8;

/// Brier score at time t. IPCW (Graf et al.) weights use a Kaplan-Meier fit of the censoring
/// distribution: failures by t are weighted 1/Ĝ(time_i), survivors past t by 1/Ĝ(t), and
/// samples censored by t get weight 0. The unweighted variant drops samples censored by t and
/// averages over the rest. Throws NumericalError when a required Ĝ falls below
/// kCensoringSurvivalFloor.
double brier_loss(std::span<const ScoredSample> samples, double t,
                  BrierWeighting weighting = BrierWeighting::ipcw);

}  // namespace harmonium
