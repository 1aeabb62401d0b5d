#include "harmonium/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "harmonium/error.hpp"

namespace harmonium {

double concordance_index(std::span<const ScoredSample> samples) {
  double concordant = 0.0;
  double comparable = 0.0;
  for (const auto& a : samples) {
    if (!a.event) continue;
    for (const auto& b : samples) {
      if (!(a.time < b.time)) continue;
      comparable += 1.0;
      if (a.risk < b.risk) concordant += 1.0;
      else if (a.risk == b.risk) concordant += 0.5;
    }
  }
  if (comparable == 0.0) throw DataError("concordance index: no comparable pairs");
  return concordant / comparable;
}

KaplanMeier::KaplanMeier(std::span<const double> times, std::span<const std::uint8_t> events) {
  if (times.empty() || times.size() != events.size())
    throw DataError("Kaplan-Meier needs equally sized, non-empty time and event lists");
  std::map<double, std::pair<std::size_t, std::size_t>> table;  // time -> (events, removed)
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto& entry = table[times[i]];
    entry.first += events[i] ? 1 : 0;
    entry.second += 1;
  }
  std::size_t at_risk = times.size();
  double s = 1.0;
  for (const auto& [t, counts] : table) {
    if (counts.first > 0) {
      s *= 1.0 - static_cast<double>(counts.first) / static_cast<double>(at_risk);
      times_.push_back(t);
      survival_.push_back(s);
    }
    at_risk -= counts.second;
  }
}

double KaplanMeier::operator()(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return survival_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double KaplanMeier::left_limit(double t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return survival_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double brier_loss(std::span<const ScoredSample> samples, double t, BrierWeighting weighting) {
  if (samples.empty()) throw DataError("Brier loss of an empty sample");
  std::vector<double> times;
  std::vector<std::uint8_t> censored;
  for (const auto& s : samples) {
    times.push_back(s.time);
    censored.push_back(s.event ? 0 : 1);
  }
  const KaplanMeier censoring(times, censored);

  auto inverse_weight = [&](double at) {
    const double g = censoring(at);
    if (g < kCensoringSurvivalFloor) {
      std::ostringstream msg;
      msg << "censoring survival estimate " << g << " at time " << at
          << " is below the floor " << kCensoringSurvivalFloor;
      throw NumericalError(msg.str());
    }
    return 1.0 / g;
  };

  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& s : samples) {
    const bool ipcw = weighting == BrierWeighting::ipcw;
    if (s.time <= t && s.event) {
      total += (ipcw ? inverse_weight(s.time) : 1.0) * s.risk * s.risk;
      ++counted;
    } else if (s.time > t) {
      total += (ipcw ? inverse_weight(t) : 1.0) * (1.0 - s.risk) * (1.0 - s.risk);
      ++counted;
    }
  }
  if (weighting == BrierWeighting::ipcw) return total / static_cast<double>(samples.size());
  if (counted == 0) throw DataError("Brier loss: every sample is censored before t");
  return total / static_cast<double>(counted);
}

}  // namespace harmonium
