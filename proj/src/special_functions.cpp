#include "harmonium/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "harmonium/error.hpp"
#include "harmonium/quadrature.hpp"

namespace harmonium {
namespace {

constexpr double kRescale = 1e200;
constexpr double kLogRescale = 460.51701859880913680;  // ln 1e200
constexpr int kMaxTerms = 10'000'000;

// Sum of a positive series given its first term's log and a term-ratio functor; returns ln(sum).
template <typename Ratio>
double log_positive_series(double log_first, Ratio ratio, double turning_point) {
  double scale = log_first;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= ratio(n);
    sum += term;
    if (sum > kRescale) {
      sum /= kRescale;
      term /= kRescale;
      scale += kLogRescale;
    }
    if (n > turning_point && term <= sum * 1e-17) return scale + std::log(sum);
  }
  throw NumericalError("gamma series did not converge");
}

void require_shape(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    std::ostringstream msg;
    msg << "gamma integral requires shape a > 0, got " << a;
    throw DomainError(msg.str());
  }
}

}  // namespace

double log_gamma_integral(double a, double z) {
  require_shape(a);
  if (!std::isfinite(z)) throw DomainError("gamma integral requires a finite rate");
  if (z <= 0.0) {
    // Σ_n w^n / (n! (a + n)), w = -z, all terms positive.
    const double w = -z;
    if (w == 0.0) return -std::log(a);
    return log_positive_series(
        -std::log(a),
        [a, w](int n) {
          const double nn = static_cast<double>(n);
          return w / nn * (a + nn - 1.0) / (a + nn);
        },
        w);
  }
  // e^{-z} Σ_n z^n / (a (a+1) ... (a+n)), all terms positive.
  return -z + log_positive_series(
                  -std::log(a), [a, z](int n) { return z / (a + static_cast<double>(n)); }, z - a);
}

double log_gamma_head_integral(double a, double z, double upper) {
  if (!(upper > 0.0) || upper > 1.0) throw DomainError("gamma head integral requires upper in (0,1]");
  // ∫_0^u t^{a-1} e^{-zt} dt = u^a ∫_0^1 s^{a-1} e^{-zu s} ds
  return a * std::log(upper) + log_gamma_integral(a, z * upper);
}

double log_gamma_tail_integral(double a, double z, double lower) {
  require_shape(a);
  if (!(lower >= 0.0) || !(lower < 1.0)) {
    std::ostringstream msg;
    msg << "gamma tail integral requires lower bound in [0,1), got " << lower;
    throw DomainError(msg.str());
  }
  const double log_total = log_gamma_integral(a, z);
  if (lower == 0.0) return log_total;
  const double log_head = log_gamma_head_integral(a, z, lower);
  const double ratio = std::exp(log_head - log_total);
  if (ratio < 0.5) return log_total + std::log1p(-ratio);

  // The head carries most of the mass; integrate the tail directly to avoid cancellation.
  auto log_integrand = [a, z](double t) { return (a - 1.0) * std::log(t) - z * t; };
  double peak = 1.0;
  if (z > 0.0) peak = std::clamp((a - 1.0) / z, lower, 1.0);
  const double log_peak = std::max({log_integrand(peak), log_integrand(lower), log_integrand(1.0)});
  const auto result = quadrature::integrate_adaptive(
      [&](double t) { return std::exp(log_integrand(t) - log_peak); }, lower, 1.0, 0.0, 1e-14);
  return log_peak + std::log(result.value);
}

double lower_incomplete_gamma_star(double a, double z) {
  const double value = std::exp(log_gamma_integral(a, z) - std::lgamma(a));
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "incomplete gamma star overflows for a=" << a << ", z=" << z;
    throw NumericalError(msg.str());
  }
  return value;
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace harmonium
