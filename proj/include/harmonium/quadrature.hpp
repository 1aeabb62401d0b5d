#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace harmonium::quadrature {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are cached per n; the returned reference stays valid for the program lifetime.
const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Integrates f over [lo, hi] with the n-point Gauss-Legendre rule.
double integrate_gauss_legendre(const std::function<double(double)>& f, double lo, double hi,
                                std::size_t n);

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod. Stops when the summed error estimate drops
/// below max(abs_tol, rel_tol * |value|) or after max_intervals subdivisions.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                  double abs_tol, double rel_tol, std::size_t max_intervals = 2000);

}  // namespace harmonium::quadrature
