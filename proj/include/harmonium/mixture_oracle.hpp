#pragma once

#include <array>

#include "harmonium/model.hpp"

namespace harmonium {

/// Four-mode, one-color Gaussian mixture over two time variables, used as a closed-form
/// ground truth for a four-unit harmonium.
struct MixtureTarget {
  std::array<std::array<double, 2>, 4> modes{};
  /// Diagonal covariance entries per mode.
  std::array<std::array<double, 2>, 4> variances{};
  std::array<int, 4> colors{};
  double sharpness = 50.0;
  double convergence = -30.0;

  /// XOR layout (red at (1/4,1/4), (3/4,3/4); blue at (3/4,1/4), (1/4,3/4)) with common sd.
  static MixtureTarget xor_layout(double sd = 0.0025, double sharpness = 50.0, double convergence = -30.0);
  void validate() const;
  /// Shape α and rate β of coordinate i in mode j implied by the Laplace match.
  GammaParams gamma(std::size_t j, std::size_t i) const;
};

/// Weights of a (1 binary, 2 time, 0 numeric, 4 hidden) harmonium whose density approximates
/// the target mixture: W^B = v/Σ, |V| = v²/Σ, w^A = -q(x̃ - 1/2), and
/// b = -w^A x̃ + Σ_i (α-1)(ln v - 1) + Λ. Other biases are zero.
ModelParameters build_analytic_harmonium(const MixtureTarget& target);

/// Σ_j π_j δ(x_A, x̃_j) N(x_B | v_j, Σ_j) with π_j ∝ √|Σ_j|.
double mixture_density(int x_a, std::array<double, 2> x_b, const MixtureTarget& target);

std::array<double, 4> mixture_weights(const MixtureTarget& target);

}  // namespace harmonium
