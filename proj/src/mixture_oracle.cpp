#include "harmonium/mixture_oracle.hpp"

#include <cmath>
#include <numbers>

#include "harmonium/error.hpp"

namespace harmonium {

MixtureTarget MixtureTarget::xor_layout(double sd, double sharpness, double convergence) {
  MixtureTarget t;
  t.modes = {{{0.25, 0.25}, {0.75, 0.75}, {0.75, 0.25}, {0.25, 0.75}}};
  t.colors = {0, 0, 1, 1};
  for (auto& v : t.variances) v = {sd * sd, sd * sd};
  t.sharpness = sharpness;
  t.convergence = convergence;
  t.validate();
  return t;
}

void MixtureTarget::validate() const {
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t i = 0; i < 2; ++i) {
      if (!(modes[j][i] > 0.0 && modes[j][i] < 1.0)) throw ConfigError("mixture modes must lie in (0, 1)");
      if (!(variances[j][i] > 0.0)) throw ConfigError("mixture variances must be positive");
    }
    if (colors[j] != 0 && colors[j] != 1) throw ConfigError("mixture colors must be 0 or 1");
  }
  if (!(sharpness > 0.0)) throw ConfigError("sharpness must be positive");
}

GammaParams MixtureTarget::gamma(std::size_t j, std::size_t i) const {
  const double v = modes.at(j).at(i);
  const double s = variances.at(j).at(i);
  return {1.0 + v * v / s, v / s};
}

ModelParameters build_analytic_harmonium(const MixtureTarget& target) {
  target.validate();
  ModelParameters theta(1, 2, 0, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    const double w = -target.sharpness * (target.colors[j] - 0.5);
    theta.w_binary(0, j) = w;
    double b = -w * target.colors[j] + target.convergence;
    for (std::size_t i = 0; i < 2; ++i) {
      const GammaParams g = target.gamma(j, i);
      theta.w_time(i, j) = g.beta;
      theta.v_shape(i, j) = g.alpha - 1.0;
      b += (g.alpha - 1.0) * (std::log(target.modes[j][i]) - 1.0);
    }
    theta.b_latent[j] = b;
  }
  return theta;
}

std::array<double, 4> mixture_weights(const MixtureTarget& target) {
  std::array<double, 4> pi{};
  double total = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    pi[j] = std::sqrt(target.variances[j][0] * target.variances[j][1]);
    total += pi[j];
  }
  for (auto& p : pi) p /= total;
  return pi;
}

double mixture_density(int x_a, std::array<double, 2> x_b, const MixtureTarget& target) {
  const auto pi = mixture_weights(target);
  double total = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    if (target.colors[j] != x_a) continue;
    double quad = 0.0;
    double det = 1.0;
    for (std::size_t i = 0; i < 2; ++i) {
      const double d = x_b[i] - target.modes[j][i];
      quad += d * d / target.variances[j][i];
      det *= target.variances[j][i];
    }
    total += pi[j] * std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
  }
  return total;
}

}  // namespace harmonium
