#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t pieces, double tol) {
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  double total = 0.0;
  const double width = (b - a) / static_cast<double>(pieces);
  for (std::size_t k = 0; k < pieces; ++k) {
    const double lo = a + width * static_cast<double>(k);
    const double hi = k + 1 == pieces ? b : lo + width;
    total += rule.integrate(f, lo, hi, tol);
  }
  return total;
}

double gamma_kernel(double x, const GammaParams& p, double shift) {
  if (x <= 0.0) return p.alpha == 1.0 ? std::exp(-shift) : 0.0;
  return std::exp((p.alpha - 1.0) * std::log(x) - p.beta * x - shift);
}

double gamma_kernel_log_peak(const GammaParams& p, double lo) {
  double mode = 1.0;
  if (p.beta > 0.0) mode = std::clamp((p.alpha - 1.0) / p.beta, lo, 1.0);
  if (mode <= 0.0) return 0.0;
  return (p.alpha - 1.0) * std::log(mode) - p.beta * mode;
}

double interval_gamma_cdf(double x, const GammaParams& p, double lo) {
  if (x <= lo) return 0.0;
  if (x >= 1.0) return 1.0;
  const double shift = gamma_kernel_log_peak(p, lo);
  const auto f = [&](double t) { return gamma_kernel(t, p, shift); };
  const double head = integrate(f, lo, x, 16);
  const double tail = integrate(f, x, 1.0, 16);
  return head / (head + tail);
}

double ks_test_interval_gamma(std::vector<double> draws, const GammaParams& p, double lo) {
  std::sort(draws.begin(), draws.end());
  const double shift = gamma_kernel_log_peak(p, lo);
  const auto f = [&](double t) { return gamma_kernel(t, p, shift); };
  const double total = integrate(f, lo, 1.0, 32);
  using rule = boost::math::quadrature::gauss<double, 20>;
  const double n = static_cast<double>(draws.size());
  double cumulative = 0.0, previous = lo, d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    if (draws[i] > previous) {
      // split long gaps so the fixed rule stays accurate on peaked densities
      const double gap = draws[i] - previous;
      const auto pieces = static_cast<std::size_t>(std::ceil(gap / 0.01));
      for (std::size_t k = 0; k < pieces; ++k) {
        const double a = previous + gap * static_cast<double>(k) / static_cast<double>(pieces);
        const double b = previous + gap * static_cast<double>(k + 1) / static_cast<double>(pieces);
        cumulative += rule::integrate(f, a, b);
      }
      previous = draws[i];
    }
    const double cdf = std::min(1.0, cumulative / total);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return ks_pvalue(d, n);
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double statistic, double n_effective) {
  const double root = std::sqrt(n_effective);
  const double lambda = (root + 0.12 + 0.11 / root) * statistic;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sample.size());
  return ks_pvalue(ks_statistic(std::move(sample), cdf), n);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return ks_pvalue(d, na * nb / (na + nb));
}

double chi_square_pvalue(double statistic, double dof) {
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

double reference_energy(const VisibleState& x, const std::vector<double>& h, const ModelParameters& t) {
  double e = 0.0;
  for (std::size_t i = 0; i < x.binary.size(); ++i) {
    double wh = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) wh += t.w_binary(i, j) * h[j];
    e += x.binary[i] * (wh + t.a_binary[i]);
  }
  for (std::size_t i = 0; i < x.time.size(); ++i) {
    double wh = 0.0, vh = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      wh += t.w_time(i, j) * h[j];
      vh += std::abs(t.v_shape(i, j)) * h[j];
    }
    e += x.time[i] * (wh + t.a_time[i]) - std::log(x.time[i]) * (vh + std::abs(t.c_shape[i]));
  }
  for (std::size_t i = 0; i < x.numeric.size(); ++i) {
    double wh = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) wh += t.w_numeric(i, j) * h[j];
    const double s = t.sigma[i];
    const double d = x.numeric[i] - t.a_numeric[i];
    e += x.numeric[i] * wh / s + d * d / (2.0 * s * s);
  }
  for (std::size_t j = 0; j < h.size(); ++j) e += t.b_latent[j] * h[j];
  return e;
}

std::vector<std::vector<double>> latent_states(std::size_t n) {
  std::vector<std::vector<double>> out;
  for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
    std::vector<double> h(n);
    for (std::size_t j = 0; j < n; ++j) h[j] = static_cast<double>((code >> j) & 1U);
    out.push_back(std::move(h));
  }
  return out;
}

double enumerate_log_marginal(const VisibleState& x, const ModelParameters& theta) {
  std::vector<double> logs;
  for (const auto& h : latent_states(theta.n_hidden())) logs.push_back(-reference_energy(x, h, theta));
  const double peak = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return peak + std::log(sum);
}

std::vector<double> enumerate_latent_posterior(const VisibleState& x, const ModelParameters& theta) {
  const std::size_t n = theta.n_hidden();
  const auto states = latent_states(n);
  std::vector<double> logs;
  for (const auto& h : states) logs.push_back(-reference_energy(x, h, theta));
  const double peak = *std::max_element(logs.begin(), logs.end());
  std::vector<double> on(n, 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    const double w = std::exp(logs[s] - peak);
    total += w;
    for (std::size_t j = 0; j < n; ++j) on[j] += w * states[s][j];
  }
  for (auto& v : on) v /= total;
  return on;
}

ModelParameters random_parameters(std::size_t na, std::size_t nb, std::size_t nc, std::size_t nh,
                                  harmonium::RngStream& rng, double scale) {
  ModelParameters t(na, nb, nc, nh);
  const auto u = [&] { return scale * (2.0 * rng.uniform() - 1.0); };
  for (auto* m : {&t.w_binary, &t.w_time, &t.w_numeric, &t.v_shape})
    for (auto& v : m->values()) v = u();
  for (auto* v : {&t.a_binary, &t.a_time, &t.c_shape, &t.a_numeric, &t.b_latent})
    for (auto& e : *v) e = u();
  for (auto& s : t.sigma) s = 0.5 + rng.uniform();
  return t;
}

VisibleState random_visible(std::size_t na, std::size_t nb, std::size_t nc, harmonium::RngStream& rng) {
  VisibleState x;
  for (std::size_t i = 0; i < na; ++i) x.binary.push_back(rng.uniform() < 0.5 ? 0.0 : 1.0);
  for (std::size_t i = 0; i < nb; ++i) x.time.push_back(0.05 + 0.95 * rng.uniform());
  for (std::size_t i = 0; i < nc; ++i) x.numeric.push_back(rng.normal());
  return x;
}

double kendall_tau_trend(const std::vector<double>& values) {
  double concordant = 0.0, discordant = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (values[j] > values[i]) concordant += 1.0;
      if (values[j] < values[i]) discordant += 1.0;
    }
  const double pairs = static_cast<double>(values.size() * (values.size() - 1) / 2);
  return pairs > 0 ? (concordant - discordant) / pairs : 0.0;
}

}  // namespace oracle
