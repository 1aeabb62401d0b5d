// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select criteria by number.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "harmonium/inference.hpp"
#include "harmonium/metrics.hpp"
#include "harmonium/mixture_oracle.hpp"
#include "harmonium/samplers.hpp"
#include "harmonium/synthetic.hpp"
#include "harmonium/training.hpp"
#include "oracles.hpp"
#include "reference_cd.hpp"

using namespace harmonium;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome gradient_oracle() {
  RngStream rng(101, 0);
  double worst = 0.0;
  std::size_t compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto theta = oracle::random_parameters(2, 2, 2, 3, rng, 1.0);
    const auto x = oracle::random_visible(2, 2, 2, rng);
    std::vector<double> h(3);
    for (auto& v : h) v = rng.uniform();
    const Gradient g = energy_gradient(x, h, theta);
    ModelParameters probe = theta;
    auto params = parameter_tensors(probe);
    const auto analytic = g.tensors();
    for (std::size_t k = 0; k < params.size(); ++k) {
      const bool absolute = k == 3 || k == 6;  // |V| and |c|
      for (std::size_t n = 0; n < params[k].size(); ++n) {
        double& v = params[k][n];
        if (absolute && std::abs(v) < 1e-4) continue;
        const double keep = v;
        const double step = 1e-5 * std::max(1.0, std::abs(keep));
        v = keep + step;
        const double up = oracle::reference_energy(x, h, probe);
        v = keep - step;
        const double down = oracle::reference_energy(x, h, probe);
        v = keep;
        const double fd = (up - down) / (2.0 * step);
        const double a = analytic[k][n];
        worst = std::max(worst, std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-3}));
        ++compared;
      }
    }
  }
  return {worst < 1e-5, fmt("%zu components, max relative error %.2e (< 1e-5)", compared, worst)};
}

// ---------------------------------------------------------------- 2

Outcome conditional_normalization() {
  RngStream rng(102, 0);
  double worst = 0.0;
  double worst_shape = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto theta = oracle::random_parameters(2, 2, 2, 4, rng, 1.5);
    std::vector<double> h(4);
    for (auto& v : h) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
    const auto cond = visible_conditional_params(h, theta);
    const auto base = oracle::random_visible(2, 2, 2, rng);

    for (std::size_t i = 0; i < 2; ++i) {
      const double z = cond.binary_activation[i];
      worst = std::max(worst, std::abs(1.0 / (1.0 + std::exp(z)) + 1.0 / (1.0 + std::exp(-z)) - 1.0));
      auto on = base, off = base;
      on.binary[i] = 1.0;
      off.binary[i] = 0.0;
      const double ratio = std::exp(oracle::reference_energy(off, h, theta) - oracle::reference_energy(on, h, theta));
      worst_shape = std::max(worst_shape, std::abs(ratio / std::exp(-z) - 1.0));
    }

    for (std::size_t i = 0; i < 2; ++i) {
      const GammaParams p = cond.time[i];
      const double mass = oracle::integrate([&](double t) { return t > 0.0 ? right_truncated_gamma_pdf(t, p) : 0.0; },
                                            0.0, 1.0, 16, 1e-14);
      worst = std::max(worst, std::abs(mass - 1.0));
      auto a = base, b = base;
      a.time[i] = 0.3;
      b.time[i] = 0.8;
      const double model = std::exp(oracle::reference_energy(a, h, theta) - oracle::reference_energy(b, h, theta));
      const double claimed = right_truncated_gamma_pdf(0.8, p) / right_truncated_gamma_pdf(0.3, p);
      worst_shape = std::max(worst_shape, std::abs(model / claimed - 1.0));
    }

    for (std::size_t i = 0; i < 2; ++i) {
      const double mu = cond.numeric_mean[i], sd = cond.numeric_sd[i];
      const auto pdf = [&](double x) {
        const double u = (x - mu) / sd;
        return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * std::numbers::pi));
      };
      const double mass = oracle::integrate(pdf, mu - 40.0 * sd, mu + 40.0 * sd, 16, 1e-14);
      worst = std::max(worst, std::abs(mass - 1.0));
      auto a = base, b = base;
      a.numeric[i] = mu - 0.7 * sd;
      b.numeric[i] = mu + 1.1 * sd;
      const double model = std::exp(oracle::reference_energy(a, h, theta) - oracle::reference_energy(b, h, theta));
      worst_shape = std::max(worst_shape, std::abs(model / (pdf(b.numeric[i]) / pdf(a.numeric[i])) - 1.0));
    }
  }
  return {worst < 1e-8 && worst_shape < 1e-8,
          fmt("max |mass - 1| %.2e, max density/energy mismatch %.2e (< 1e-8)", worst, worst_shape)};
}

// ---------------------------------------------------------------- 3

Outcome sampler_law() {
  double min_p = 1.0;
  std::string where;
  std::size_t cell = 0;
  for (double alpha : {1.0, 1.5, 8.1, 29.0})
    for (double beta : {-76.0, -5.0, 0.0, 5.0, 58.0, 76.0})
      for (double lo : {0.0, 0.3, 0.75}) {
        RngStream rng(103, cell++);
        std::vector<double> draws(100000);
        for (auto& d : draws) d = sample_interval_truncated_gamma({alpha, beta}, lo, rng);
        const double p = oracle::ks_test_interval_gamma(std::move(draws), {alpha, beta}, lo);
        if (p < min_p) {
          min_p = p;
          where = fmt("alpha=%g beta=%g t=%g", alpha, beta, lo);
        }
      }
  return {min_p > 1e-3, fmt("%zu cells x 1e5 draws, min KS p %.4f at %s (> 0.001)", cell, min_p, where.c_str())};
}

// ---------------------------------------------------------------- 4

Outcome enumeration_equivalence() {
  RngStream rng(104, 0);
  double posterior = 0.0, weight = 0.0, censored = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t nh = 1 + trial % 4;
    const std::size_t na = trial % 3, nb = 1 + trial % 2;
    const auto theta = oracle::random_parameters(na, nb, 1, nh, rng, 1.5);
    const auto x = oracle::random_visible(na, nb, 1, rng);

    const auto lib = latent_conditional(x, theta).prob_on;
    const auto ref = oracle::enumerate_latent_posterior(x, theta);
    for (std::size_t j = 0; j < nh; ++j) posterior = std::max(posterior, std::abs(lib[j] - ref[j]));

    Observation o = Observation::empty(na, nb, 1);
    for (std::size_t i = 0; i < na; ++i) o.set_binary(i, x.binary[i]);
    for (std::size_t i = 0; i < nb; ++i) o.set_time(i, x.time[i]);
    o.set_numeric(0, x.numeric[0]);
    const double log_marginal = oracle::enumerate_log_marginal(x, theta);
    for (auto method : {MarginalizationMethod::exact_latent, MarginalizationMethod::numeric_visible})
      weight = std::max(weight, std::abs(log_observation_weight(o, theta, {method}) - log_marginal) /
                                    std::max(1.0, std::abs(log_marginal)));

    const double xi = 0.5 * rng.uniform();
    o.censor_time(0, xi);
    const double integral = oracle::integrate(
        [&](double t) {
          if (t <= 0.0) return 0.0;
          auto y = x;
          y.time[0] = t;
          return std::exp(oracle::enumerate_log_marginal(y, theta) - log_marginal);
        },
        xi, 1.0, 16);
    const double expected = log_marginal + std::log(integral);
    for (auto method : {MarginalizationMethod::exact_latent, MarginalizationMethod::numeric_visible})
      censored = std::max(censored, std::abs(log_observation_weight(o, theta, {method}) - expected) /
                                        std::max(1.0, std::abs(expected)));
  }

  RngStream prng(104, 1);
  const auto theta = oracle::random_parameters(1, 1, 0, 2, prng, 1.0);
  double mass[2] = {0.0, 0.0};
  for (int a = 0; a < 2; ++a)
    for (const auto& h : oracle::latent_states(2))
      mass[a] += oracle::integrate(
          [&](double t) {
            return t > 0.0 ? std::exp(-oracle::reference_energy(VisibleState{{double(a)}, {t}, {}}, h, theta)) : 0.0;
          },
          0.0, 1.0, 8);
  const double expected = mass[1] / (mass[0] + mass[1]);
  const int chains = 4000;
  double ones = 0.0;
  for (int c = 0; c < chains; ++c) {
    RngStream crng(104, 100 + c);
    ones += negative_phase(VisibleState{{0.0}, {0.5}, {}}, theta, 500, crng).x.binary[0];
  }
  const double freq = ones / chains;
  const double se = std::sqrt(expected * (1.0 - expected) / chains);
  const double z = std::abs(freq - expected) / se;

  const bool pass = posterior < 1e-10 && weight < 1e-10 && censored < 1e-8 && z < 3.0;
  return {pass, fmt("posterior %.1e, observed weight %.1e (< 1e-10); censored weight %.1e (< 1e-8); "
                    "gibbs marginal %.4f vs %.4f, %.2f SE (< 3)",
                    posterior, weight, censored, freq, expected, z)};
}

// ---------------------------------------------------------------- 5

// Fixed composite Gauss-Legendre on a square; identical nodes for every target.
double box_integral(const std::function<double(double, double)>& f, std::array<double, 2> lo, std::array<double, 2> hi,
                    int panels) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  std::vector<double> nodes[2], weights[2];
  for (int d = 0; d < 2; ++d) {
    const double width = (hi[d] - lo[d]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo[d] + (p + 0.5) * width, half = 0.5 * width;
      for (std::size_t k = 0; k < x.size(); ++k)
        for (double sign : {-1.0, 1.0}) {
          if (x[k] == 0.0 && sign > 0.0) continue;  // a centre node is stored once
          nodes[d].push_back(mid + sign * half * x[k]);
          weights[d].push_back(half * w[k]);
        }
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < nodes[0].size(); ++i)
    for (std::size_t j = 0; j < nodes[1].size(); ++j)
      total += weights[0][i] * weights[1][j] * f(nodes[0][i], nodes[1][j]);
  return total;
}

struct MixtureCheck {
  double max_rel = 0.0;
  double tv = 0.0;
};

MixtureCheck check_mixture(const MixtureTarget& target) {
  const auto theta = build_analytic_harmonium(target);
  const double shift = -target.convergence;
  const auto unnormalized = [&](int a, double t1, double t2) {
    return std::exp(oracle::enumerate_log_marginal(VisibleState{{double(a)}, {t1, t2}, {}}, theta) - shift);
  };
  std::array<std::array<double, 2>, 4> lo{}, hi{};
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < 2; ++i) {
      const double sd = std::sqrt(target.variances[j][i]);
      lo[j][i] = target.modes[j][i] - 12.0 * sd;
      hi[j][i] = target.modes[j][i] + 12.0 * sd;
    }
  double z = 0.0;
  for (int a : {0, 1})
    for (std::size_t j = 0; j < 4; ++j)
      z += box_integral([&](double u, double v) { return unnormalized(a, u, v); }, lo[j], hi[j], 8);

  MixtureCheck out;
  for (int a : {0, 1})
    for (std::size_t j = 0; j < 4; ++j)
      out.tv += 0.5 * box_integral(
                          [&](double u, double v) {
                            return std::abs(unnormalized(a, u, v) / z - mixture_density(a, {u, v}, target));
                          },
                          lo[j], hi[j], 8);

  for (std::size_t j = 0; j < 4; ++j) {
    const int a = target.colors[j];
    const double s0 = std::sqrt(target.variances[j][0]), s1 = std::sqrt(target.variances[j][1]);
    for (int p = 0; p < 50; ++p)
      for (int q = 0; q < 50; ++q) {
        const double d0 = -2.0 + 4.0 * p / 49.0, d1 = -2.0 + 4.0 * q / 49.0;
        if (d0 * d0 + d1 * d1 > 4.0) continue;
        const std::array<double, 2> x{target.modes[j][0] + d0 * s0, target.modes[j][1] + d1 * s1};
        const double g = mixture_density(a, x, target);
        out.max_rel = std::max(out.max_rel, std::abs(unnormalized(a, x[0], x[1]) / z / g - 1.0));
      }
  }
  return out;
}

Outcome mixture_oracle() {
  const auto main = check_mixture(MixtureTarget::xor_layout());
  std::vector<double> tv;
  for (double q : {10.0, 25.0, 50.0}) tv.push_back(check_mixture(MixtureTarget::xor_layout(0.0025, q)).tv);
  const bool decreasing = tv[0] > tv[1] && tv[1] > tv[2];
  return {main.max_rel < 0.05 && decreasing,
          fmt("max relative error %.4f within 2 sd of each mode (< 0.05); TV at q=10,25,50: %.3e, %.3e, %.3e", main.max_rel,
              tv[0], tv[1], tv[2])};
}

// ---------------------------------------------------------------- 6, 7

constexpr std::size_t kXorBatch = 100;
constexpr std::size_t kXorEpochs = 30000;

const ModelParameters& xor_model() {
  static const ModelParameters theta = [] {
    XorSpec spec = XorSpec::defaults();
    spec.n_samples = 1000;
    spec.seed = 1;
    const auto data = generate_xor(spec);
    TrainConfig c;
    c.n_hidden = 4;
    c.learning_rate = 0.375;
    c.momentum = 0.1;
    c.persistent = true;
    c.cd_steps = 3;
    c.minibatch_size = kXorBatch;
    c.epochs = kXorEpochs;
    c.seed = 1;
    return fit(data.observations, data.schema, c).parameters;
  }();
  return theta;
}

Outcome xor_recovery() {
  const auto& theta = xor_model();
  const auto spec = XorSpec::defaults();
  constexpr int n = 40;
  bool pass = true;
  std::string detail;
  for (int color : {0, 1}) {
    std::vector<double> grid(n * n);
    double mass = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const VisibleState x{{double(color)}, {(i + 0.5) / n, (j + 0.5) / n}, {}};
        grid[i * n + j] = log_unnormalized_marginal(x, theta);
      }
    const double top = *std::max_element(grid.begin(), grid.end());
    for (double g : grid) mass += std::exp(g - top) / (n * n);
    std::vector<std::array<double, 2>> maxima;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        bool peak = true;
        for (int di = -1; di <= 1 && peak; ++di)
          for (int dj = -1; dj <= 1 && peak; ++dj) {
            const int a = i + di, b = j + dj;
            if ((di || dj) && a >= 0 && b >= 0 && a < n && b < n && grid[a * n + b] >= grid[i * n + j]) peak = false;
          }
        if (peak) maxima.push_back({(i + 0.5) / n, (j + 0.5) / n});
      }
    std::vector<std::array<double, 2>> truth;
    for (const auto& m : spec.modes)
      if (m.color == color) truth.push_back(m.center);
    std::set<std::size_t> matched;
    for (const auto& m : maxima)
      for (std::size_t k = 0; k < truth.size(); ++k)
        if (std::max(std::abs(m[0] - truth[k][0]), std::abs(m[1] - truth[k][1])) <= 0.12) matched.insert(k);
    const bool ok = maxima.size() == 2 && matched.size() == 2;
    pass = pass && ok;
    detail += fmt("color %d: %zu maxima [", color, maxima.size());
    for (const auto& m : maxima) detail += fmt(" (%.3f,%.3f)", m[0], m[1]);
    detail += fmt(" ], peak density %.2f; ", 1.0 / mass);
  }
  detail += fmt("need exactly 2 per color within 0.12 of the true modes (%zu epochs, batch %zu)", kXorEpochs, kXorBatch);
  return {pass, detail};
}

double c_index_of(const SyntheticData& data, const ModelParameters& theta, std::vector<std::size_t> marginalize) {
  std::vector<ScoredSample> scored;
  for (const auto& o : data.observations) {
    const double r = risk_score({0, 0.5, o, marginalize}, theta);
    scored.push_back({o.time.value[0], o.time.observed[0] != 0, r});
  }
  return concordance_index(scored);
}

Outcome xor_discrimination() {
  const auto& theta = xor_model();
  XorSpec spec = XorSpec::defaults();
  spec.n_samples = 1000;
  spec.seed = 2;
  const auto held_out = generate_xor(spec);
  const double conditioned = c_index_of(held_out, theta, {});
  const double marginal = c_index_of(held_out, theta, {1});
  const bool pass = conditioned >= 0.60 && std::abs(marginal - 0.5) <= 0.05;
  return {pass, fmt("C-index given (color, t2) %.4f (>= 0.60); color only %.4f (0.5 +- 0.05)", conditioned, marginal)};
}

// ---------------------------------------------------------------- 8

bool same_bits(const ModelParameters& a, const ModelParameters& b) {
  const auto ta = parameter_tensors(a);
  const auto tb = parameter_tensors(b);
  for (std::size_t k = 0; k < ta.size(); ++k) {
    if (ta[k].size() != tb[k].size()) return false;
    for (std::size_t n = 0; n < ta[k].size(); ++n)
      if (std::bit_cast<std::uint64_t>(ta[k][n]) != std::bit_cast<std::uint64_t>(tb[k][n])) return false;
  }
  return true;
}

Outcome classical_reduction() {
  RngStream rng(108, 0);
  std::vector<Observation> data;
  std::vector<std::vector<double>> rows;
  for (int r = 0; r < 60; ++r) {
    Observation o = Observation::empty(3, 0, 2);
    const bool group = rng.uniform() < 0.5;
    std::vector<double> row;
    for (std::size_t i = 0; i < 3; ++i) {
      o.set_binary(i, rng.uniform() < (group ? 0.8 : 0.2) ? 1.0 : 0.0);
      row.push_back(o.binary.value[i]);
    }
    for (std::size_t c = 0; c < 2; ++c) {
      o.set_numeric(c, (group ? 1.0 : -1.0) + 0.5 * rng.normal());
      row.push_back(o.numeric.value[c]);
    }
    data.push_back(o);
    rows.push_back(row);
  }
  std::size_t epochs = 0;
  std::size_t settings = 0;
  for (bool persistent : {false, true}) {
    TrainConfig c;
    c.n_hidden = 4;
    c.learning_rate = 0.02;
    c.minibatch_size = 15;
    c.cd_steps = persistent ? 3 : 1;
    c.persistent = persistent;
    c.momentum = persistent ? 0.5 : 0.0;
    c.l2_penalty = persistent ? 1e-3 : 0.0;
    c.seed = 17;
    RngStream init_rng(17, 1);
    const auto init = initialize_parameters(data, 3, 0, 2, 4, init_rng);
    Trainer trainer(data, init, c, compute_imputation(data, 3, 0, 2));
    oracle::ReferenceCd reference(rows, 3, init,
                                  {c.learning_rate, c.minibatch_size, c.cd_steps, c.persistent, c.momentum, c.l2_penalty, c.seed});
    for (int e = 0; e < 50; ++e) {
      trainer.run_epoch();
      reference.epoch();
      if (!same_bits(trainer.parameters(), reference.parameters()))
        return {false, fmt("trajectories diverge at epoch %d (persistent=%d)", e + 1, int(persistent))};
      ++epochs;
    }
    ++settings;
  }
  return {true, fmt("%zu settings, %zu epochs bit-identical to the textbook loop", settings, epochs)};
}

// ---------------------------------------------------------------- 9

Outcome metrics_fixtures() {
  const std::vector<ScoredSample> six{{0.1, true, 0.2}, {0.2, false, 0.5}, {0.3, true, 0.4},
                                      {0.5, false, 0.7}, {0.6, true, 0.9}, {0.8, true, 0.6}};
  const std::vector<ScoredSample> tied{{0.1, true, 0.3}, {0.2, true, 0.3}, {0.4, false, 0.6}, {0.5, true, 0.1}};
  const double c6 = concordance_index(six);
  const double ct = concordance_index(tied);
  const double b6 = brier_loss(six, 0.55);
  const double u6 = brier_loss(six, 0.55, BrierWeighting::unweighted);
  const double want_c6 = 8.0 / 9.0;
  // Comparable pairs from the two earliest events: one tie, two concordant, two discordant.
  const double want_ct = (0.5 + 1.0 + 0.0 + 1.0 + 0.0) / 5.0;
  const double want_b6 = (0.04 + 0.16 / 0.8 + (0.01 + 0.16) * 15.0 / 8.0) / 6.0;
  const double want_u6 = 0.37 / 4.0;
  const double err = std::max({std::abs(c6 - want_c6), std::abs(ct - want_ct), std::abs(b6 - want_b6), std::abs(u6 - want_u6)});
  return {err < 1e-12, fmt("C %.6f/%.6f, Brier IPCW %.6f, unweighted %.6f; max deviation %.1e", c6, ct, b6, u6, err)};
}

// ---------------------------------------------------------------- 10

Outcome second_survival_variable() {
  double conditioned = 0.0, marginal = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CorrelatedSurvivalSpec spec;
    spec.n_samples = 500;
    spec.seed = 1000 + seed;
    const auto train = generate_correlated_survival(spec);
    spec.seed = 2000 + seed;
    const auto test = generate_correlated_survival(spec);
    TrainConfig c;
    c.n_hidden = 4;
    c.learning_rate = 0.1;
    c.momentum = 0.1;
    c.persistent = true;
    c.cd_steps = 3;
    c.minibatch_size = 50;
    c.epochs = 2000;
    c.seed = seed;
    const auto theta = fit(train.observations, train.schema, c).parameters;
    const double a = c_index_of(test, theta, {});
    const double b = c_index_of(test, theta, {1});
    conditioned += a / 5.0;
    marginal += b / 5.0;
    per_seed += fmt(" %.3f/%.3f", a, b);
  }
  return {conditioned > marginal,
          fmt("mean C-index given t2 %.4f vs t2 integrated out %.4f (per seed:%s)", conditioned, marginal, per_seed.c_str())};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "gradient oracle", gradient_oracle},
      {2, "conditional normalization", conditional_normalization},
      {3, "sampler law", sampler_law},
      {4, "enumeration equivalence", enumeration_equivalence},
      {5, "analytic mixture harmonium", mixture_oracle},
      {6, "XOR mode recovery", xor_recovery},
      {7, "XOR discrimination", xor_discrimination},
      {8, "classical CD reduction", classical_reduction},
      {9, "metric fixtures", metrics_fixtures},
      {10, "second survival variable helps", second_survival_variable},
  };
  // Numbers select criteria; --known-fail=N keeps a documented failure from failing the run.
  std::set<int> wanted, known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.starts_with("--known-fail=")) known.insert(std::atoi(arg.c_str() + 13));
    else wanted.insert(std::atoi(arg.c_str()));
  }

  int failures = 0;
  std::string known_failed;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass && known.contains(c.id)) known_failed += " " + std::to_string(c.id);
    else if (!o.pass) ++failures;
    std::printf("criterion %2d %s: %s | %s [%.1fs]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("summary: %d unexpected failure(s); known failure(s):%s\n", failures,
              known_failed.empty() ? " none" : known_failed.c_str());
  return failures == 0 ? 0 : 1;
}
