#include <doctest.h>

#include <cmath>

#include "harmonium/error.hpp"
#include "harmonium/inference.hpp"
#include "oracles.hpp"

using namespace harmonium;

namespace {

const InferenceOptions kExact{MarginalizationMethod::exact_latent};
const InferenceOptions kNumeric{MarginalizationMethod::numeric_visible};

Observation observe(const VisibleState& x) {
  Observation o = Observation::empty(x.binary.size(), x.time.size(), x.numeric.size());
  for (std::size_t i = 0; i < x.binary.size(); ++i) o.set_binary(i, x.binary[i]);
  for (std::size_t i = 0; i < x.time.size(); ++i) o.set_time(i, x.time[i]);
  for (std::size_t i = 0; i < x.numeric.size(); ++i) o.set_numeric(i, x.numeric[i]);
  return o;
}

}  // namespace

TEST_CASE("fully observed weight equals the enumerated marginal") {
  RngStream rng(31, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const auto theta = oracle::random_parameters(2, 2, 2, 4, rng, 1.0);
    const auto x = oracle::random_visible(2, 2, 2, rng);
    const double expected = oracle::enumerate_log_marginal(x, theta);
    CHECK(log_unnormalized_marginal(x, theta) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(log_observation_weight(observe(x), theta, kExact) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(log_observation_weight(observe(x), theta, kNumeric) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("censoring at zero integrates the variable out") {
  RngStream rng(32, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto theta = oracle::random_parameters(1, 2, 1, 3, rng, 1.5);
    auto x = oracle::random_visible(1, 2, 1, rng);
    Observation o = observe(x);
    o.censor_time(1, 0.0);
    const double ref = oracle::enumerate_log_marginal(x, theta);
    const double integral = oracle::integrate(
        [&](double t) {
          if (t <= 0.0) return 0.0;
          auto y = x;
          y.time[1] = t;
          return std::exp(oracle::enumerate_log_marginal(y, theta) - ref);
        },
        0.0, 1.0, 16);
    const double expected = ref + std::log(integral);
    CHECK(log_observation_weight(o, theta, kExact) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(log_observation_weight(o, theta, kNumeric) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("exact and numeric marginalization agree") {
  RngStream rng(33, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nh = 1 + trial % 4;
    const auto theta = oracle::random_parameters(2, 2, 1, nh, rng, 1.5);
    const auto x = oracle::random_visible(2, 2, 1, rng);
    Observation o = observe(x);
    switch (trial % 3) {
      case 0:
        o.censor_time(0, 0.6 * rng.uniform());
        o.set_binary_missing(1);
        break;
      case 1:
        o.censor_time(1, 0.0);
        o.set_numeric_missing(0);
        break;
      default:
        o.censor_time(0, 0.3);
        o.censor_time(1, 0.7);
        o.set_binary_missing(0);
        o.set_binary_missing(1);
        break;
    }
    const double exact = log_observation_weight(o, theta, kExact);
    const double numeric = log_observation_weight(o, theta, kNumeric);
    CHECK(std::abs(exact - numeric) < 1e-6 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("risk score of a pure gamma equals its survival function") {
  ModelParameters theta(0, 1, 0, 2);
  theta.c_shape[0] = 7.1;
  theta.a_time[0] = 28.4;
  const GammaParams p{8.1, 28.4};
  Observation o = Observation::empty(0, 1, 0);
  for (const auto& options : {kExact, kNumeric}) {
    double worst = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double t = k / 51.0;
      const double r = risk_score({0, t, o, {}}, theta, options);
      worst = std::max(worst, std::abs(r - (1.0 - oracle::interval_gamma_cdf(t, p))));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("risk score limits and monotonicity") {
  RngStream rng(34, 1);
  const auto theta = oracle::random_parameters(1, 2, 1, 3, rng, 2.0);
  Observation o = observe(oracle::random_visible(1, 2, 1, rng));
  CHECK(risk_score({0, 0.0, o, {}}, theta) == 1.0);
  CHECK(risk_score({0, 1e-12, o, {}}, theta) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(risk_score({0, 1.0, o, {}}, theta) == 0.0);

  ModelParameters early(0, 1, 0, 1);
  early.c_shape[0] = 2.0;
  early.a_time[0] = 60.0;
  CHECK(risk_score({0, 0.999, Observation::empty(0, 1, 0), {}}, early) < 1e-12);

  double previous = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double r = risk_score({0, k / 100.0, o, {}}, theta);
    CHECK(r <= previous + 1e-12);
    CHECK((r >= 0.0 && r <= 1.0));
    previous = r;
  }
}

TEST_CASE("marginalizing equals censoring at zero") {
  RngStream rng(35, 1);
  const auto theta = oracle::random_parameters(1, 2, 0, 3, rng, 2.0);
  Observation o = observe(oracle::random_visible(1, 2, 0, rng));
  const double a = risk_score({0, 0.4, o, {1}}, theta);
  Observation censored = o;
  censored.censor_time(1, 0.0);
  CHECK(a == risk_score({0, 0.4, censored, {}}, theta));
  CHECK(a != doctest::Approx(risk_score({0, 0.4, o, {}}, theta)));
  CHECK_THROWS_AS(risk_score({0, 0.4, o, {0}}, theta), DataError);
}

TEST_CASE("constant energy shifts cancel") {
  RngStream rng(36, 1);
  const auto theta = oracle::random_parameters(2, 2, 1, 3, rng, 1.0);
  Observation o = observe(oracle::random_visible(2, 2, 1, rng));
  o.set_binary(0, 1.0);
  ModelParameters shifted = theta;
  shifted.a_binary[0] += 3.7;
  for (const auto& options : {kExact, kNumeric})
    CHECK(risk_score({1, 0.35, o, {}}, theta, options) ==
          doctest::Approx(risk_score({1, 0.35, o, {}}, shifted, options)).epsilon(1e-12));
}

TEST_CASE("capacity limits") {
  const ModelParameters wide(1, 1, 0, 26);
  Observation o = Observation::empty(1, 1, 0);
  o.set_binary(0, 1.0);
  CHECK_THROWS_AS(log_observation_weight(o, wide, kExact), CapacityError);
  CHECK_NOTHROW(log_observation_weight(o, wide));  // automatic picks quadrature

  const ModelParameters many(0, 3, 2, 2);
  CHECK_THROWS_AS(log_observation_weight(Observation::empty(0, 3, 2), many, kNumeric), CapacityError);
  CHECK_NOTHROW(log_observation_weight(Observation::empty(0, 3, 2), many, kExact));
}

TEST_CASE("latent embedding") {
  const ModelParameters zero(1, 1, 1, 3);
  const VisibleState x{{1.0}, {0.4}, {0.3}};
  RngStream rng(37, 1);
  for (double v : latent_embedding(observe(x), zero, 0, rng)) CHECK(v == 0.5);

  RngStream prng(37, 2);
  const auto theta = oracle::random_parameters(1, 1, 1, 2, prng, 2.0);
  CHECK(latent_embedding(observe(x), theta, 10, rng) == latent_conditional(x, theta).prob_on);

  Observation o = observe(x);
  o.set_binary_missing(0);
  std::vector<double> expected(2, 0.0);
  double total = 0.0;
  for (double a : {0.0, 1.0}) {
    VisibleState y = x;
    y.binary[0] = a;
    const double w = std::exp(oracle::enumerate_log_marginal(y, theta));
    const auto post = oracle::enumerate_latent_posterior(y, theta);
    for (std::size_t j = 0; j < 2; ++j) expected[j] += w * post[j];
    total += w;
  }
  const int chains = 400;
  std::vector<double> sum(2, 0.0), sq(2, 0.0);
  for (int c = 0; c < chains; ++c) {
    RngStream crng(37, 100 + c);
    const auto e = latent_embedding(o, theta, 50, crng);
    for (std::size_t j = 0; j < 2; ++j) {
      sum[j] += e[j];
      sq[j] += e[j] * e[j];
    }
  }
  for (std::size_t j = 0; j < 2; ++j) {
    const double mean = sum[j] / chains;
    const double se = std::sqrt((sq[j] / chains - mean * mean) / chains);
    CHECK(std::abs(mean - expected[j] / total) < 3.0 * se + 1e-3);
  }
}
