#include "harmonium/synthetic.hpp"

#include <cmath>
#include <string>

#include "harmonium/error.hpp"
#include "harmonium/rng.hpp"
#include "harmonium/samplers.hpp"

namespace harmonium {

namespace {

constexpr std::uint64_t kXorStream = 0x786f72;
constexpr std::uint64_t kCorrelatedStream = 0x636f7272;

XorSpec make_spec(GammaParams quarter, GammaParams three_quarters) {
  XorSpec s;
  const std::array<std::array<double, 2>, 4> centers{{{0.25, 0.25}, {0.75, 0.75}, {0.75, 0.25}, {0.25, 0.75}}};
  const std::array<int, 4> colors{0, 0, 1, 1};
  for (std::size_t j = 0; j < 4; ++j) {
    s.modes[j].center = centers[j];
    s.modes[j].color = colors[j];
    for (std::size_t i = 0; i < 2; ++i) s.modes[j].gamma[i] = centers[j][i] < 0.5 ? quarter : three_quarters;
  }
  return s;
}

double censor(double t, double threshold, double prob, RngStream& rng, bool& censored) {
  censored = false;
  const double u = rng.uniform();
  if (t > threshold && u < prob) {
    censored = true;
    return threshold + (t - threshold) * rng.uniform();
  }
  return t;
}

void check_censoring(double threshold, double prob) {
  if (!(threshold >= 0.0 && threshold < 1.0)) throw ConfigError("censor threshold must lie in [0, 1)");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("censor probability must lie in [0, 1]");
}

void record(SyntheticData& out, int color, std::array<double, 2> t, int mode, double threshold, double prob,
            RngStream& rng) {
  Observation o = Observation::empty(1, 2, 0);
  o.set_binary(0, color);
  for (std::size_t i = 0; i < 2; ++i) {
    bool censored = false;
    const double xi = censor(t[i], threshold, prob, rng, censored);
    if (censored)
      o.censor_time(i, xi);
    else
      o.set_time(i, xi);
  }
  out.observations.push_back(std::move(o));
  out.event_times.push_back(t);
  out.modes.push_back(mode);
}

}  // namespace

XorSpec XorSpec::defaults() {
  return make_spec({8.1, 7.1 / 0.25}, {29.0, 28.0 / 0.75});
}

XorSpec XorSpec::literal_rates() { return make_spec({8.1, 58.0}, {29.0, 76.0}); }

void XorSpec::validate() const {
  for (const auto& m : modes) {
    for (std::size_t i = 0; i < 2; ++i) {
      if (!(m.center[i] > 0.0 && m.center[i] < 1.0)) throw ConfigError("mode centers must lie in (0, 1)");
      if (!(m.gamma[i].alpha >= 1.0) || !std::isfinite(m.gamma[i].beta))
        throw ConfigError("mode gamma parameters need alpha >= 1 and finite beta");
    }
    if (m.color != 0 && m.color != 1) throw ConfigError("mode colors must be 0 or 1");
  }
  check_censoring(censor_threshold, censor_prob);
}

VariableSchema xor_schema() {
  return VariableSchema({{"color", VariableGroup::binary, std::nullopt},
                         {"t1", VariableGroup::time_to_event, 1.0},
                         {"t2", VariableGroup::time_to_event, 1.0}});
}

SyntheticData generate_xor(const XorSpec& spec) {
  spec.validate();
  SyntheticData out;
  out.schema = xor_schema();
  for (std::size_t n = 0; n < spec.n_samples; ++n) {
    RngStream rng(spec.seed, stream_key({kXorStream, n}));
    const auto j = std::min<std::size_t>(3, static_cast<std::size_t>(rng.uniform() * 4.0));
    const XorMode& m = spec.modes[j];
    std::array<double, 2> t{};
    for (std::size_t i = 0; i < 2; ++i) t[i] = sample_interval_truncated_gamma(m.gamma[i], 0.0, rng);
    record(out, m.color, t, static_cast<int>(j), spec.censor_threshold, spec.censor_prob, rng);
  }
  return out;
}

double xor_reference_density(int color, double t1, double t2, const XorSpec& spec) {
  if (!(t1 > 0.0 && t1 <= 1.0 && t2 > 0.0 && t2 <= 1.0))
    throw DomainError("xor density needs times in (0, 1]");
  double total = 0.0;
  for (const auto& m : spec.modes)
    if (m.color == color) total += right_truncated_gamma_pdf(t1, m.gamma[0]) * right_truncated_gamma_pdf(t2, m.gamma[1]);
  return 0.25 * total;
}

void CorrelatedSurvivalSpec::validate() const {
  if (!(covariate_agreement >= 0.0 && covariate_agreement <= 1.0))
    throw ConfigError("covariate agreement must lie in [0, 1]");
  for (double c : centers)
    if (!(c > 0.0 && c < 1.0)) throw ConfigError("centers must lie in (0, 1)");
  if (!(shape > 1.0)) throw ConfigError("shape must exceed 1");
  check_censoring(censor_threshold, censor_prob);
}

SyntheticData generate_correlated_survival(const CorrelatedSurvivalSpec& spec) {
  spec.validate();
  SyntheticData out;
  out.schema = xor_schema();
  for (std::size_t n = 0; n < spec.n_samples; ++n) {
    RngStream rng(spec.seed, stream_key({kCorrelatedStream, n}));
    const int mode = rng.uniform() < 0.5 ? 0 : 1;
    const int color = rng.uniform() < spec.covariate_agreement ? mode : 1 - mode;
    const double v = spec.centers[static_cast<std::size_t>(mode)];
    const GammaParams g{spec.shape, (spec.shape - 1.0) / v};
    std::array<double, 2> t{sample_interval_truncated_gamma(g, 0.0, rng), sample_interval_truncated_gamma(g, 0.0, rng)};
    record(out, color, t, mode, spec.censor_threshold, spec.censor_prob, rng);
  }
  return out;
}

RawDataset SyntheticData::raw() const {
  RawDataset d;
  const std::size_t n = observations.size();
  RawColumn color{"color", ColumnKind::binary, "", {}, {}, std::vector<std::uint8_t>(n, 0)};
  for (const auto& o : observations) color.numbers.push_back(o.binary.value[0]);
  d.columns.push_back(std::move(color));
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string id = std::to_string(i + 1);
    RawColumn t{"t" + id, ColumnKind::time, "e" + id, {}, {}, std::vector<std::uint8_t>(n, 0)};
    RawColumn e{"e" + id, ColumnKind::event_indicator, "", {}, {}, std::vector<std::uint8_t>(n, 0)};
    for (const auto& o : observations) {
      t.numbers.push_back(o.time.value[i]);
      e.numbers.push_back(o.time.observed[i] ? 1.0 : 0.0);
    }
    d.columns.push_back(std::move(t));
    d.columns.push_back(std::move(e));
  }
  return d;
}

SchemaDeclaration SyntheticData::declaration() const {
  SchemaDeclaration d;
  d.columns = {{"color", ColumnKind::binary, ""},
               {"t1", ColumnKind::time, "e1"},
               {"e1", ColumnKind::event_indicator, ""},
               {"t2", ColumnKind::time, "e2"},
               {"e2", ColumnKind::event_indicator, ""}};
  return d;
}

double SyntheticData::censored_fraction() const {
  if (observations.empty()) return 0.0;
  std::size_t censored = 0;
  for (const auto& o : observations)
    for (auto f : o.time.observed) censored += f ? 0 : 1;
  return static_cast<double>(censored) / static_cast<double>(2 * observations.size());
}

}  // namespace harmonium
