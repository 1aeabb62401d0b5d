#include "harmonium/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <thread>

#include <CLI11.hpp>

#include "harmonium/error.hpp"
#include "harmonium/metrics.hpp"
#include "harmonium/rng.hpp"
#include "harmonium/synthetic.hpp"

namespace harmonium::cli {

namespace {

constexpr std::uint64_t kTuneStream = 0x74756e65;

struct ResolvedRequest {
  std::size_t target = 0;
  double horizon = 1.0;
  double time = 0.5;  // raw units
  std::vector<std::size_t> marginalize;
};

std::size_t time_index(const VariableSchema& schema, const std::string& name) {
  const auto ref = schema.find(name);
  if (!ref) throw ConfigError("unknown variable '" + name + "'");
  if (ref->group != VariableGroup::time_to_event) throw ConfigError("variable '" + name + "' is not a time variable");
  return ref->index;
}

ResolvedRequest resolve(const ModelArchive& archive, const RiskRequest& request) {
  ResolvedRequest r;
  std::string target = request.target;
  if (target.empty()) {
    if (archive.schema.n_time() == 0) throw ConfigError("model has no time variable");
    target = archive.schema.spec(VariableGroup::time_to_event, 0).name;
  }
  r.target = time_index(archive.schema, target);
  r.horizon = archive.preprocess.times.at(r.target).horizon;
  r.time = request.time.value_or(0.5 * r.horizon);
  if (!(r.time >= 0.0 && r.time <= r.horizon))
    throw ConfigError("time point must lie in [0, " + std::to_string(r.horizon) + "]");
  for (const auto& name : request.marginalize) {
    const std::size_t idx = time_index(archive.schema, name);
    if (idx == r.target) throw ConfigError("cannot marginalize the target variable '" + name + "'");
    r.marginalize.push_back(idx);
  }
  return r;
}

template <class F>
void parallel_rows(std::size_t n, std::size_t threads, F&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < n; i += threads) body(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::filesystem::path sidecar_for(const std::filesystem::path& data) {
  auto p = data;
  p.replace_extension(".schema.json");
  return p;
}

nlohmann::json config_json(const TrainConfig& c) {
  return {{"hidden", c.n_hidden}, {"lr", c.learning_rate}, {"epochs", c.epochs}, {"batch", c.minibatch_size},
          {"cd_steps", c.cd_steps}, {"persistent", c.persistent}, {"momentum", c.momentum},
          {"l2", c.l2_penalty}, {"seed", c.seed}};
}

nlohmann::json result_json(const EvaluationResult& r) {
  return {{"c_index", r.c_index}, {"brier", r.brier}, {"time", r.time}, {"n", r.n}};
}

struct Common {
  std::uint64_t seed = 0;
  std::string data;
  std::string schema;
  std::string model;
  std::string out;
  std::size_t threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--data", c.data, "CSV dataset");
  cmd->add_option("--schema", c.schema, "schema declaration (default: <data stem>.schema.json)");
  cmd->add_option("--model", c.model, "model archive");
  cmd->add_option("--out", c.out, "output path");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1, 256));
}

void add_train_options(CLI::App* cmd, TrainConfig& c, PreprocessOptions& p) {
  cmd->add_option("--hidden", c.n_hidden, "latent units")->check(CLI::Range(1, 4096));
  cmd->add_option("--lr", c.learning_rate, "learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--epochs", c.epochs, "training epochs")->check(CLI::Range(1, 100'000'000));
  cmd->add_option("--batch", c.minibatch_size, "minibatch size")->check(CLI::Range(1, 100'000'000));
  cmd->add_option("--cd-steps", c.cd_steps, "Gibbs steps per negative phase")->check(CLI::Range(1, 10'000));
  cmd->add_flag("--persistent", c.persistent, "persist negative chains across updates");
  cmd->add_option("--momentum", c.momentum, "fraction of the previous step retained")
      ->check(CLI::Range(0.0, 0.999999));
  cmd->add_option("--l2", c.l2_penalty, "L2 penalty on couplings")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--drop-low-variance", p.drop_low_variance, "drop binary features on/off in >95% of rows");
  cmd->add_option("--low-variance-threshold", p.low_variance_threshold)->check(CLI::Range(0.5, 1.0));
  cmd->add_option("--time-epsilon", p.time_epsilon, "clamp observed zero times to this value")
      ->check(CLI::PositiveNumber);
}

void add_risk_options(CLI::App* cmd, RiskRequest& r, std::string& method) {
  cmd->add_option("--target", r.target, "time variable to score (default: first)");
  cmd->add_option("--time", r.time, "time point in raw units (default: half the horizon)");
  cmd->add_option("--marginalize", r.marginalize, "time variables to integrate out")->delimiter(',');
  cmd->add_option("--method", method, "marginalization: auto, exact, numeric")
      ->check(CLI::IsMember({"auto", "exact", "numeric"}));
}

MarginalizationMethod parse_method(const std::string& m) {
  if (m == "exact") return MarginalizationMethod::exact_latent;
  if (m == "numeric") return MarginalizationMethod::numeric_visible;
  return MarginalizationMethod::automatic;
}

RawDataset load_data(const Common& c, SchemaDeclaration* decl_out = nullptr) {
  if (c.data.empty()) throw ConfigError("--data is required");
  const auto schema_path = c.schema.empty() ? sidecar_for(c.data) : std::filesystem::path(c.schema);
  const auto decl = SchemaDeclaration::load(schema_path);
  if (decl_out) *decl_out = decl;
  return ingest_csv(c.data, decl);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw IoError("cannot write '" + path + "'");
  return file;
}

int synth_command(const Common& c, const std::string& family, std::size_t n, double threshold, double prob,
                  bool verbatim) {
  if (c.out.empty()) throw ConfigError("--out is required");
  SyntheticData data;
  if (family == "correlated") {
    CorrelatedSurvivalSpec spec;
    spec.n_samples = n;
    spec.censor_threshold = threshold;
    spec.censor_prob = prob;
    spec.seed = c.seed;
    data = generate_correlated_survival(spec);
  } else {
    XorSpec spec = verbatim ? XorSpec::literal_rates() : XorSpec::defaults();
    spec.n_samples = n;
    spec.censor_threshold = threshold;
    spec.censor_prob = prob;
    spec.seed = c.seed;
    data = generate_xor(spec);
  }
  write_csv(std::filesystem::path(c.out), data.raw());
  const auto schema_path = c.schema.empty() ? sidecar_for(c.out) : std::filesystem::path(c.schema);
  data.declaration().save(schema_path);
  std::size_t censored = 0;
  for (const auto& o : data.observations)
    for (auto f : o.time.observed) censored += f ? 0 : 1;
  std::cout << nlohmann::json{{"rows", n}, {"censored", censored}, {"censored_fraction", data.censored_fraction()},
                              {"data", c.out}, {"schema", schema_path.string()}}
                   .dump()
            << '\n';
  return 0;
}

int train_command(const Common& c, TrainConfig config, const PreprocessOptions& options, const std::string& log_path,
                  std::size_t log_every) {
  if (c.out.empty()) throw ConfigError("--out is required");
  const RawDataset raw = load_data(c);
  config.seed = c.seed;
  config.threads = c.threads;
  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path);
    if (!log) throw IoError("cannot write '" + log_path + "'");
    log << "epoch,positive_energy,negative_energy,gradient_norm,parameter_norm,reconstruction_error\n";
    log.precision(17);
  }
  const auto on_epoch = [&](const EpochRecord& r, const ModelParameters&) {
    if (log)
      log << r.epoch << ',' << r.positive_energy << ',' << r.negative_energy << ',' << r.gradient_norm << ','
          << r.parameter_norm << ',' << r.reconstruction_error << '\n';
    if (log_every > 0 && r.epoch % log_every == 0)
      std::cerr << "epoch " << r.epoch << " recon " << r.reconstruction_error << " |grad| " << r.gradient_norm
                << '\n';
  };
  const ModelArchive archive = train_model(raw, config, options, on_epoch);
  save_archive(c.out, archive);
  nlohmann::json summary = {{"model", c.out}, {"epochs", archive.epochs_completed}, {"config", config_json(config)}};
  if (!archive.log_tail.empty()) summary["reconstruction_error"] = archive.log_tail.back().reconstruction_error;
  std::cout << summary.dump() << '\n';
  return 0;
}

int predict_command(const Common& c, RiskRequest request) {
  if (c.model.empty()) throw ConfigError("--model is required");
  const ModelArchive archive = load_archive(c.model);
  const RawDataset raw = load_data(c);
  request.threads = c.threads;
  const auto risks = predict_survival(archive, raw, request);
  std::ofstream file;
  std::ostream& out = open_out(c.out, file);
  out.precision(17);
  out << "row,risk\n";
  for (std::size_t i = 0; i < risks.size(); ++i) out << i << ',' << risks[i] << '\n';
  return 0;
}

int evaluate_command(const Common& c, RiskRequest request, std::size_t kfold) {
  if (c.model.empty()) throw ConfigError("--model is required");
  const ModelArchive archive = load_archive(c.model);
  const RawDataset raw = load_data(c);
  request.threads = c.threads;
  std::ofstream file;
  std::ostream& out = open_out(c.out, file);
  if (kfold == 0) {
    const auto r = evaluate_model(archive, raw, request);
    std::cerr << "C-index " << r.c_index << "\nBrier(t=" << r.time << ") " << r.brier << "\nn " << r.n << '\n';
    out << result_json(r).dump() << '\n';
    return 0;
  }
  TrainConfig config = archive.config;
  config.seed = c.seed;
  config.threads = c.threads;
  const auto folds = cross_validate(raw, config, archive.preprocess.options, request, kfold, c.seed);
  double c_sum = 0.0, b_sum = 0.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    auto j = result_json(folds[f]);
    j["fold"] = f;
    out << j.dump() << '\n';
    std::cerr << "fold " << f << ": C-index " << folds[f].c_index << ", Brier " << folds[f].brier << '\n';
    c_sum += folds[f].c_index;
    b_sum += folds[f].brier;
  }
  const double k = static_cast<double>(folds.size());
  out << nlohmann::json{{"mean_c_index", c_sum / k}, {"mean_brier", b_sum / k}, {"folds", folds.size()}}.dump()
      << '\n';
  std::cerr << "mean C-index " << c_sum / k << ", mean Brier " << b_sum / k << '\n';
  return 0;
}

int tune_command(const Common& c, RiskRequest request, std::size_t trials, std::size_t kfold,
                 std::size_t max_epochs) {
  SchemaDeclaration decl;
  const RawDataset raw = load_data(c, &decl);
  request.threads = c.threads;
  RngStream rng(c.seed, kTuneStream);
  const auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + rng.uniform() * std::log(hi / lo)); };
  const std::size_t train_size = raw.rows() - (raw.rows() + kfold - 1) / kfold;
  std::ofstream file;
  std::ostream& out = open_out(c.out, file);
  std::optional<std::pair<double, TrainConfig>> best;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    TrainConfig config;
    config.n_hidden = static_cast<std::size_t>(std::lround(log_uniform(1.0, 128.0)));
    config.learning_rate = log_uniform(1e-5, 5e-2);
    config.epochs = std::min<std::size_t>(max_epochs, static_cast<std::size_t>(std::lround(log_uniform(500.0, 1e5))));
    config.minibatch_size =
        std::min<std::size_t>(train_size, static_cast<std::size_t>(std::lround(log_uniform(25.0, 1e3))));
    config.l2_penalty = log_uniform(1e-5, 1e-1);
    config.momentum = std::min(1.0 - 0.9 * rng.uniform(), 0.999999);
    config.persistent = rng.uniform() < 0.5;
    config.seed = c.seed;
    config.threads = c.threads;
    double mean_c = std::nan("");
    try {
      const auto folds = cross_validate(raw, config, {}, request, kfold, c.seed);
      mean_c = 0.0;
      for (const auto& f : folds) mean_c += f.c_index / static_cast<double>(folds.size());
    } catch (const NumericalError& e) {
      std::cerr << "trial " << trial << " failed: " << e.what() << '\n';
    }
    nlohmann::json line = {{"trial", trial}, {"config", config_json(config)}};
    line["mean_c_index"] = std::isnan(mean_c) ? nlohmann::json() : nlohmann::json(mean_c);
    out << line.dump() << '\n';
    if (!std::isnan(mean_c) && (!best || mean_c > best->first)) best.emplace(mean_c, config);
  }
  if (!best) throw NumericalError("every tuning trial failed");
  out << nlohmann::json{{"best", config_json(best->second)}, {"mean_c_index", best->first}}.dump() << '\n';
  return 0;
}

}  // namespace

ModelArchive train_model(const RawDataset& raw, const TrainConfig& config, const PreprocessOptions& options,
                         const EpochCallback& on_epoch) {
  ModelArchive archive;
  archive.preprocess = fit_preprocess(raw, options);
  const PreparedData prepared = apply_preprocess(raw, archive.preprocess);
  archive.schema = prepared.schema;
  archive.config = config;
  archive.seed = config.seed;
  EpochRecord last;
  bool any = false;
  const auto record = [&](const EpochRecord& r, const ModelParameters& theta) {
    last = r;
    any = true;
    if (on_epoch) on_epoch(r, theta);
  };
  FitResult fitted = fit(prepared.observations, prepared.schema, config, record);
  archive.parameters = std::move(fitted.parameters);
  archive.epochs_completed = fitted.log.size();
  if (any) archive.log_tail.push_back(last);
  return archive;
}

std::vector<double> predict_survival(const ModelArchive& archive, const RawDataset& raw, const RiskRequest& request) {
  const ResolvedRequest r = resolve(archive, request);
  const PreparedData prepared = apply_preprocess(raw, archive.preprocess);
  if (!(prepared.schema == archive.schema)) throw DataError("dataset does not match the model schema");
  if (prepared.unseen_categories > 0)
    std::cerr << "warning: " << prepared.unseen_categories << " unseen categorical value(s) encoded as all zeros\n";
  if (prepared.clamped_times > 0)
    std::cerr << "warning: " << prepared.clamped_times << " time value(s) beyond the training horizon clamped\n";
  std::vector<double> risks(prepared.observations.size());
  const double scaled = r.time / r.horizon;
  parallel_rows(risks.size(), request.threads, [&](std::size_t i) {
    RiskQuery q{r.target, scaled, prepared.observations[i], r.marginalize};
    risks[i] = risk_score(q, archive.parameters, request.inference);
  });
  return risks;
}

EvaluationResult evaluate_model(const ModelArchive& archive, const RawDataset& raw, const RiskRequest& request) {
  const ResolvedRequest r = resolve(archive, request);
  const auto risks = predict_survival(archive, raw, request);
  const auto& spec = archive.preprocess.times.at(r.target);
  const RawColumn& times = raw.column(spec.name);
  const RawColumn& events = raw.column(spec.indicator);
  std::vector<ScoredSample> samples;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    if (times.missing[i] || events.missing[i]) continue;
    samples.push_back({times.numbers[i], events.numbers[i] == 1.0, risks[i]});
  }
  EvaluationResult result;
  result.time = r.time;
  result.n = samples.size();
  result.c_index = concordance_index(samples);
  result.brier = brier_loss(samples, r.time);
  return result;
}

std::vector<EvaluationResult> cross_validate(const RawDataset& raw, const TrainConfig& config,
                                             const PreprocessOptions& options, const RiskRequest& request,
                                             std::size_t k, std::uint64_t seed) {
  std::vector<EvaluationResult> results;
  for (const auto& [train_rows, test_rows] : kfold_split(raw.rows(), k, seed)) {
    const RawDataset train = raw.select_rows(train_rows);
    const RawDataset test = raw.select_rows(test_rows);
    TrainConfig fold_config = config;
    fold_config.minibatch_size = std::min(config.minibatch_size, train.rows());
    const ModelArchive archive = train_model(train, fold_config, options);
    RiskRequest fold_request = request;
    if (fold_request.time) {
      RiskRequest probe = request;
      probe.time.reset();
      fold_request.time = std::min(*fold_request.time, resolve(archive, probe).horizon);
    }
    results.push_back(evaluate_model(archive, test, fold_request));
  }
  return results;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Harmonium survival model: synthesize, train, predict, evaluate, tune"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "harmonium archive format " + std::to_string(kArchiveVersion));

  Common common;
  TrainConfig config;
  PreprocessOptions pre;
  RiskRequest risk;
  std::string method = "auto";

  auto* synth = app.add_subcommand("synth", "generate a synthetic survival dataset");
  add_common(synth, common);
  std::string family = "xor";
  std::size_t n = 1000;
  double threshold = 0.75, prob = 0.75;
  bool verbatim = false;
  synth->add_option("--n", n, "number of samples")->check(CLI::Range(1, 100'000'000));
  synth->add_option("--family", family, "xor or correlated")->check(CLI::IsMember({"xor", "correlated"}));
  synth->add_option("--censor-threshold", threshold)->check(CLI::Range(0.0, 0.999999));
  synth->add_option("--censor-prob", prob)->check(CLI::Range(0.0, 1.0));
  synth->add_flag("--literal-rates", verbatim, "use the literal gamma parameters instead of mode-derived rates");

  auto* train = app.add_subcommand("train", "train a model on a dataset");
  add_common(train, common);
  add_train_options(train, config, pre);
  std::string log_path;
  std::size_t log_every = 0;
  train->add_option("--log", log_path, "per-epoch training log (CSV)");
  train->add_option("--log-every", log_every, "print progress every N epochs");

  auto* predict = app.add_subcommand("predict", "score rows with a trained model");
  add_common(predict, common);
  add_risk_options(predict, risk, method);

  auto* evaluate = app.add_subcommand("evaluate", "C-index and Brier loss of a trained model");
  add_common(evaluate, common);
  add_risk_options(evaluate, risk, method);
  std::size_t kfold = 0;
  evaluate->add_option("--kfold", kfold, "retrain with the model's settings on k folds");

  auto* tune = app.add_subcommand("tune", "seeded random search with k-fold validation");
  add_common(tune, common);
  add_risk_options(tune, risk, method);
  std::size_t trials = 50, tune_folds = 5, max_epochs = 100'000;
  tune->add_option("--trials", trials)->check(CLI::Range(1, 100'000));
  tune->add_option("--kfold", tune_folds)->check(CLI::Range(2, 1000));
  tune->add_option("--max-epochs", max_epochs, "cap on sampled epoch counts")->check(CLI::Range(1, 100'000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::config);
  }

  try {
    risk.inference.method = parse_method(method);
    if (*synth) return synth_command(common, family, n, threshold, prob, verbatim);
    if (*train) return train_command(common, config, pre, log_path, log_every);
    if (*predict) return predict_command(common, risk);
    if (*evaluate) return evaluate_command(common, risk, kfold);
    if (*tune) return tune_command(common, risk, trials, tune_folds, max_epochs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace harmonium::cli
