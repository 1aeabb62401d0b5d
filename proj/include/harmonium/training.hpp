#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "harmonium/model.hpp"
#include "harmonium/rng.hpp"
#include "harmonium/samplers.hpp"

namespace harmonium {

struct TrainConfig {
  std::size_t n_hidden = 8;
  double learning_rate = 0.01;
  std::size_t epochs = 1000;
  std::size_t minibatch_size = 25;
  std::size_t cd_steps = 1;
  bool persistent = false;
  /// Fraction of the previous parameter step retained, in [0, 1).
  double momentum = 0.0;
  /// λ_H of the penalty λ_H/2 Θ², applied to the coupling matrices only.
  double l2_penalty = 0.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  /// Throws ConfigError naming the violated bound.
  void validate(std::size_t dataset_size) const;
};

/// ∂E/∂Θ with the same layout as ModelParameters; `sigma` holds ∂E/∂σ.
struct Gradient {
  Matrix w_binary;
  Matrix w_time;
  Matrix w_numeric;
  Matrix v_shape;
  std::vector<double> a_binary;
  std::vector<double> a_time;
  std::vector<double> c_shape;
  std::vector<double> a_numeric;
  std::vector<double> sigma;
  std::vector<double> b_latent;

  static Gradient zeros_like(const ModelParameters& theta);

  std::array<std::span<double>, 10> tensors();
  std::array<std::span<const double>, 10> tensors() const;

  Gradient& operator+=(const Gradient& other);
  Gradient& operator-=(const Gradient& other);
  Gradient& operator*=(double factor);
  double norm() const;
};

/// Parameter tensors in the same order as Gradient::tensors().
std::array<std::span<double>, 10> parameter_tensors(ModelParameters& theta);
std::array<std::span<const double>, 10> parameter_tensors(const ModelParameters& theta);
double parameter_norm(const ModelParameters& theta);

/// ∂E(x, h)/∂Θ evaluated at h = h_mean. Uses sign(V) and sign(c) for the absolute values
/// (subgradient 0 at exactly 0).
Gradient energy_gradient(const VisibleState& x, std::span<const double> h_mean,
                         const ModelParameters& theta);

/// out += weight * ∂E(x, h_mean)/∂Θ.
void accumulate_energy_gradient(const VisibleState& x, std::span<const double> h_mean,
                                const ModelParameters& theta, double weight, Gradient& out);

/// Per-variable fill values for unobserved entries when a Gibbs chain starts.
struct ImputationValues {
  std::vector<double> binary;
  std::vector<double> time;
  std::vector<double> numeric;
};

/// Medians over the observed entries of each variable (lower median for binaries, so the
/// fill stays in {0,1}). Time medians use every positive recorded time, observed or censored.
ImputationValues compute_imputation(std::span<const Observation> data, std::size_t n_binary,
                                    std::size_t n_time, std::size_t n_numeric);

/// x ← ξ with placeholders replaced by the imputation values. Censored times start at ξ,
/// or at the imputation value when ξ = 0.
VisibleState initial_state(const Observation& o, const ImputationValues& fill);

struct PhaseResult {
  VisibleState x;
  std::vector<double> h_mean;
};

/// k alternations of latent and constrained visible steps starting from `start`.
PhaseResult positive_phase(const Observation& o, const VisibleState& start,
                           const ModelParameters& theta, std::size_t k, RngStream& rng,
                           const RejectionOptions& options = {});

/// Convenience overload starting from initial_state(o, fill).
PhaseResult positive_phase(const Observation& o, const ModelParameters& theta, std::size_t k,
                           RngStream& rng, const ImputationValues& fill,
                           const RejectionOptions& options = {});

/// k unconstrained Gibbs alternations from x_init; k = 0 returns x_init unchanged.
PhaseResult negative_phase(const VisibleState& x_init, const ModelParameters& theta,
                           std::size_t k, RngStream& rng, const RejectionOptions& options = {});

/// Initial parameters: W^A ~ N(0, 0.01²), a^A from the observed frequencies, Glorot-uniform
/// W^B and W^C, V and c uniform on [0, 2√(6/(|H|+|B|))], remaining biases 0 and σ = 1.
ModelParameters initialize_parameters(std::span<const Observation> data, std::size_t n_binary,
                                      std::size_t n_time, std::size_t n_numeric,
                                      std::size_t n_hidden, RngStream& rng);

/// Mean squared error between observed entries and their mean-field reconstruction
/// E[x | h = p(h = 1 | x)].
double reconstruction_error(std::span<const Observation> data, const ModelParameters& theta,
                            const ImputationValues& fill);

struct EpochRecord {
  std::size_t epoch = 0;
  double positive_energy = 0.0;
  double negative_energy = 0.0;
  double gradient_norm = 0.0;
  double parameter_norm = 0.0;
  double reconstruction_error = 0.0;
};

/// Stream identifiers used by the trainer, exposed so reference implementations can
/// reproduce the same random sequences.
enum class ChainRole : std::uint64_t { shuffle = 0, positive = 1, negative = 2, init = 3 };
std::uint64_t chain_stream_id(std::size_t epoch, std::size_t sample, ChainRole role);

/// Contrastive-divergence trainer for censored and missing observations.
class Trainer {
 public:
  Trainer(std::span<const Observation> data, ModelParameters initial, TrainConfig config,
          ImputationValues fill, RejectionOptions rejection = {});

  /// Runs one pass over shuffled minibatches and returns its log record.
  /// Throws NumericalError if the parameters become non-finite.
  EpochRecord run_epoch();

  const ModelParameters& parameters() const noexcept { return theta_; }
  std::size_t epochs_completed() const noexcept { return epoch_; }
  const ImputationValues& imputation() const noexcept { return fill_; }

  /// One parameter update from a mean minibatch gradient (positive minus negative
  /// statistics, already divided by the batch size). Adds the L2 term and momentum.
  void apply_update(const Gradient& mean_gradient);

 private:
  std::span<const Observation> data_;
  ModelParameters theta_;
  TrainConfig config_;
  ImputationValues fill_;
  RejectionOptions rejection_;
  Gradient velocity_;
  std::vector<VisibleState> chains_;
  std::vector<std::uint8_t> chain_started_;
  std::size_t epoch_ = 0;
};

struct FitResult {
  ModelParameters parameters;
  ImputationValues imputation;
  std::vector<EpochRecord> log;
};

using EpochCallback = std::function<void(const EpochRecord&, const ModelParameters&)>;

/// Initializes parameters from config.seed and trains for config.epochs epochs.
FitResult fit(std::span<const Observation> data, const VariableSchema& schema,
              const TrainConfig& config, const EpochCallback& on_epoch = {},
              const RejectionOptions& rejection = {});

}  // namespace harmonium
