#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace harmonium {

/// Mixes a list of integers into a single stream identifier.
std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts);

/// Reproducible random stream keyed by (seed, stream_id). xoshiro256** state seeded through
/// splitmix64, so streams are cheap to create and distinct ids give decorrelated sequences.
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal variate.
  double normal();

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace harmonium
