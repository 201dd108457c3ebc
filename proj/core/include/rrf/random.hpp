#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace rrf {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Stream seed for (master seed, replica index, purpose tag).
///
/// Counter-based: the result depends only on the three inputs, so adding
/// replicas or purposes never shifts an existing stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica,
                          std::string_view purpose) noexcept;

/// Seeded random stream. Uniform variates are built from raw engine bits so
/// they are identical across standard-library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  Rng(std::uint64_t master, std::uint64_t replica, std::string_view purpose)
      : Rng(derive_seed(master, replica, purpose)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int sign() { return (engine_() >> 63) != 0 ? 1 : -1; }
  bool bernoulli(double p) { return p >= 1.0 || uniform() < p; }
  double exponential(double rate);
  std::int64_t poisson(double mean);
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace rrf
