#pragma once

#include <cstdint>
#include <random>

namespace nimbus {

/// Seeded random stream shared by one simulation run.
///
/// std::mt19937_64 output is fixed by the standard, but the std::*_distribution
/// adaptors are not, so every distribution used by the simulator is derived
/// here from raw 64-bit draws. This keeps traces identical across standard
/// library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Exponential with the given rate (events per unit time). rate must be > 0.
  double exponential(double rate);

  /// Poisson-distributed count with the given mean (>= 0).
  std::uint64_t poisson(double mean);

  /// True with probability p.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t poisson_inversion(double mean);

  std::mt19937_64 engine_;
};

}  // namespace nimbus
