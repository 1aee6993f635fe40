#include "nimbus/random.hpp"

#include <cmath>

namespace nimbus {

namespace {
// exp(-mean) stays a normal double well past this; larger means are split.
constexpr double kInversionLimit = 500.0;
}  // namespace

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) {
  return -std::log1p(-uniform()) / rate;
}

std::uint64_t RandomStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  if (mean <= kInversionLimit) return poisson_inversion(mean);
  // Poisson(a + b) == Poisson(a) + Poisson(b) for independent draws.
  const double half = mean / 2.0;
  return poisson(half) + poisson(mean - half);
}

std::uint64_t RandomStream::poisson_inversion(double mean) {
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  const double cap = mean + 40.0 * std::sqrt(mean) + 40.0;
  while (u > cdf && static_cast<double>(k) < cap) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace nimbus
