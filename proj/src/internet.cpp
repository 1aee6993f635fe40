#include "nimbus/internet.hpp"

#include <algorithm>
#include <string>

#include "nimbus/errors.hpp"

namespace nimbus {

bool DelayMatrix::symmetric() const {
  for (std::size_t i = 0; i < kRegionCount; ++i) {
    for (std::size_t j = i + 1; j < kRegionCount; ++j) {
      if (ms_[i][j] != ms_[j][i]) return false;
    }
  }
  return true;
}

void ChannelLoad::begin_transfer(RegionIndex src, RegionIndex dst) { ++counts_.at(src).at(dst); }

void ChannelLoad::end_transfer(RegionIndex src, RegionIndex dst) {
  auto& count = counts_.at(src).at(dst);
  if (count == 0) {
    throw InvariantError("end_transfer without begin on channel " + std::to_string(src) + "->" +
                         std::to_string(dst));
  }
  --count;
}

bool ChannelLoad::idle() const {
  return std::all_of(counts_.begin(), counts_.end(), [](const auto& row) {
    return std::all_of(row.begin(), row.end(), [](std::uint64_t c) { return c == 0; });
  });
}

Millis InternetModel::sample_latency(RegionIndex src, RegionIndex dst, RandomStream& rng) const {
  return static_cast<Millis>(rng.poisson(delay_.mean(src, dst)));
}

Millis InternetModel::serialization_ms(RegionIndex src, RegionIndex dst, std::uint64_t size_bytes,
                                       std::uint64_t concurrent) const {
  const double share_bps = bandwidth_.capacity(src, dst) * 1e6 / static_cast<double>(std::max<std::uint64_t>(1, concurrent));
  return static_cast<double>(size_bytes) * 8.0 / share_bps * 1e3;
}

Millis InternetModel::transfer_time(RegionIndex src, RegionIndex dst, std::uint64_t size_bytes,
                                    const ChannelLoad& load, RandomStream& rng) const {
  const Millis latency = sample_latency(src, dst, rng);
  return latency + serialization_ms(src, dst, size_bytes, load.concurrent(src, dst));
}

}  // namespace nimbus
