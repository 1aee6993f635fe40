#pragma once

#include <array>
#include <cstdint>

#include "nimbus/random.hpp"
#include "nimbus/scenario.hpp"
#include "nimbus/units.hpp"

namespace nimbus {

/// Mean one-way latency between regions, milliseconds.
class DelayMatrix {
 public:
  explicit DelayMatrix(const RegionMatrix& mean_latency_ms) : ms_(mean_latency_ms) {}

  double mean(RegionIndex src, RegionIndex dst) const { return ms_.at(src).at(dst); }
  bool symmetric() const;
  const RegionMatrix& values() const noexcept { return ms_; }

 private:
  RegionMatrix ms_;
};

/// Available bandwidth between regions, Mbps.
class BandwidthMatrix {
 public:
  explicit BandwidthMatrix(const RegionMatrix& capacity_mbps) : mbps_(capacity_mbps) {}

  double capacity(RegionIndex src, RegionIndex dst) const { return mbps_.at(src).at(dst); }
  const RegionMatrix& values() const noexcept { return mbps_; }

 private:
  RegionMatrix mbps_;
};

/// Concurrent transfers per ordered region pair.
class ChannelLoad {
 public:
  void begin_transfer(RegionIndex src, RegionIndex dst);
  /// Throws InvariantError when no matching begin_transfer is outstanding.
  void end_transfer(RegionIndex src, RegionIndex dst);

  std::uint64_t concurrent(RegionIndex src, RegionIndex dst) const { return counts_.at(src).at(dst); }
  bool idle() const;

 private:
  std::array<std::array<std::uint64_t, kRegionCount>, kRegionCount> counts_{};
};

class InternetModel {
 public:
  InternetModel(DelayMatrix delay, BandwidthMatrix bandwidth)
      : delay_(std::move(delay)), bandwidth_(std::move(bandwidth)) {}

  const DelayMatrix& delay() const noexcept { return delay_; }
  const BandwidthMatrix& bandwidth() const noexcept { return bandwidth_; }

  /// Integer-millisecond Poisson draw around the configured mean latency.
  Millis sample_latency(RegionIndex src, RegionIndex dst, RandomStream& rng) const;

  /// Time to push size_bytes through the pair's bandwidth, split equally among
  /// `concurrent` transfers (at least one).
  Millis serialization_ms(RegionIndex src, RegionIndex dst, std::uint64_t size_bytes,
                          std::uint64_t concurrent) const;

  /// Latency draw plus serialization at the current channel load. The caller
  /// registers the transfer with begin_transfer first.
  Millis transfer_time(RegionIndex src, RegionIndex dst, std::uint64_t size_bytes, const ChannelLoad& load,
                       RandomStream& rng) const;

 private:
  DelayMatrix delay_;
  BandwidthMatrix bandwidth_;
};

}  // namespace nimbus
