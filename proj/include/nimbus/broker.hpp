#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nimbus/internet.hpp"
#include "nimbus/random.hpp"
#include "nimbus/scenario.hpp"

namespace nimbus {

/// Chooses the data center that serves each batch.
///
/// OptimizeResponseTime is a compatible reconstruction, not a published
/// algorithm: it compares the closest DC with the DC holding the best
/// smoothed response estimate and, when they differ, picks either with equal
/// probability. DCs without history are estimated by their round-trip
/// network delay, so with no history it always agrees with ClosestDataCenter.
class ServiceBroker {
 public:
  static constexpr double kSmoothing = 0.1;

  ServiceBroker(BrokerPolicy policy, std::vector<RegionIndex> dc_regions, DelayMatrix delay);

  BrokerPolicy policy() const noexcept { return policy_; }
  std::size_t dc_count() const noexcept { return dc_regions_.size(); }

  /// Minimal mean latency from ub_region; lowest dc id on ties.
  std::size_t closest_dc(RegionIndex ub_region) const;
  std::size_t optimize_response_time(RegionIndex ub_region, RandomStream& rng) const;

  /// Dispatches to the configured policy.
  std::size_t select(RegionIndex ub_region, RandomStream& rng) const;

  /// EWMA update of a DC's observed response time (first sample initializes).
  void record_response(std::size_t dc, Millis response_ms);
  std::optional<Millis> recorded_response(std::size_t dc) const { return recorded_.at(dc); }

 private:
  BrokerPolicy policy_;
  std::vector<RegionIndex> dc_regions_;
  DelayMatrix delay_;
  std::vector<std::optional<Millis>> recorded_;
};

}  // namespace nimbus
