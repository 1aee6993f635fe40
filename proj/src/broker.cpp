#include "nimbus/broker.hpp"

#include "nimbus/errors.hpp"

namespace nimbus {

ServiceBroker::ServiceBroker(BrokerPolicy policy, std::vector<RegionIndex> dc_regions, DelayMatrix delay)
    : policy_(policy), dc_regions_(std::move(dc_regions)), delay_(std::move(delay)), recorded_(dc_regions_.size()) {
  if (dc_regions_.empty()) throw InvariantError("broker needs at least one data center");
}

std::size_t ServiceBroker::closest_dc(RegionIndex ub_region) const {
  std::size_t best = 0;
  for (std::size_t dc = 1; dc < dc_regions_.size(); ++dc) {
    if (delay_.mean(ub_region, dc_regions_[dc]) < delay_.mean(ub_region, dc_regions_[best])) best = dc;
  }
  return best;
}

std::size_t ServiceBroker::optimize_response_time(RegionIndex ub_region, RandomStream& rng) const {
  const std::size_t closest = closest_dc(ub_region);
  auto estimate = [&](std::size_t dc) {
    return recorded_[dc].value_or(2.0 * delay_.mean(ub_region, dc_regions_[dc]));
  };
  std::size_t fastest = 0;
  for (std::size_t dc = 1; dc < dc_regions_.size(); ++dc) {
    if (estimate(dc) < estimate(fastest)) fastest = dc;
  }
  if (fastest == closest || estimate(fastest) >= estimate(closest)) return closest;
  return rng.bernoulli(0.5) ? fastest : closest;
}

std::size_t ServiceBroker::select(RegionIndex ub_region, RandomStream& rng) const {
  return policy_ == BrokerPolicy::ClosestDataCenter ? closest_dc(ub_region) : optimize_response_time(ub_region, rng);
}

void ServiceBroker::record_response(std::size_t dc, Millis response_ms) {
  auto& slot = recorded_.at(dc);
  slot = slot ? (1.0 - kSmoothing) * *slot + kSmoothing * response_ms : response_ms;
}

}  // namespace nimbus
