#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "nimbus/random.hpp"
#include "nimbus/scenario.hpp"
#include "nimbus/units.hpp"

namespace nimbus {

/// Users online in a GMT hour: the peak level inside [peak_start, peak_end),
/// the off-peak level otherwise.
std::uint64_t active_users(const UserBaseSpec& ub, int gmt_hour);

/// Mean number of user requests issued over the first duration_hours of the
/// daily profile (the final partial hour is prorated).
double expected_requests(const UserBaseSpec& ub, double duration_hours);

/// One schedulable unit of traffic: request_grouping_factor consecutive
/// requests from a user base, serviced as a single task.
struct RequestBatch {
  std::size_t ub_id = 0;
  Millis created_at = 0;
  std::uint64_t user_count = 0;
  // Whole-batch payloads: per-request size times group_size.
  std::uint64_t request_size_bytes = 0;
  std::uint64_t response_size_bytes = 0;
  std::uint64_t group_size = 0;
};

/// Per-user-base request source.
///
/// Individual requests form an inhomogeneous Poisson process whose rate is
/// active_users(hour) * requests_per_user_per_hour, switched at integer
/// hours. Every request_grouping_factor consecutive requests close one
/// batch, so batches per hour average active_users * rate / grouping and the
/// request total keeps Poisson variance. Requests still short of a full batch
/// when the run ends are discarded, so every batch holds exactly
/// request_grouping_factor requests.
class TrafficGenerator {
 public:
  TrafficGenerator(std::size_t ub_id, UserBaseSpec ub, SimulationParams params, double duration_hours);

  /// The next batch closing after `now`, or nullopt if none closes before the
  /// end of the run.
  std::optional<RequestBatch> schedule_next_batch(Millis now, RandomStream& rng);

  /// Request arrival rate (requests per ms) in effect at time t.
  double request_rate_per_ms(Millis t) const;

  Millis end_time() const noexcept { return end_; }
  const UserBaseSpec& user_base() const noexcept { return ub_; }

 private:
  std::size_t ub_id_;
  UserBaseSpec ub_;
  SimulationParams params_;
  Millis end_;
};

/// Hour-of-day bucket of a simulated timestamp.
int hour_of_day(Millis t);

}  // namespace nimbus
