#include "nimbus/traffic.hpp"

#include <algorithm>
#include <cmath>

namespace nimbus {

std::uint64_t active_users(const UserBaseSpec& ub, int gmt_hour) {
  const bool peak = ub.peak_start_gmt <= gmt_hour && gmt_hour < ub.peak_end_gmt;
  return peak ? ub.avg_peak_users : ub.avg_offpeak_users;
}

double expected_requests(const UserBaseSpec& ub, double duration_hours) {
  double total = 0;
  for (int h = 0; h < duration_hours; ++h) {
    const double span = std::min(1.0, duration_hours - h);
    total += span * static_cast<double>(active_users(ub, h % kHoursPerDay)) * ub.requests_per_user_per_hour;
  }
  return total;
}

int hour_of_day(Millis t) {
  return static_cast<int>(static_cast<std::int64_t>(std::floor(t / kMsPerHour)) % kHoursPerDay);
}

TrafficGenerator::TrafficGenerator(std::size_t ub_id, UserBaseSpec ub, SimulationParams params,
                                   double duration_hours)
    : ub_id_(ub_id), ub_(std::move(ub)), params_(params), end_(duration_hours * kMsPerHour) {}

double TrafficGenerator::request_rate_per_ms(Millis t) const {
  return static_cast<double>(active_users(ub_, hour_of_day(t))) * ub_.requests_per_user_per_hour / kMsPerHour;
}

std::optional<RequestBatch> TrafficGenerator::schedule_next_batch(Millis now, RandomStream& rng) {
  const std::uint64_t target = std::max<std::uint64_t>(1, params_.request_grouping_factor);
  std::uint64_t count = 0;
  Millis t = now;
  Millis last = now;
  while (count < target && t < end_) {
    const Millis hour_end = std::min(end_, (std::floor(t / kMsPerHour) + 1.0) * kMsPerHour);
    const double rate = request_rate_per_ms(t);
    if (!(rate > 0)) {
      t = hour_end;
      continue;
    }
    const Millis gap = rng.exponential(rate);
    if (t + gap >= hour_end) {
      // Memoryless: restart the clock at the boundary under the new rate.
      t = hour_end;
      continue;
    }
    t += gap;
    last = t;
    ++count;
  }
  // Requests left over when the run ends never fill a batch and are not issued.
  if (count < target) return std::nullopt;

  RequestBatch batch;
  batch.ub_id = ub_id_;
  batch.created_at = last;
  batch.user_count = std::min(params_.user_grouping_factor, active_users(ub_, hour_of_day(last)));
  batch.request_size_bytes = ub_.request_size_bytes * count;
  batch.response_size_bytes = ub_.response_size_bytes * count;
  batch.group_size = count;
  return batch;
}

}  // namespace nimbus
