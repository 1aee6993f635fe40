#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nimbus/scenario.hpp"
#include "nimbus/units.hpp"

namespace nimbus {

/// Weighted count/sum/min/max of durations in milliseconds.
class StatAccumulator {
 public:
  void add(double value_ms, std::uint64_t weight = 1);
  void merge(const StatAccumulator& other);

  bool empty() const noexcept { return count_ == 0; }
  std::uint64_t count() const noexcept { return count_; }
  double sum_ms() const noexcept { return sum_; }
  double min_ms() const noexcept { return min_; }
  double max_ms() const noexcept { return max_; }
  /// NaN when empty.
  double mean_ms() const noexcept;

  static StatAccumulator from_parts(std::uint64_t count, double sum, double min, double max);

  bool operator==(const StatAccumulator&) const = default;

 private:
  std::uint64_t count_ = 0;
  double sum_ = 0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

/// 24 hour-of-day buckets.
class HourlyHistogram {
 public:
  void add(int hour, double value_ms, std::uint64_t weight);
  const StatAccumulator& bucket(int hour) const { return buckets_.at(static_cast<std::size_t>(hour)); }
  StatAccumulator& bucket(int hour) { return buckets_.at(static_cast<std::size_t>(hour)); }
  std::uint64_t total_count() const;

  bool operator==(const HourlyHistogram&) const = default;

 private:
  std::array<StatAccumulator, kHoursPerDay> buckets_{};
};

struct DcCost {
  std::string data_center;
  double vm_cost = 0;
  double data_transfer_cost = 0;
  double memory_cost = 0;
  double storage_cost = 0;
  double total() const noexcept { return vm_cost + data_transfer_cost + memory_cost + storage_cost; }

  bool operator==(const DcCost&) const = default;
};

struct CostLedger {
  std::vector<DcCost> per_dc;

  double total_vm_cost() const;
  double total_data_transfer_cost() const;
  double total() const;

  bool operator==(const CostLedger&) const = default;
};

/// VMs reserved for the whole run, billed per VM-hour.
double vm_cost(const DataCenterSpec& dc, double duration_hours, const CostRates& rates);
/// Decimal gigabytes moved, billed per GB.
double data_transfer_cost(std::uint64_t total_bytes, const CostRates& rates);
/// Optional accrual: memory rate per simulated second, storage rate per VM image.
double memory_cost(double duration_hours, const CostRates& rates);
double storage_cost(const DataCenterSpec& dc, const CostRates& rates);

struct NamedStats {
  std::string name;
  StatAccumulator stats;
  HourlyHistogram hourly;

  bool operator==(const NamedStats&) const = default;
};

struct RunMetadata {
  std::string scenario;
  std::string broker;
  std::string balancer;
  std::uint64_t seed = 0;
  double duration_hours = 0;
  /// Host time spent; kept out of the canonical report so runs stay diffable.
  double wall_time_ms = 0;

  bool operator==(const RunMetadata& o) const {
    return scenario == o.scenario && broker == o.broker && balancer == o.balancer && seed == o.seed &&
           duration_hours == o.duration_hours;
  }
};

struct RunCounters {
  std::uint64_t batches_generated = 0;
  std::uint64_t batches_delivered = 0;
  std::uint64_t batches_in_flight_at_cutoff = 0;
  std::uint64_t requests_generated = 0;
  std::uint64_t requests_delivered = 0;
  std::uint64_t events_processed = 0;

  bool operator==(const RunCounters&) const = default;
};

struct SimulationReport {
  RunMetadata meta;
  StatAccumulator overall_response;
  StatAccumulator overall_processing;
  std::vector<NamedStats> user_bases;
  std::vector<NamedStats> data_centers;
  /// Requests generated per user base, delivered or not.
  std::vector<std::uint64_t> requests_generated_per_ub;
  CostLedger costs;
  RunCounters counters;

  bool operator==(const SimulationReport&) const = default;
};

/// Collects raw per-request observations during a run.
class MetricsRecorder {
 public:
  MetricsRecorder(std::vector<std::string> ub_names, std::vector<std::string> dc_names);

  /// Response time bucketed by the hour the batch was sent. Throws
  /// InvariantError when delivered_at < sent_at.
  void record_response(std::size_t ub, Millis sent_at, Millis delivered_at, std::uint64_t group_size);
  /// DC residency bucketed by the hour the batch reached the DC.
  void record_processing(std::size_t dc, Millis arrived_dc_at, Millis processing_done_at, std::uint64_t group_size);
  void record_transfer_bytes(std::size_t dc, std::uint64_t bytes);

  std::uint64_t transferred_bytes(std::size_t dc) const { return dc_bytes_.at(dc); }

  /// Assembles the final report; overall stats are merged from the per-UB and
  /// per-DC accumulators.
  SimulationReport summarize(const ScenarioConfig& config, RunCounters counters,
                             std::vector<std::uint64_t> requests_generated_per_ub) const;

 private:
  std::vector<NamedStats> ubs_;
  std::vector<NamedStats> dcs_;
  std::vector<std::uint64_t> dc_bytes_;
};

/// Paper-style two-decimal rendering (round half up); "—" for empty stats.
std::string render_ms(double value);
std::string render_mean(const StatAccumulator& s);
std::string render_min(const StatAccumulator& s);
std::string render_max(const StatAccumulator& s);

/// Shortest text that parses back to exactly the same double.
std::string format_exact(double value);

/// Canonical JSON (fixed field order, no wall time). Byte-identical for
/// identical runs.
std::string report_to_json(const SimulationReport& report);
SimulationReport report_from_json(std::string_view text);

}  // namespace nimbus
