#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nimbus/metrics.hpp"
#include "nimbus/scenario.hpp"

namespace nimbus {

struct SampleSummary {
  double mean = 0;
  /// Sample standard deviation (n - 1); 0 for a single replicate.
  double stdev = 0;
};

SampleSummary summarize_samples(const std::vector<double>& values);

/// One balancer x broker x scenario combination across its seeds.
struct ComparisonCell {
  std::string scenario;
  BalancerPolicy balancer = BalancerPolicy::RoundRobin;
  BrokerPolicy broker = BrokerPolicy::ClosestDataCenter;
  std::vector<SimulationReport> reports;
  bool failed = false;
  std::string diagnostic;

  SampleSummary avg_response() const;
  SampleSummary avg_processing() const;
  SampleSummary total_cost() const;
};

struct ComparisonMatrix {
  std::vector<ComparisonCell> cells;

  bool any_failed() const;
};

struct ComparisonRequest {
  std::vector<ScenarioConfig> scenarios;
  std::vector<BalancerPolicy> balancers{BalancerPolicy::RoundRobin, BalancerPolicy::EquallySpread,
                                        BalancerPolicy::Throttled};
  std::vector<BrokerPolicy> brokers{BrokerPolicy::ClosestDataCenter};
  std::vector<std::uint64_t> seeds{0};
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Runs every (scenario, balancer, broker, seed) combination; runs are
/// independent engines and execute in parallel. Cells come back in request
/// order regardless of completion order; a failing cell carries its
/// diagnostic and does not stop the others.
ComparisonMatrix run_comparison(const ComparisonRequest& request);

/// scenario,balancer,broker,seeds,avg_response_ms,avg_response_stdev,...
std::string comparison_csv(const ComparisonMatrix& matrix);

/// Cells ranked by mean average response time (failed cells last).
std::string render_ranked_summary(const ComparisonMatrix& matrix);

}  // namespace nimbus
