#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nimbus/random.hpp"
#include "nimbus/scenario.hpp"
#include "nimbus/units.hpp"

namespace nimbus::testkit {

struct PsJob {
  std::int64_t arrival_us = 0;
  double instructions = 0;
};

/// Fixed-timestep processor sharing: every step each active job receives
/// capacity * step / n instructions. Completion is reported at the end of
/// the step in which a job's work runs out.
std::vector<Millis> brute_force_ps(const std::vector<PsJob>& jobs, double mips, Millis step_ms = 1e-3);

/// Same jobs driven through VmState admit/complete events.
std::vector<Millis> event_driven_ps(const std::vector<PsJob>& jobs, double mips);

/// 1..5 jobs, solo durations 2..20 ms, arrivals in the first 15 ms.
struct PsCase {
  double mips = 0;
  std::vector<PsJob> jobs;
};
PsCase random_ps_case(RandomStream& rng);

/// Largest relative gap between the two simulators over n random cases.
struct PsComparison {
  double worst_relative_error = 0;
  std::size_t cases = 0;
};
PsComparison compare_ps(std::uint64_t seed, std::size_t n);

/// Randomized dispatch/complete sequences against each balancer. Each returns
/// a description of the first violation, or nullopt.
std::optional<std::string> throttled_property(std::uint64_t seed, int steps);
std::optional<std::string> esce_property(std::uint64_t seed, int steps);
std::optional<std::string> round_robin_property(std::uint64_t seed, int steps);

/// One UB in region 0, one DC in region 0 with vm_count VMs on the default hosts.
ScenarioConfig tiny_scenario(std::uint32_t vm_count = 1);

/// Every entry set to value.
RegionMatrix uniform_matrix(double value);

}  // namespace nimbus::testkit
