#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nimbus/errors.hpp"

namespace nimbus {

/// Regions 0..5: North America, South America, Europe, Asia, Africa, Oceania.
inline constexpr std::size_t kRegionCount = 6;

using RegionIndex = std::size_t;
using RegionMatrix = std::array<std::array<double, kRegionCount>, kRegionCount>;

enum class BrokerPolicy { ClosestDataCenter, OptimizeResponseTime };
enum class BalancerPolicy { RoundRobin, EquallySpread, Throttled };
enum class VmPolicy { TimeShared };

/// CLI/config spellings: `closest | optimize` and `rr | esce | throttled`.
std::string_view to_string(BrokerPolicy policy);
std::string_view to_string(BalancerPolicy policy);
std::string_view to_string(VmPolicy policy);
std::optional<BrokerPolicy> parse_broker_policy(std::string_view text);
std::optional<BalancerPolicy> parse_balancer_policy(std::string_view text);

struct UserBaseSpec {
  std::string name;
  RegionIndex region = 0;
  double requests_per_user_per_hour = 60.0;
  std::uint64_t request_size_bytes = 100;
  std::uint64_t response_size_bytes = 100;
  int peak_start_gmt = 3;
  int peak_end_gmt = 9;
  std::uint64_t avg_peak_users = 1000;
  std::uint64_t avg_offpeak_users = 100;

  bool operator==(const UserBaseSpec&) const = default;
};

struct HostSpec {
  double memory_mb = 204800;
  double storage_mb = 100000000;
  double bandwidth_mbps = 1000000;
  std::uint32_t processor_count = 4;
  double processor_mips = 10000;
  VmPolicy vm_policy = VmPolicy::TimeShared;

  bool operator==(const HostSpec&) const = default;
};

struct DataCenterSpec {
  std::string name;
  RegionIndex region = 0;
  std::uint32_t vm_count = 100;
  double vm_image_size = 10000;
  double vm_memory_mb = 512;
  double vm_bandwidth_mbps = 1000;
  /// Per-VM capacity. 0 derives it from the host share (see place_vms).
  double vm_mips = 0;
  std::vector<HostSpec> hosts;

  bool operator==(const DataCenterSpec&) const = default;
};

struct SimulationParams {
  std::uint64_t user_grouping_factor = 1000;
  std::uint64_t request_grouping_factor = 100;
  double instruction_length_per_request = 250;

  bool operator==(const SimulationParams&) const = default;
};

struct CostRates {
  double vm_cost_per_hour = 0.1;
  double data_transfer_cost_per_gb = 0.1;
  double memory_cost = 0.05;
  double storage_cost = 0.1;

  bool operator==(const CostRates&) const = default;
};

struct ScenarioConfig {
  std::string name;
  double duration_hours = 24.0;
  std::vector<UserBaseSpec> user_bases;
  std::vector<DataCenterSpec> data_centers;
  BrokerPolicy broker_policy = BrokerPolicy::ClosestDataCenter;
  BalancerPolicy balancer_policy = BalancerPolicy::RoundRobin;
  SimulationParams sim_params;
  CostRates cost_rates;
  RegionMatrix delay_matrix{};
  RegionMatrix bandwidth_matrix{};
  std::uint64_t seed = 0;
  /// Memory and storage rates are carried but only accrued when set.
  bool accrue_memory_storage_costs = false;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Inter-region mean one-way delay in milliseconds.
const RegionMatrix& default_delay_matrix();
/// Inter-region available bandwidth in Mbps.
const RegionMatrix& default_bandwidth_matrix();
/// The two-unit x86 host set used by every built-in data center.
std::vector<HostSpec> default_hosts();

/// Parse a UTF-8 JSON scenario document (schema in docs/scenario-schema.md).
/// Omitted optional fields take the built-in defaults. Throws ScenarioError
/// carrying a line/column locus for syntax errors or a field path otherwise.
ScenarioConfig parse_scenario(std::string_view text);

/// Canonical JSON form; parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& config);

/// Every invariant violation found in config, with field paths. Empty when valid.
std::vector<ValidationIssue> check_scenario(const ScenarioConfig& config);

/// Immutable, checked scenario consumed by the engine. Cheap to copy and safe
/// to share read-only across threads.
class ValidatedScenario {
 public:
  const ScenarioConfig& config() const noexcept { return *config_; }
  const ScenarioConfig* operator->() const noexcept { return config_.get(); }

  /// Wraps config without checking it. Only for test fixtures that need
  /// degenerate inputs (zero latency, zero users) the validator rejects.
  static ValidatedScenario assume_valid(ScenarioConfig config);

 private:
  explicit ValidatedScenario(std::shared_ptr<const ScenarioConfig> config)
      : config_(std::move(config)) {}
  friend ValidatedScenario validate(ScenarioConfig config);

  std::shared_ptr<const ScenarioConfig> config_;
};

/// Throws ScenarioError listing every violated invariant.
ValidatedScenario validate(ScenarioConfig config);

struct BuiltinInfo {
  std::string name;
  std::string description;
};

/// The three deployment steps: step1 (1 DC x 100 VMs), step2 (2 x 50),
/// step3 (4 x 25), each with the four reference user bases.
std::vector<ScenarioConfig> builtin_scenarios();

/// Every built-in name (the three steps plus `step2-cost`) with a summary.
std::vector<BuiltinInfo> builtin_catalog();

/// Built-in by name, or nullopt.
std::optional<ScenarioConfig> find_builtin(std::string_view name);

}  // namespace nimbus
