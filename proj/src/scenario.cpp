#include "nimbus/scenario.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nimbus/datacenter.hpp"

namespace nimbus {

using Json = nlohmann::ordered_json;

namespace {

std::string join_issues(const std::vector<ValidationIssue>& issues) {
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out << "; ";
    if (!issues[i].path.empty()) out << issues[i].path << ": ";
    out << issues[i].message;
  }
  return out.str();
}

}  // namespace

ScenarioError::ScenarioError(std::vector<ValidationIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ScenarioError::ScenarioError(std::string path, std::string message)
    : ScenarioError(std::vector<ValidationIssue>{{std::move(path), std::move(message)}}) {}

std::string_view to_string(BrokerPolicy policy) {
  switch (policy) {
    case BrokerPolicy::ClosestDataCenter: return "closest";
    case BrokerPolicy::OptimizeResponseTime: return "optimize";
  }
  return "?";
}

std::string_view to_string(BalancerPolicy policy) {
  switch (policy) {
    case BalancerPolicy::RoundRobin: return "rr";
    case BalancerPolicy::EquallySpread: return "esce";
    case BalancerPolicy::Throttled: return "throttled";
  }
  return "?";
}

std::string_view to_string(VmPolicy) { return "time_shared"; }

std::optional<BrokerPolicy> parse_broker_policy(std::string_view text) {
  if (text == "closest") return BrokerPolicy::ClosestDataCenter;
  if (text == "optimize") return BrokerPolicy::OptimizeResponseTime;
  return std::nullopt;
}

std::optional<BalancerPolicy> parse_balancer_policy(std::string_view text) {
  if (text == "rr") return BalancerPolicy::RoundRobin;
  if (text == "esce") return BalancerPolicy::EquallySpread;
  if (text == "throttled") return BalancerPolicy::Throttled;
  return std::nullopt;
}

const RegionMatrix& default_delay_matrix() {
  static const RegionMatrix matrix{{
      {25, 100, 150, 250, 250, 100},
      {100, 25, 250, 500, 350, 200},
      {150, 250, 25, 150, 150, 200},
      {250, 500, 150, 25, 500, 500},
      {250, 350, 150, 500, 25, 500},
      {100, 200, 200, 500, 500, 25},
  }};
  return matrix;
}

const RegionMatrix& default_bandwidth_matrix() {
  static const RegionMatrix matrix{{
      {2000, 1000, 1000, 1000, 1000, 1000},
      {1000, 800, 1000, 1000, 1000, 1000},
      {1000, 1000, 2500, 1000, 1000, 1000},
      {1000, 1000, 1000, 1500, 1000, 1000},
      {1000, 1000, 1000, 1000, 500, 1000},
      {1000, 1000, 1000, 1000, 1000, 2000},
  }};
  return matrix;
}

std::vector<HostSpec> default_hosts() { return {HostSpec{}, HostSpec{}}; }

// ---------------------------------------------------------------------------
// JSON reading with field-path diagnostics.

namespace {

class Reader {
 public:
  Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  template <typename T>
  void optional(const char* key, T& out) {
    seen_.insert(key);
    if (auto it = node_.find(key); it != node_.end()) read(*it, child(key), out);
  }

  template <typename T>
  void required(const char* key, T& out) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end()) fail(child(key), "missing required field");
    read(*it, child(key), out);
  }

  const Json* find(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void reject_unknown() const {
    for (const auto& [key, _] : node_.items()) {
      if (!seen_.contains(key)) fail(child(key), "unknown field");
    }
  }

  std::string child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& message) {
    throw ScenarioError(path, message);
  }

 private:
  static void read(const Json& v, const std::string& path, std::string& out) {
    if (!v.is_string()) fail(path, "expected a string");
    out = v.get<std::string>();
  }
  static void read(const Json& v, const std::string& path, double& out) {
    if (!v.is_number()) fail(path, "expected a number");
    out = v.get<double>();
  }
  static void read(const Json& v, const std::string& path, bool& out) {
    if (!v.is_boolean()) fail(path, "expected true or false");
    out = v.get<bool>();
  }
  template <typename T>
    requires std::is_integral_v<T>
  static void read(const Json& v, const std::string& path, T& out) {
    if (v.is_number_unsigned()) {
      const auto raw = v.get<std::uint64_t>();
      if (raw > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) fail(path, "value too large");
      out = static_cast<T>(raw);
      return;
    }
    if (v.is_number_integer()) {
      if constexpr (std::is_unsigned_v<T>) fail(path, "expected a nonnegative integer");
      out = static_cast<T>(v.get<std::int64_t>());
      return;
    }
    fail(path, "expected an integer");
  }

  const Json& node_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

void read_region(Reader& r, const char* key, RegionIndex& out, bool required) {
  const Json* v = r.find(key);
  if (!v) {
    if (required) Reader::fail(r.child(key), "missing required field");
    return;
  }
  if (!v->is_number_integer()) Reader::fail(r.child(key), "expected an integer region index");
  const auto raw = v->get<std::int64_t>();
  if (raw < 0 || raw >= static_cast<std::int64_t>(kRegionCount)) {
    Reader::fail(r.child(key), "region out of range (0.." + std::to_string(kRegionCount - 1) + ")");
  }
  out = static_cast<RegionIndex>(raw);
}

RegionMatrix read_matrix(const Json& v, const std::string& path) {
  const std::string shape = "expected " + std::to_string(kRegionCount) + " rows of " +
                            std::to_string(kRegionCount) + " numbers";
  if (!v.is_array() || v.size() != kRegionCount) Reader::fail(path, shape);
  RegionMatrix m{};
  for (std::size_t i = 0; i < kRegionCount; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != kRegionCount) Reader::fail(row_path, shape);
    for (std::size_t j = 0; j < kRegionCount; ++j) {
      if (!v[i][j].is_number()) Reader::fail(row_path + "[" + std::to_string(j) + "]", "expected a number");
      m[i][j] = v[i][j].get<double>();
    }
  }
  return m;
}

UserBaseSpec read_user_base(const Json& v, const std::string& path) {
  Reader r(v, path);
  UserBaseSpec ub;
  r.required("name", ub.name);
  read_region(r, "region", ub.region, true);
  r.optional("requests_per_user_per_hour", ub.requests_per_user_per_hour);
  r.optional("request_size_bytes", ub.request_size_bytes);
  ub.response_size_bytes = ub.request_size_bytes;
  r.optional("response_size_bytes", ub.response_size_bytes);
  r.optional("peak_start_gmt", ub.peak_start_gmt);
  r.optional("peak_end_gmt", ub.peak_end_gmt);
  r.optional("avg_peak_users", ub.avg_peak_users);
  r.optional("avg_offpeak_users", ub.avg_offpeak_users);
  r.reject_unknown();
  return ub;
}

HostSpec read_host(const Json& v, const std::string& path) {
  Reader r(v, path);
  HostSpec host;
  r.optional("memory_mb", host.memory_mb);
  r.optional("storage_mb", host.storage_mb);
  r.optional("bandwidth_mbps", host.bandwidth_mbps);
  r.optional("processor_count", host.processor_count);
  r.optional("processor_mips", host.processor_mips);
  std::string policy = "time_shared";
  r.optional("vm_policy", policy);
  if (policy != "time_shared") Reader::fail(r.child("vm_policy"), "unknown VM policy '" + policy + "' (valid: time_shared)");
  r.reject_unknown();
  return host;
}

DataCenterSpec read_data_center(const Json& v, const std::string& path) {
  Reader r(v, path);
  DataCenterSpec dc;
  r.required("name", dc.name);
  read_region(r, "region", dc.region, true);
  r.optional("vm_count", dc.vm_count);
  r.optional("vm_image_size", dc.vm_image_size);
  r.optional("vm_memory_mb", dc.vm_memory_mb);
  r.optional("vm_bandwidth_mbps", dc.vm_bandwidth_mbps);
  r.optional("vm_mips", dc.vm_mips);
  if (const Json* hosts = r.find("hosts")) {
    if (!hosts->is_array()) Reader::fail(r.child("hosts"), "expected an array");
    for (std::size_t i = 0; i < hosts->size(); ++i) {
      dc.hosts.push_back(read_host((*hosts)[i], r.child("hosts") + "[" + std::to_string(i) + "]"));
    }
  } else {
    dc.hosts = default_hosts();
  }
  r.reject_unknown();
  return dc;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

template <typename Policy, typename ParseFn>
void read_policy(Reader& r, const char* key, Policy& out, ParseFn parse, const char* valid) {
  const Json* v = r.find(key);
  if (!v) return;
  if (!v->is_string()) Reader::fail(r.child(key), "expected a string");
  const auto text = v->get<std::string>();
  auto parsed = parse(text);
  if (!parsed) Reader::fail(r.child(key), "unknown policy '" + text + "' (valid: " + valid + ")");
  out = *parsed;
}

Json matrix_json(const RegionMatrix& m) {
  Json rows = Json::array();
  for (const auto& row : m) rows.push_back(Json(row));
  return rows;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, column] = line_and_column(text, byte);
    throw ScenarioError("line " + std::to_string(line) + ", column " + std::to_string(column),
                        "malformed JSON");
  }

  Reader r(doc, "");
  ScenarioConfig config;
  config.delay_matrix = default_delay_matrix();
  config.bandwidth_matrix = default_bandwidth_matrix();

  r.optional("name", config.name);
  r.optional("duration_hours", config.duration_hours);
  read_policy(r, "broker_policy", config.broker_policy, parse_broker_policy, "closest, optimize");
  read_policy(r, "balancer_policy", config.balancer_policy, parse_balancer_policy, "rr, esce, throttled");
  r.optional("seed", config.seed);
  r.optional("accrue_memory_storage_costs", config.accrue_memory_storage_costs);

  if (const Json* ubs = r.find("user_bases")) {
    if (!ubs->is_array()) Reader::fail("user_bases", "expected an array");
    for (std::size_t i = 0; i < ubs->size(); ++i) {
      config.user_bases.push_back(read_user_base((*ubs)[i], "user_bases[" + std::to_string(i) + "]"));
    }
  }
  if (const Json* dcs = r.find("data_centers")) {
    if (!dcs->is_array()) Reader::fail("data_centers", "expected an array");
    for (std::size_t i = 0; i < dcs->size(); ++i) {
      config.data_centers.push_back(read_data_center((*dcs)[i], "data_centers[" + std::to_string(i) + "]"));
    }
  }
  if (const Json* p = r.find("sim_params")) {
    Reader pr(*p, "sim_params");
    pr.optional("user_grouping_factor", config.sim_params.user_grouping_factor);
    pr.optional("request_grouping_factor", config.sim_params.request_grouping_factor);
    pr.optional("instruction_length_per_request", config.sim_params.instruction_length_per_request);
    pr.reject_unknown();
  }
  if (const Json* c = r.find("cost_rates")) {
    Reader cr(*c, "cost_rates");
    cr.optional("vm_cost_per_hour", config.cost_rates.vm_cost_per_hour);
    cr.optional("data_transfer_cost_per_gb", config.cost_rates.data_transfer_cost_per_gb);
    cr.optional("memory_cost", config.cost_rates.memory_cost);
    cr.optional("storage_cost", config.cost_rates.storage_cost);
    cr.reject_unknown();
  }
  if (const Json* m = r.find("delay_matrix")) config.delay_matrix = read_matrix(*m, "delay_matrix");
  if (const Json* m = r.find("bandwidth_matrix")) config.bandwidth_matrix = read_matrix(*m, "bandwidth_matrix");
  r.reject_unknown();
  return config;
}

std::string serialize_scenario(const ScenarioConfig& c) {
  Json doc;
  doc["name"] = c.name;
  doc["duration_hours"] = c.duration_hours;
  doc["broker_policy"] = to_string(c.broker_policy);
  doc["balancer_policy"] = to_string(c.balancer_policy);
  doc["seed"] = c.seed;
  doc["accrue_memory_storage_costs"] = c.accrue_memory_storage_costs;

  Json ubs = Json::array();
  for (const auto& ub : c.user_bases) {
    ubs.push_back({{"name", ub.name},
                   {"region", ub.region},
                   {"requests_per_user_per_hour", ub.requests_per_user_per_hour},
                   {"request_size_bytes", ub.request_size_bytes},
                   {"response_size_bytes", ub.response_size_bytes},
                   {"peak_start_gmt", ub.peak_start_gmt},
                   {"peak_end_gmt", ub.peak_end_gmt},
                   {"avg_peak_users", ub.avg_peak_users},
                   {"avg_offpeak_users", ub.avg_offpeak_users}});
  }
  doc["user_bases"] = std::move(ubs);

  Json dcs = Json::array();
  for (const auto& dc : c.data_centers) {
    Json hosts = Json::array();
    for (const auto& h : dc.hosts) {
      hosts.push_back({{"memory_mb", h.memory_mb},
                       {"storage_mb", h.storage_mb},
                       {"bandwidth_mbps", h.bandwidth_mbps},
                       {"processor_count", h.processor_count},
                       {"processor_mips", h.processor_mips},
                       {"vm_policy", to_string(h.vm_policy)}});
    }
    dcs.push_back({{"name", dc.name},
                   {"region", dc.region},
                   {"vm_count", dc.vm_count},
                   {"vm_image_size", dc.vm_image_size},
                   {"vm_memory_mb", dc.vm_memory_mb},
                   {"vm_bandwidth_mbps", dc.vm_bandwidth_mbps},
                   {"vm_mips", dc.vm_mips},
                   {"hosts", std::move(hosts)}});
  }
  doc["data_centers"] = std::move(dcs);

  doc["sim_params"] = {{"user_grouping_factor", c.sim_params.user_grouping_factor},
                       {"request_grouping_factor", c.sim_params.request_grouping_factor},
                       {"instruction_length_per_request", c.sim_params.instruction_length_per_request}};
  doc["cost_rates"] = {{"vm_cost_per_hour", c.cost_rates.vm_cost_per_hour},
                       {"data_transfer_cost_per_gb", c.cost_rates.data_transfer_cost_per_gb},
                       {"memory_cost", c.cost_rates.memory_cost},
                       {"storage_cost", c.cost_rates.storage_cost}};
  doc["delay_matrix"] = matrix_json(c.delay_matrix);
  doc["bandwidth_matrix"] = matrix_json(c.bandwidth_matrix);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Validation.

std::vector<ValidationIssue> check_scenario(const ScenarioConfig& c) {
  std::vector<ValidationIssue> issues;
  auto issue = [&](std::string path, std::string message) {
    issues.push_back({std::move(path), std::move(message)});
  };
  auto positive = [](double v) { return std::isfinite(v) && v > 0; };
  auto nonnegative = [](double v) { return std::isfinite(v) && v >= 0; };

  if (!positive(c.duration_hours)) issue("duration_hours", "must be > 0");
  if (c.user_bases.empty()) issue("user_bases", "at least one user base is required");
  if (c.data_centers.empty()) issue("data_centers", "at least one data center is required");

  for (std::size_t i = 0; i < c.user_bases.size(); ++i) {
    const auto& ub = c.user_bases[i];
    const std::string p = "user_bases[" + std::to_string(i) + "]";
    if (ub.region >= kRegionCount) issue(p + ".region", "region out of range");
    if (!positive(ub.requests_per_user_per_hour)) issue(p + ".requests_per_user_per_hour", "must be > 0");
    if (ub.request_size_bytes == 0) issue(p + ".request_size_bytes", "must be > 0");
    if (ub.response_size_bytes == 0) issue(p + ".response_size_bytes", "must be > 0");
    if (ub.peak_start_gmt < 0 || ub.peak_end_gmt > 24) {
      issue(p + ".peak_start_gmt", "peak hours must lie within 0..24");
    } else if (ub.peak_start_gmt >= ub.peak_end_gmt) {
      issue(p + ".peak_end_gmt", "peak window empty");
    }
    if (ub.avg_peak_users == 0) issue(p + ".avg_peak_users", "must be > 0");
    if (ub.avg_offpeak_users == 0) issue(p + ".avg_offpeak_users", "must be > 0");
  }

  for (std::size_t i = 0; i < c.data_centers.size(); ++i) {
    const auto& dc = c.data_centers[i];
    const std::string p = "data_centers[" + std::to_string(i) + "]";
    if (dc.region >= kRegionCount) issue(p + ".region", "region out of range");
    if (dc.vm_count == 0) issue(p + ".vm_count", "must be > 0");
    if (dc.hosts.empty()) issue(p + ".hosts", "at least one host is required");
    if (!nonnegative(dc.vm_mips)) issue(p + ".vm_mips", "must be >= 0");
    bool hosts_ok = true;
    for (std::size_t h = 0; h < dc.hosts.size(); ++h) {
      const auto& host = dc.hosts[h];
      const std::string hp = p + ".hosts[" + std::to_string(h) + "]";
      if (host.processor_count < 1) {
        issue(hp + ".processor_count", "must be >= 1");
        hosts_ok = false;
      }
      if (!positive(host.processor_mips)) {
        issue(hp + ".processor_mips", "must be > 0");
        hosts_ok = false;
      }
    }
    if (hosts_ok && dc.vm_count > 0 && !dc.hosts.empty()) {
      try {
        (void)place_vms(dc);
      } catch (const CapacityError& e) {
        issue(p, std::string("VM placement infeasible: ") + e.what());
      }
    }
  }

  const auto& sp = c.sim_params;
  if (sp.user_grouping_factor == 0) issue("sim_params.user_grouping_factor", "must be > 0");
  if (sp.request_grouping_factor == 0) issue("sim_params.request_grouping_factor", "must be > 0");
  if (!positive(sp.instruction_length_per_request)) issue("sim_params.instruction_length_per_request", "must be > 0");

  const auto& cr = c.cost_rates;
  if (!nonnegative(cr.vm_cost_per_hour)) issue("cost_rates.vm_cost_per_hour", "must be >= 0");
  if (!nonnegative(cr.data_transfer_cost_per_gb)) issue("cost_rates.data_transfer_cost_per_gb", "must be >= 0");
  if (!nonnegative(cr.memory_cost)) issue("cost_rates.memory_cost", "must be >= 0");
  if (!nonnegative(cr.storage_cost)) issue("cost_rates.storage_cost", "must be >= 0");

  for (std::size_t i = 0; i < kRegionCount; ++i) {
    for (std::size_t j = 0; j < kRegionCount; ++j) {
      const std::string cell = "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      if (!positive(c.delay_matrix[i][j])) issue("delay_matrix" + cell, "must be > 0");
      if (!positive(c.bandwidth_matrix[i][j])) issue("bandwidth_matrix" + cell, "must be > 0");
    }
  }
  return issues;
}

ValidatedScenario ValidatedScenario::assume_valid(ScenarioConfig config) {
  return ValidatedScenario(std::make_shared<const ScenarioConfig>(std::move(config)));
}

ValidatedScenario validate(ScenarioConfig config) {
  auto issues = check_scenario(config);
  if (!issues.empty()) throw ScenarioError(std::move(issues));
  return ValidatedScenario(std::make_shared<const ScenarioConfig>(std::move(config)));
}

// ---------------------------------------------------------------------------
// Built-in scenarios.

namespace {

// UB1=0, UB2=3, UB3=2, UB4=5. With UB1 in region 1 instead, its average
// response would sit near twice the region 1 -> 0 delay (about 200 ms), not
// the expected 50 ms.
std::vector<UserBaseSpec> reference_user_bases() {
  std::vector<UserBaseSpec> ubs;
  const std::array<std::pair<const char*, RegionIndex>, 4> layout{{{"UB1", 0}, {"UB2", 3}, {"UB3", 2}, {"UB4", 5}}};
  for (const auto& [name, region] : layout) {
    UserBaseSpec ub;
    ub.name = name;
    ub.region = region;
    ubs.push_back(ub);
  }
  return ubs;
}

// DC1 sits in region 0; further DCs follow the next user-base regions.
constexpr std::array<RegionIndex, 4> kDataCenterRegions{0, 2, 3, 5};

ScenarioConfig make_step(std::string name, std::size_t dc_count, double duration_hours) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.duration_hours = duration_hours;
  c.user_bases = reference_user_bases();
  c.delay_matrix = default_delay_matrix();
  c.bandwidth_matrix = default_bandwidth_matrix();
  const auto vms = static_cast<std::uint32_t>(100 / dc_count);
  for (std::size_t i = 0; i < dc_count; ++i) {
    DataCenterSpec dc;
    dc.name = "DC" + std::to_string(i + 1);
    dc.region = kDataCenterRegions[i];
    dc.vm_count = vms;
    dc.hosts = default_hosts();
    c.data_centers.push_back(std::move(dc));
  }
  return c;
}

}  // namespace

std::vector<ScenarioConfig> builtin_scenarios() {
  return {make_step("step1", 1, 24.0), make_step("step2", 2, 24.0), make_step("step3", 4, 24.0)};
}

std::vector<BuiltinInfo> builtin_catalog() {
  return {
      {"step1", "1 DC / 100 VMs, all user bases served from region 0, 24 h"},
      {"step2", "2 DCs / 50 VMs each (regions 0 and 2), 24 h"},
      {"step2-cost", "2 DCs / 50 VMs each, 20 h (VM cost reference run)"},
      {"step3", "4 DCs / 25 VMs each (regions 0, 2, 3, 5), 24 h"},
  };
}

std::optional<ScenarioConfig> find_builtin(std::string_view name) {
  if (name == "step1") return make_step("step1", 1, 24.0);
  if (name == "step2") return make_step("step2", 2, 24.0);
  if (name == "step2-cost") return make_step("step2-cost", 2, 20.0);
  if (name == "step3") return make_step("step3", 4, 24.0);
  return std::nullopt;
}

}  // namespace nimbus
