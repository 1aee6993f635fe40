#include "nimbus/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "nimbus/errors.hpp"
#include "nimbus/traffic.hpp"

namespace nimbus {

using Json = nlohmann::ordered_json;

void StatAccumulator::add(double value_ms, std::uint64_t weight) {
  if (weight == 0) return;
  count_ += weight;
  sum_ += value_ms * static_cast<double>(weight);
  min_ = std::min(min_, value_ms);
  max_ = std::max(max_, value_ms);
}

void StatAccumulator::merge(const StatAccumulator& other) {
  if (other.empty()) return;
  count_ += other.count_;
  sum_ += other.sum_;
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
}

double StatAccumulator::mean_ms() const noexcept {
  return count_ == 0 ? std::numeric_limits<double>::quiet_NaN() : sum_ / static_cast<double>(count_);
}

StatAccumulator StatAccumulator::from_parts(std::uint64_t count, double sum, double min, double max) {
  StatAccumulator s;
  if (count == 0) return s;
  s.count_ = count;
  s.sum_ = sum;
  s.min_ = min;
  s.max_ = max;
  return s;
}

void HourlyHistogram::add(int hour, double value_ms, std::uint64_t weight) { bucket(hour).add(value_ms, weight); }

std::uint64_t HourlyHistogram::total_count() const {
  return std::accumulate(buckets_.begin(), buckets_.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const StatAccumulator& s) { return acc + s.count(); });
}

double CostLedger::total_vm_cost() const {
  return std::accumulate(per_dc.begin(), per_dc.end(), 0.0, [](double a, const DcCost& c) { return a + c.vm_cost; });
}

double CostLedger::total_data_transfer_cost() const {
  return std::accumulate(per_dc.begin(), per_dc.end(), 0.0,
                         [](double a, const DcCost& c) { return a + c.data_transfer_cost; });
}

double CostLedger::total() const {
  return std::accumulate(per_dc.begin(), per_dc.end(), 0.0, [](double a, const DcCost& c) { return a + c.total(); });
}

double vm_cost(const DataCenterSpec& dc, double duration_hours, const CostRates& rates) {
  return static_cast<double>(dc.vm_count) * duration_hours * rates.vm_cost_per_hour;
}

double data_transfer_cost(std::uint64_t total_bytes, const CostRates& rates) {
  return static_cast<double>(total_bytes) / 1e9 * rates.data_transfer_cost_per_gb;
}

double memory_cost(double duration_hours, const CostRates& rates) {
  return duration_hours * 3600.0 * rates.memory_cost;
}

double storage_cost(const DataCenterSpec& dc, const CostRates& rates) {
  return static_cast<double>(dc.vm_count) * rates.storage_cost;
}

// ---------------------------------------------------------------------------

MetricsRecorder::MetricsRecorder(std::vector<std::string> ub_names, std::vector<std::string> dc_names) {
  for (auto& n : ub_names) ubs_.push_back(NamedStats{std::move(n), {}, {}});
  for (auto& n : dc_names) dcs_.push_back(NamedStats{std::move(n), {}, {}});
  dc_bytes_.assign(dcs_.size(), 0);
}

void MetricsRecorder::record_response(std::size_t ub, Millis sent_at, Millis delivered_at, std::uint64_t group_size) {
  const Millis duration = delivered_at - sent_at;
  if (duration < 0) throw InvariantError("negative response time for user base " + std::to_string(ub));
  auto& s = ubs_.at(ub);
  s.stats.add(duration, group_size);
  s.hourly.add(hour_of_day(sent_at), duration, group_size);
}

void MetricsRecorder::record_processing(std::size_t dc, Millis arrived_dc_at, Millis processing_done_at,
                                        std::uint64_t group_size) {
  const Millis duration = processing_done_at - arrived_dc_at;
  if (duration < 0) throw InvariantError("negative processing time in data center " + std::to_string(dc));
  auto& s = dcs_.at(dc);
  s.stats.add(duration, group_size);
  s.hourly.add(hour_of_day(arrived_dc_at), duration, group_size);
}

void MetricsRecorder::record_transfer_bytes(std::size_t dc, std::uint64_t bytes) { dc_bytes_.at(dc) += bytes; }

SimulationReport MetricsRecorder::summarize(const ScenarioConfig& config, RunCounters counters,
                                            std::vector<std::uint64_t> requests_generated_per_ub) const {
  SimulationReport report;
  report.meta.scenario = config.name;
  report.meta.broker = std::string(to_string(config.broker_policy));
  report.meta.balancer = std::string(to_string(config.balancer_policy));
  report.meta.seed = config.seed;
  report.meta.duration_hours = config.duration_hours;
  report.user_bases = ubs_;
  report.data_centers = dcs_;
  for (const auto& ub : ubs_) report.overall_response.merge(ub.stats);
  for (const auto& dc : dcs_) report.overall_processing.merge(dc.stats);
  report.requests_generated_per_ub = std::move(requests_generated_per_ub);
  report.counters = counters;

  for (std::size_t i = 0; i < config.data_centers.size() && i < dcs_.size(); ++i) {
    const auto& spec = config.data_centers[i];
    DcCost cost;
    cost.data_center = spec.name;
    cost.vm_cost = vm_cost(spec, config.duration_hours, config.cost_rates);
    cost.data_transfer_cost = data_transfer_cost(dc_bytes_[i], config.cost_rates);
    if (config.accrue_memory_storage_costs) {
      cost.memory_cost = memory_cost(config.duration_hours, config.cost_rates);
      cost.storage_cost = storage_cost(spec, config.cost_rates);
    }
    report.costs.per_dc.push_back(cost);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Rendering.

std::string render_ms(double value) {
  if (!std::isfinite(value)) return "—";
  // Half-up at the second decimal; the epsilon absorbs binary representation
  // error (2.675 is stored as 2.67499999...).
  const double rounded = std::floor(value * 100.0 + 0.5 + 1e-9) / 100.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", rounded);
  return buf;
}

std::string render_mean(const StatAccumulator& s) { return s.empty() ? "—" : render_ms(s.mean_ms()); }
std::string render_min(const StatAccumulator& s) { return s.empty() ? "—" : render_ms(s.min_ms()); }
std::string render_max(const StatAccumulator& s) { return s.empty() ? "—" : render_ms(s.max_ms()); }

std::string format_exact(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

// ---------------------------------------------------------------------------
// JSON.

namespace {

Json stat_json(const StatAccumulator& s) {
  Json j;
  j["count"] = s.count();
  j["sum_ms"] = s.sum_ms();
  if (s.empty()) {
    j["avg_ms"] = nullptr;
    j["min_ms"] = nullptr;
    j["max_ms"] = nullptr;
  } else {
    j["avg_ms"] = s.mean_ms();
    j["min_ms"] = s.min_ms();
    j["max_ms"] = s.max_ms();
  }
  return j;
}

StatAccumulator stat_from(const Json& j) {
  const auto count = j.at("count").get<std::uint64_t>();
  if (count == 0) return {};
  return StatAccumulator::from_parts(count, j.at("sum_ms").get<double>(), j.at("min_ms").get<double>(),
                                     j.at("max_ms").get<double>());
}

Json hourly_json(const HourlyHistogram& h) {
  Json rows = Json::array();
  for (int hour = 0; hour < kHoursPerDay; ++hour) {
    Json row;
    row["hour"] = hour;
    const Json stats = stat_json(h.bucket(hour));
    for (const auto& [k, v] : stats.items()) row[k] = v;
    rows.push_back(std::move(row));
  }
  return rows;
}

HourlyHistogram hourly_from(const Json& rows) {
  HourlyHistogram h;
  for (const auto& row : rows) h.bucket(row.at("hour").get<int>()) = stat_from(row);
  return h;
}

}  // namespace

std::string report_to_json(const SimulationReport& r) {
  Json doc;
  doc["scenario"] = r.meta.scenario;
  doc["broker"] = r.meta.broker;
  doc["balancer"] = r.meta.balancer;
  doc["seed"] = r.meta.seed;
  doc["duration_hours"] = r.meta.duration_hours;
  doc["overall"] = {{"response", stat_json(r.overall_response)}, {"processing", stat_json(r.overall_processing)}};

  Json ubs = Json::array();
  for (std::size_t i = 0; i < r.user_bases.size(); ++i) {
    const auto& ub = r.user_bases[i];
    Json j;
    j["name"] = ub.name;
    j["requests_generated"] = i < r.requests_generated_per_ub.size() ? r.requests_generated_per_ub[i] : 0;
    j["response"] = stat_json(ub.stats);
    j["hourly"] = hourly_json(ub.hourly);
    ubs.push_back(std::move(j));
  }
  doc["user_bases"] = std::move(ubs);

  Json dcs = Json::array();
  for (const auto& dc : r.data_centers) {
    Json j;
    j["name"] = dc.name;
    j["processing"] = stat_json(dc.stats);
    j["hourly"] = hourly_json(dc.hourly);
    dcs.push_back(std::move(j));
  }
  doc["data_centers"] = std::move(dcs);

  Json costs = Json::array();
  for (const auto& c : r.costs.per_dc) {
    costs.push_back({{"data_center", c.data_center},
                     {"vm_cost", c.vm_cost},
                     {"data_transfer_cost", c.data_transfer_cost},
                     {"memory_cost", c.memory_cost},
                     {"storage_cost", c.storage_cost},
                     {"total", c.total()}});
  }
  doc["costs"] = {{"data_centers", std::move(costs)},
                  {"total_vm_cost", r.costs.total_vm_cost()},
                  {"total_data_transfer_cost", r.costs.total_data_transfer_cost()},
                  {"total", r.costs.total()}};

  const auto& c = r.counters;
  doc["counters"] = {{"batches_generated", c.batches_generated},
                     {"batches_delivered", c.batches_delivered},
                     {"batches_in_flight_at_cutoff", c.batches_in_flight_at_cutoff},
                     {"requests_generated", c.requests_generated},
                     {"requests_delivered", c.requests_delivered},
                     {"events_processed", c.events_processed}};
  return doc.dump(2) + "\n";
}

SimulationReport report_from_json(std::string_view text) {
  const Json doc = Json::parse(text.begin(), text.end());
  SimulationReport r;
  r.meta.scenario = doc.at("scenario").get<std::string>();
  r.meta.broker = doc.at("broker").get<std::string>();
  r.meta.balancer = doc.at("balancer").get<std::string>();
  r.meta.seed = doc.at("seed").get<std::uint64_t>();
  r.meta.duration_hours = doc.at("duration_hours").get<double>();
  r.overall_response = stat_from(doc.at("overall").at("response"));
  r.overall_processing = stat_from(doc.at("overall").at("processing"));
  for (const auto& j : doc.at("user_bases")) {
    r.user_bases.push_back({j.at("name").get<std::string>(), stat_from(j.at("response")), hourly_from(j.at("hourly"))});
    r.requests_generated_per_ub.push_back(j.at("requests_generated").get<std::uint64_t>());
  }
  for (const auto& j : doc.at("data_centers")) {
    r.data_centers.push_back(
        {j.at("name").get<std::string>(), stat_from(j.at("processing")), hourly_from(j.at("hourly"))});
  }
  for (const auto& j : doc.at("costs").at("data_centers")) {
    r.costs.per_dc.push_back({j.at("data_center").get<std::string>(), j.at("vm_cost").get<double>(),
                              j.at("data_transfer_cost").get<double>(), j.at("memory_cost").get<double>(),
                              j.at("storage_cost").get<double>()});
  }
  const auto& c = doc.at("counters");
  r.counters.batches_generated = c.at("batches_generated").get<std::uint64_t>();
  r.counters.batches_delivered = c.at("batches_delivered").get<std::uint64_t>();
  r.counters.batches_in_flight_at_cutoff = c.at("batches_in_flight_at_cutoff").get<std::uint64_t>();
  r.counters.requests_generated = c.at("requests_generated").get<std::uint64_t>();
  r.counters.requests_delivered = c.at("requests_delivered").get<std::uint64_t>();
  r.counters.events_processed = c.at("events_processed").get<std::uint64_t>();
  return r;
}

}  // namespace nimbus
