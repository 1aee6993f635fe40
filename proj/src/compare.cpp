#include "nimbus/compare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "nimbus/engine.hpp"

namespace nimbus {

SampleSummary summarize_samples(const std::vector<double>& values) {
  SampleSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double sq = 0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(sq / (n - 1));
  }
  return s;
}

namespace {

template <typename Fn>
SampleSummary over_reports(const std::vector<SimulationReport>& reports, Fn fn) {
  std::vector<double> values;
  for (const auto& r : reports) values.push_back(fn(r));
  return summarize_samples(values);
}

}  // namespace

SampleSummary ComparisonCell::avg_response() const {
  return over_reports(reports, [](const SimulationReport& r) { return r.overall_response.mean_ms(); });
}

SampleSummary ComparisonCell::avg_processing() const {
  return over_reports(reports, [](const SimulationReport& r) { return r.overall_processing.mean_ms(); });
}

SampleSummary ComparisonCell::total_cost() const {
  return over_reports(reports, [](const SimulationReport& r) { return r.costs.total(); });
}

bool ComparisonMatrix::any_failed() const {
  return std::any_of(cells.begin(), cells.end(), [](const ComparisonCell& c) { return c.failed; });
}

ComparisonMatrix run_comparison(const ComparisonRequest& request) {
  struct Job {
    std::size_t cell;
    std::size_t slot;
    ScenarioConfig config;
  };

  ComparisonMatrix matrix;
  std::vector<Job> jobs;
  for (const auto& scenario : request.scenarios) {
    for (const auto broker : request.brokers) {
      for (const auto balancer : request.balancers) {
        ComparisonCell cell;
        cell.scenario = scenario.name;
        cell.balancer = balancer;
        cell.broker = broker;
        cell.reports.resize(request.seeds.size());
        for (std::size_t k = 0; k < request.seeds.size(); ++k) {
          ScenarioConfig config = scenario;
          config.balancer_policy = balancer;
          config.broker_policy = broker;
          config.seed = request.seeds[k];
          jobs.push_back({matrix.cells.size(), k, std::move(config)});
        }
        matrix.cells.push_back(std::move(cell));
      }
    }
  }

  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        // Each slot is written by exactly one job.
        matrix.cells[jobs[j].cell].reports[jobs[j].slot] = run(validate(jobs[j].config));
      } catch (const std::exception& e) {
        errors[j] = "seed " + std::to_string(jobs[j].config.seed) + ": " + e.what();
      }
    }
  };

  unsigned threads = request.threads ? request.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, jobs.size())));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (errors[j].empty()) continue;
    auto& cell = matrix.cells[jobs[j].cell];
    cell.failed = true;
    if (!cell.diagnostic.empty()) cell.diagnostic += "; ";
    cell.diagnostic += errors[j];
  }
  for (auto& cell : matrix.cells) {
    if (cell.failed) cell.reports.clear();
  }
  return matrix;
}

std::string comparison_csv(const ComparisonMatrix& matrix) {
  std::ostringstream out;
  out << "scenario,balancer,broker,seeds,status,avg_response_ms,avg_response_stdev,avg_processing_ms,"
         "avg_processing_stdev,total_cost,total_cost_stdev,diagnostic\n";
  for (const auto& c : matrix.cells) {
    out << c.scenario << "," << to_string(c.balancer) << "," << to_string(c.broker) << "," << c.reports.size()
        << "," << (c.failed ? "failed" : "ok") << ",";
    if (c.failed) {
      std::string diag = c.diagnostic;
      std::replace(diag.begin(), diag.end(), '"', '\'');
      out << ",,,,,,\"" << diag << "\"\n";
      continue;
    }
    const auto resp = c.avg_response();
    const auto proc = c.avg_processing();
    const auto cost = c.total_cost();
    out << format_exact(resp.mean) << "," << format_exact(resp.stdev) << "," << format_exact(proc.mean) << ","
        << format_exact(proc.stdev) << "," << format_exact(cost.mean) << "," << format_exact(cost.stdev) << ",\n";
  }
  return out.str();
}

std::string render_ranked_summary(const ComparisonMatrix& matrix) {
  std::vector<const ComparisonCell*> order;
  for (const auto& c : matrix.cells) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const ComparisonCell* a, const ComparisonCell* b) {
    if (a->failed != b->failed) return !a->failed;
    if (a->failed) return false;
    return a->avg_response().mean < b->avg_response().mean;
  });

  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-12s %-10s %-9s %6s %18s %18s %14s\n", "rank", "scenario", "balancer",
                "broker", "seeds", "avg response (ms)", "avg process (ms)", "total cost");
  out << line;
  int rank = 1;
  for (const auto* c : order) {
    if (c->failed) {
      std::snprintf(line, sizeof line, "%-4s %-12s %-10s %-9s FAILED: %s\n", "-", c->scenario.c_str(),
                    std::string(to_string(c->balancer)).c_str(), std::string(to_string(c->broker)).c_str(),
                    c->diagnostic.c_str());
      out << line;
      continue;
    }
    const auto resp = c->avg_response();
    const auto proc = c->avg_processing();
    const auto cost = c->total_cost();
    std::snprintf(line, sizeof line, "%-4d %-12s %-10s %-9s %6zu %9s ±%7s %9s ±%7s %14s\n", rank++,
                  c->scenario.c_str(), std::string(to_string(c->balancer)).c_str(),
                  std::string(to_string(c->broker)).c_str(), c->reports.size(), render_ms(resp.mean).c_str(),
                  render_ms(resp.stdev).c_str(), render_ms(proc.mean).c_str(), render_ms(proc.stdev).c_str(),
                  render_ms(cost.mean).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace nimbus
