#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nimbus/compare.hpp"
#include "nimbus/engine.hpp"
#include "nimbus/errors.hpp"
#include "nimbus/reporting.hpp"
#include "nimbus/scenario.hpp"

namespace py = pybind11;
using namespace nimbus;

namespace {

py::object loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

BalancerPolicy balancer_from(const std::string& name) {
  if (auto p = parse_balancer_policy(name)) return *p;
  throw py::value_error("unknown balancer '" + name + "'; expected one of: rr, esce, throttled");
}

BrokerPolicy broker_from(const std::string& name) {
  if (auto p = parse_broker_policy(name)) return *p;
  throw py::value_error("unknown broker '" + name + "'; expected one of: closest, optimize");
}

ScenarioConfig with_overrides(const std::string& scenario_json, const std::optional<std::string>& balancer,
                              const std::optional<std::string>& broker, std::optional<std::uint64_t> seed) {
  ScenarioConfig c = parse_scenario(scenario_json);
  if (balancer) c.balancer_policy = balancer_from(*balancer);
  if (broker) c.broker_policy = broker_from(*broker);
  if (seed) c.seed = *seed;
  return c;
}

std::string run_json(const std::string& scenario_json, const std::optional<std::string>& balancer,
                     const std::optional<std::string>& broker, std::optional<std::uint64_t> seed) {
  const ValidatedScenario v = validate(with_overrides(scenario_json, balancer, broker, seed));
  SimulationReport report;
  {
    py::gil_scoped_release release;
    report = run(v);
  }
  return report_to_json(report);
}

py::dict summary(const SampleSummary& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["stdev"] = s.stdev;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the nimbus cloud-deployment simulator.";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  m.def(
      "builtin_names",
      [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& info : builtin_catalog()) out.emplace_back(info.name, info.description);
        return out;
      },
      "(name, description) for every built-in scenario.");

  m.def(
      "builtin_scenario",
      [](const std::string& name) {
        auto c = find_builtin(name);
        if (!c) throw py::key_error("unknown scenario '" + name + "'");
        return serialize_scenario(*c);
      },
      py::arg("name"), "Scenario document of a built-in, as JSON text.");

  m.def(
      "validate_scenario",
      [](const std::string& text) {
        std::vector<std::pair<std::string, std::string>> out;
        try {
          for (const auto& issue : check_scenario(parse_scenario(text))) out.emplace_back(issue.path, issue.message);
        } catch (const ScenarioError& e) {
          for (const auto& issue : e.issues()) out.emplace_back(issue.path, issue.message);
        }
        return out;
      },
      py::arg("scenario_json"), "List of (path, message) issues; empty when the scenario is valid.");

  m.def(
      "normalize_scenario", [](const std::string& text) { return serialize_scenario(parse_scenario(text)); },
      py::arg("scenario_json"), "Parse and re-serialize a scenario with every default filled in.");

  m.def("run_json", &run_json, py::arg("scenario_json"), py::arg("balancer") = py::none(),
        py::arg("broker") = py::none(), py::arg("seed") = py::none(), "Run one scenario; canonical report JSON.");

  m.def(
      "run",
      [](const std::string& scenario_json, const std::optional<std::string>& balancer,
         const std::optional<std::string>& broker, std::optional<std::uint64_t> seed) {
        return loads(run_json(scenario_json, balancer, broker, seed));
      },
      py::arg("scenario_json"), py::arg("balancer") = py::none(), py::arg("broker") = py::none(),
      py::arg("seed") = py::none(), "Run one scenario; report as a dict.");

  m.def(
      "render_tables", [](const std::string& report_json) { return render_tables(report_from_json(report_json)); },
      py::arg("report_json"), "Text tables for a report.");

  m.def(
      "write_outputs",
      [](const std::string& report_json, const std::string& dir) {
        write_run_outputs(report_from_json(report_json), std::filesystem::path(dir));
      },
      py::arg("report_json"), py::arg("directory"), "Write report.json and the CSV files into a directory.");

  m.def(
      "compare",
      [](const std::vector<std::string>& scenarios, const std::vector<std::string>& balancers,
         const std::vector<std::string>& brokers, const std::vector<std::uint64_t>& seeds, unsigned threads) {
        ComparisonRequest req;
        for (const auto& s : scenarios) req.scenarios.push_back(parse_scenario(s));
        req.balancers.clear();
        for (const auto& b : balancers) req.balancers.push_back(balancer_from(b));
        req.brokers.clear();
        for (const auto& b : brokers) req.brokers.push_back(broker_from(b));
        req.seeds = seeds;
        req.threads = threads;
        ComparisonMatrix matrix;
        {
          py::gil_scoped_release release;
          matrix = run_comparison(req);
        }
        py::list cells;
        for (const auto& cell : matrix.cells) {
          py::dict d;
          d["scenario"] = cell.scenario;
          d["balancer"] = std::string(to_string(cell.balancer));
          d["broker"] = std::string(to_string(cell.broker));
          d["failed"] = cell.failed;
          d["diagnostic"] = cell.diagnostic;
          if (!cell.failed) {
            d["avg_response_ms"] = summary(cell.avg_response());
            d["avg_processing_ms"] = summary(cell.avg_processing());
            d["total_cost"] = summary(cell.total_cost());
          }
          py::list reports;
          for (const auto& r : cell.reports) reports.append(loads(report_to_json(r)));
          d["reports"] = reports;
          cells.append(d);
        }
        return cells;
      },
      py::arg("scenarios"), py::arg("balancers") = std::vector<std::string>{"rr", "esce", "throttled"},
      py::arg("brokers") = std::vector<std::string>{"closest"}, py::arg("seeds") = std::vector<std::uint64_t>{0},
      py::arg("threads") = 0u, "Run every scenario x balancer x broker x seed combination.");
}
