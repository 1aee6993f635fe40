#include "nimbus/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nimbus/compare.hpp"
#include "nimbus/engine.hpp"
#include "nimbus/errors.hpp"
#include "nimbus/reporting.hpp"

namespace nimbus::cli {

namespace fs = std::filesystem;

ScenarioConfig load_scenario(std::string_view name_or_path) {
  if (auto builtin = find_builtin(name_or_path)) return *builtin;
  const fs::path path(name_or_path);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::string names;
    for (const auto& info : builtin_catalog()) names += (names.empty() ? "" : ", ") + info.name;
    throw ScenarioError("scenario", "'" + std::string(name_or_path) + "' is neither a built-in (" + names +
                                        ") nor a readable file");
  }
  std::ostringstream text;
  text << in.rdbuf();
  ScenarioConfig config = parse_scenario(text.str());
  if (config.name.empty()) config.name = path.stem().string();
  return config;
}

std::optional<std::vector<std::uint64_t>> parse_seed_range(std::string_view text) {
  auto number = [](std::string_view s) -> std::optional<std::uint64_t> {
    if (s.empty()) return std::nullopt;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    auto single = number(text);
    if (!single) return std::nullopt;
    return std::vector<std::uint64_t>{*single};
  }
  const auto lo = number(text.substr(0, dots));
  const auto hi = number(text.substr(dots + 2));
  if (!lo || !hi || *lo > *hi || *hi - *lo > 100000) return std::nullopt;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = *lo; s <= *hi; ++s) seeds.push_back(s);
  return seeds;
}

fs::path output_root(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("NIMBUS_OUT"); env && *env) return env;
  return "nimbus_out";
}

namespace {

struct Options {
  std::vector<std::string> scenarios;
  std::vector<std::string> balancers;
  std::string broker;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out;
  unsigned replications = 1;
  unsigned threads = 0;
  bool accrue = false;
};

void apply_overrides(ScenarioConfig& config, const Options& o) {
  if (!o.balancers.empty()) config.balancer_policy = *parse_balancer_policy(o.balancers.front());
  if (!o.broker.empty()) config.broker_policy = *parse_broker_policy(o.broker);
  if (o.seed) config.seed = *o.seed;
  if (o.accrue) config.accrue_memory_storage_costs = true;
}

int cmd_scenarios(std::ostream& out) {
  for (const auto& info : builtin_catalog()) out << info.name << "\t" << info.description << "\n";
  return kOk;
}

int cmd_run(const Options& o, std::ostream& out) {
  ScenarioConfig config = load_scenario(o.scenarios.front());
  apply_overrides(config, o);
  const fs::path root = output_root(o.out);
  const std::uint64_t first_seed = config.seed;
  for (unsigned k = 0; k < o.replications; ++k) {
    config.seed = first_seed + k;
    const SimulationReport report = run(validate(config));
    const fs::path dir = root / run_directory_name(report);
    write_run_outputs(report, dir);
    out << render_tables(report);
    out << "\nwrote " << dir.string() << " (" << render_ms(report.meta.wall_time_ms) << " ms wall)\n";
  }
  return kOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.scenarios.empty()) {
    err << "compare: at least one --scenario is required\n";
    return kUsage;
  }
  ComparisonRequest request;
  for (const auto& name : o.scenarios) {
    ScenarioConfig config = load_scenario(name);
    if (o.accrue) config.accrue_memory_storage_costs = true;
    (void)validate(config);
    request.scenarios.push_back(std::move(config));
  }
  if (!o.balancers.empty()) {
    request.balancers.clear();
    for (const auto& b : o.balancers) request.balancers.push_back(*parse_balancer_policy(b));
  }
  if (!o.broker.empty()) request.brokers = {*parse_broker_policy(o.broker)};
  if (!o.seeds.empty()) {
    auto seeds = parse_seed_range(o.seeds);
    if (!seeds) {
      err << "compare: --seeds expects N..M with N <= M\n";
      return kUsage;
    }
    request.seeds = *seeds;
  } else if (o.seed) {
    request.seeds = {*o.seed};
  }
  request.threads = o.threads;

  const ComparisonMatrix matrix = run_comparison(request);
  const fs::path root = output_root(o.out);
  fs::create_directories(root);
  for (const auto& cell : matrix.cells) {
    for (const auto& report : cell.reports) write_run_outputs(report, root / run_directory_name(report));
  }
  write_text_file(root / "comparison.csv", comparison_csv(matrix));
  out << render_ranked_summary(matrix);
  out << "\nwrote " << (root / "comparison.csv").string() << "\n";
  if (matrix.any_failed()) {
    err << "compare: one or more cells failed\n";
    return kInternal;
  }
  return kOk;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geo-distributed cloud workload simulator", "nimbus"};
  app.require_subcommand(1);
  Options o;

  const auto balancer_check = CLI::IsMember({"rr", "esce", "throttled"});
  const auto broker_check = CLI::IsMember({"closest", "optimize"});

  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write its report");
  run_cmd->add_option("--scenario", o.scenarios, "Built-in name or JSON file")->required()->expected(1);
  run_cmd->add_option("--balancer", o.balancers, "rr | esce | throttled")->check(balancer_check)->expected(1);
  run_cmd->add_option("--broker", o.broker, "closest | optimize")->check(broker_check);
  run_cmd->add_option("--seed", o.seed, "Random seed (overrides the scenario)");
  run_cmd->add_option("--replications", o.replications, "Consecutive seeds to run")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", o.out, "Output root (default $NIMBUS_OUT or ./nimbus_out)");
  run_cmd->add_flag("--accrue-memory-storage-costs", o.accrue, "Charge memory and storage rates");

  auto* cmp_cmd = app.add_subcommand("compare", "Run the balancer x scenario matrix");
  cmp_cmd->add_option("--scenario", o.scenarios, "Built-in name or JSON file (repeatable)");
  cmp_cmd->add_option("--balancer", o.balancers, "Restrict to these balancers (repeatable)")->check(balancer_check);
  cmp_cmd->add_option("--broker", o.broker, "closest | optimize (default closest)")->check(broker_check);
  cmp_cmd->add_option("--seed", o.seed, "Single seed");
  cmp_cmd->add_option("--seeds", o.seeds, "Inclusive seed range N..M");
  cmp_cmd->add_option("--threads", o.threads, "Parallel runs (default: hardware threads)");
  cmp_cmd->add_option("--out", o.out, "Output root (default $NIMBUS_OUT or ./nimbus_out)");
  cmp_cmd->add_flag("--accrue-memory-storage-costs", o.accrue, "Charge memory and storage rates");

  auto* list_cmd = app.add_subcommand("scenarios", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kUsage;
  }

  try {
    if (list_cmd->parsed()) return cmd_scenarios(out);
    if (run_cmd->parsed()) return cmd_run(o, out);
    if (cmp_cmd->parsed()) return cmd_compare(o, out, err);
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvariantError& e) {
    err << "internal invariant violated: " << e.what() << "\n";
    return kInternal;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace nimbus::cli
