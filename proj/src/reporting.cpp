#include "nimbus/reporting.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nimbus {

namespace fs = std::filesystem;

namespace {

// Empty-stat cells are left blank in CSV.
std::string cell(double value) { return std::isfinite(value) ? format_exact(value) : ""; }

std::string stat_cells(const StatAccumulator& s) {
  if (s.empty()) return "0,,,";
  return std::to_string(s.count()) + "," + cell(s.mean_ms()) + "," + cell(s.min_ms()) + "," + cell(s.max_ms());
}

std::string hourly_csv(const std::vector<NamedStats>& series, const char* key, bool empty_report) {
  std::ostringstream out;
  out << key << ",hour,requests,avg_ms,min_ms,max_ms\n";
  if (empty_report) return out.str();
  for (const auto& s : series) {
    for (int hour = 0; hour < kHoursPerDay; ++hour) {
      out << s.name << "," << hour << "," << stat_cells(s.hourly.bucket(hour)) << "\n";
    }
  }
  return out.str();
}

std::string pad(const std::string& text, std::size_t width) {
  // "—" is three bytes but one column.
  std::size_t columns = 0;
  for (unsigned char ch : text) columns += (ch & 0xC0) != 0x80;
  return columns >= width ? text : std::string(width - columns, ' ') + text;
}

std::string left(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

std::string render_cost(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  return buf;
}

}  // namespace

std::string run_directory_name(const SimulationReport& r) {
  return r.meta.scenario + "__" + r.meta.balancer + "__" + r.meta.broker + "__seed" + std::to_string(r.meta.seed);
}

std::string response_times_csv(const SimulationReport& r) {
  std::ostringstream out;
  out << "metric,requests,avg_ms,min_ms,max_ms\n";
  out << "overall_response," << stat_cells(r.overall_response) << "\n";
  out << "data_center_processing," << stat_cells(r.overall_processing) << "\n";
  return out.str();
}

std::string per_ub_csv(const SimulationReport& r) {
  std::ostringstream out;
  out << "user_base,requests_generated,requests,avg_ms,min_ms,max_ms\n";
  for (std::size_t i = 0; i < r.user_bases.size(); ++i) {
    const auto generated = i < r.requests_generated_per_ub.size() ? r.requests_generated_per_ub[i] : 0;
    out << r.user_bases[i].name << "," << generated << "," << stat_cells(r.user_bases[i].stats) << "\n";
  }
  return out.str();
}

std::string per_dc_csv(const SimulationReport& r) {
  std::ostringstream out;
  out << "data_center,requests,avg_ms,min_ms,max_ms\n";
  for (const auto& dc : r.data_centers) out << dc.name << "," << stat_cells(dc.stats) << "\n";
  return out.str();
}

std::string hourly_ub_csv(const SimulationReport& r) {
  return hourly_csv(r.user_bases, "user_base", r.overall_response.empty());
}

std::string hourly_dc_csv(const SimulationReport& r) {
  return hourly_csv(r.data_centers, "data_center", r.overall_processing.empty());
}

std::string costs_csv(const SimulationReport& r) {
  std::ostringstream out;
  out << "data_center,vm_cost,data_transfer_cost,memory_cost,storage_cost,total\n";
  for (const auto& c : r.costs.per_dc) {
    out << c.data_center << "," << format_exact(c.vm_cost) << "," << format_exact(c.data_transfer_cost) << ","
        << format_exact(c.memory_cost) << "," << format_exact(c.storage_cost) << "," << format_exact(c.total())
        << "\n";
  }
  return out.str();
}

std::string render_tables(const SimulationReport& r) {
  std::ostringstream out;
  out << "Scenario " << r.meta.scenario << "  balancer=" << r.meta.balancer << "  broker=" << r.meta.broker
      << "  seed=" << r.meta.seed << "\n\n";

  out << "Overall Response Time Summary\n";
  out << left("", 30) << pad("Average (ms)", 14) << pad("Minimum (ms)", 14) << pad("Maximum (ms)", 14) << "\n";
  auto summary_row = [&](const char* label, const StatAccumulator& s) {
    out << left(label, 30) << pad(render_mean(s), 14) << pad(render_min(s), 14) << pad(render_max(s), 14) << "\n";
  };
  summary_row("Overall Response Time:", r.overall_response);
  summary_row("Data Center Processing Time:", r.overall_processing);

  out << "\nResponse Time by Region\n";
  out << left("Userbase", 12) << pad("Avg (ms)", 12) << pad("Min (ms)", 12) << pad("Max (ms)", 12) << "\n";
  for (const auto& ub : r.user_bases) {
    out << left(ub.name, 12) << pad(render_mean(ub.stats), 12) << pad(render_min(ub.stats), 12)
        << pad(render_max(ub.stats), 12) << "\n";
  }

  out << "\nData Center Request Servicing Times\n";
  out << left("Data Center", 12) << pad("Avg (ms)", 12) << pad("Min (ms)", 12) << pad("Max (ms)", 12) << "\n";
  for (const auto& dc : r.data_centers) {
    out << left(dc.name, 12) << pad(render_mean(dc.stats), 12) << pad(render_min(dc.stats), 12)
        << pad(render_max(dc.stats), 12) << "\n";
  }

  out << "\nCost\n";
  out << left("Data Center", 12) << pad("VM Cost", 12) << pad("Data Transfer Cost", 20) << pad("Total", 12) << "\n";
  for (const auto& c : r.costs.per_dc) {
    out << left(c.data_center, 12) << pad(render_cost(c.vm_cost), 12) << pad(render_cost(c.data_transfer_cost), 20)
        << pad(render_cost(c.total()), 12) << "\n";
  }
  out << left("Total", 12) << pad(render_cost(r.costs.total_vm_cost()), 12)
      << pad(render_cost(r.costs.total_data_transfer_cost()), 20) << pad(render_cost(r.costs.total()), 12) << "\n";
  return out.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void emit_plot_data(const SimulationReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_text_file(dir / "hourly_ub.csv", hourly_ub_csv(r));
  write_text_file(dir / "hourly_dc.csv", hourly_dc_csv(r));
}

void write_run_outputs(const SimulationReport& r, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_text_file(dir / "report.json", report_to_json(r));
  write_text_file(dir / "response_times.csv", response_times_csv(r));
  write_text_file(dir / "per_ub.csv", per_ub_csv(r));
  write_text_file(dir / "per_dc.csv", per_dc_csv(r));
  write_text_file(dir / "costs.csv", costs_csv(r));
  emit_plot_data(r, dir);
}

}  // namespace nimbus
