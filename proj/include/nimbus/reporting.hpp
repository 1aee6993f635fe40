#pragma once

#include <filesystem>
#include <string>

#include "nimbus/metrics.hpp"

namespace nimbus {

/// `<scenario>__<balancer>__<broker>__seed<k>`
std::string run_directory_name(const SimulationReport& report);

/// Writes report.json and every CSV table of a run into dir (created if
/// missing). Throws std::runtime_error naming the path on I/O failure.
void write_run_outputs(const SimulationReport& report, const std::filesystem::path& dir);

/// Hourly series for plotting:
///   hourly_ub.csv  user_base,hour,requests,avg_ms,min_ms,max_ms
///   hourly_dc.csv  data_center,hour,requests,avg_ms,min_ms,max_ms
/// 24 rows per series; header only when the report recorded no requests.
void emit_plot_data(const SimulationReport& report, const std::filesystem::path& dir);

/// Full-precision CSV bodies (all numbers round-trip exactly).
std::string response_times_csv(const SimulationReport& report);
std::string per_ub_csv(const SimulationReport& report);
std::string per_dc_csv(const SimulationReport& report);
std::string hourly_ub_csv(const SimulationReport& report);
std::string hourly_dc_csv(const SimulationReport& report);
std::string costs_csv(const SimulationReport& report);

/// Human-readable summary: overall table, per-UB table, per-DC processing
/// table and cost table, two decimals throughout.
std::string render_tables(const SimulationReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace nimbus
