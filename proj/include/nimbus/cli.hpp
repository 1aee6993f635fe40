#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nimbus/scenario.hpp"

namespace nimbus::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInternal = 2 };

/// Resolves a built-in name or a path to a JSON scenario file.
/// Throws ScenarioError when neither applies or the document is invalid.
ScenarioConfig load_scenario(std::string_view name_or_path);

/// Parses "N..M" (inclusive) or a single "N".
std::optional<std::vector<std::uint64_t>> parse_seed_range(std::string_view text);

/// Output root: --out, else $NIMBUS_OUT, else ./nimbus_out.
std::filesystem::path output_root(const std::string& flag_value);

/// Entry point for `nimbus run|compare|scenarios`. Returns the process exit
/// status; never calls exit().
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nimbus::cli
