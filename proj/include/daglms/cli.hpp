#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace daglms::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kInternalError = 1, kConfigError = 2, kDivergence = 3 };

/// Entry point behind the `daglms` executable.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Written next to every output set. Re-running `daglms run` on a manifest
/// regenerates the same CSV files byte for byte.
struct RunManifest {
    std::string command;               ///< run, sweep, transient, design
    nlohmann::json config;             ///< full config snapshot, seed and overrides applied
    std::string tool_version = kToolVersion;
    std::uint64_t rng_seed = 0;
    std::vector<std::uint64_t> run_seeds; ///< derived per-run seeds
    std::vector<std::string> outputs;     ///< file names relative to the manifest
    double wall_clock_seconds = 0.0;
};

nlohmann::json manifest_to_json(const RunManifest& m);
/// Throws ConfigError when required keys are missing.
RunManifest manifest_from_json(const nlohmann::json& j);
bool looks_like_manifest(const nlohmann::json& j);

/// Output root: explicit flag, else $DAGLMS_OUT_DIR, else "daglms_out".
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal line chart in a fixed 800x500 viewport. Non-finite points break the line.
std::string render_svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                                  const std::vector<PlotSeries>& series);

} // namespace daglms::cli
