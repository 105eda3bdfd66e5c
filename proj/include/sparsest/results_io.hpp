#pragma once

// Result directories. Each run writes
//   manifest.json      kind, every config field, master seed, code version,
//                      timestamp, and tallies that have no CSV column
//   <table>.csv        one file per result table, numbers at 17 significant digits
//   heatmap_<sel>.pgm  phase diagrams only
// into a staging directory that is renamed into place once complete.
//
// Tables:
//   phase      phase.csv      selector,k,s,trials,successes,probability,failures_numerical
//   baseline   curve.csv      k,trials,median_value
//   scaling    curve_k.csv    k,trials,median_value
//              curve_n.csv    n,trials,median_value
//   stability  stability.csv  delta,trials,median_error,ratio
//
// Heatmaps are plain PGM (P2), one per selector: row r is the r-th k of the
// grid (ascending), column c the c-th s, gray level round(255 · probability).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "sparsest/experiments.hpp"

namespace sparsest::experiments {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "sparsest 1.0.0";

using AnyResult = std::variant<PhaseDiagramResult, BaselineCurveResult, ScalingResult, StabilityResult>;

struct RunManifest {
  int schema_version = kSchemaVersion;
  std::string kind;  // phase, baseline, scaling, stability
  nlohmann::json parameters;
  std::uint64_t master_seed = 0;
  std::string code_version = kCodeVersion;
  std::string timestamp;  // UTC, ISO 8601; the only field a replay does not reproduce
  nlohmann::json tallies;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::string_view baseline_mode_name(BaselineMode mode);
BaselineMode parse_baseline_mode(std::string_view name);

/// Manifest for `result`, stamped with the current time.
RunManifest make_manifest(const AnyResult& result);

/// The config recorded in a manifest, as one of the four config types.
using AnyConfig = std::variant<PhaseDiagramConfig, BaselineCurveConfig, ScalingConfig, StabilityConfig>;
AnyConfig config_from_manifest(const RunManifest& manifest);

/// Re-runs the experiment a manifest describes.
AnyResult run(const AnyConfig& config);

/// %.17g, with nan and inf spelled that way.
std::string format_number(double x);

/// Creates the parent of `dir` if needed and checks that a sibling staging
/// directory can be created there. Throws IoError naming the path.
void ensure_writable(const std::filesystem::path& dir);

/// Writes into a staging sibling of `dir`, then renames it over `dir`.
void write_results(const AnyResult& result, const RunManifest& manifest, const std::filesystem::path& dir);

struct LoadedRun {
  RunManifest manifest;
  AnyResult result;
};

/// Throws IoError for missing files and ParseError for malformed content;
/// a wrong CSV header names the first offending column.
LoadedRun read_results(const std::filesystem::path& dir);

}  // namespace sparsest::experiments
