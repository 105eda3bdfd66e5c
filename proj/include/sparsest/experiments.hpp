#pragma once

// Seeded Monte-Carlo drivers. Every trial derives its own stream from
// (master seed, experiment kind, grid coordinates, trial index), so results
// depend only on the configuration and never on the worker count or the
// order in which trials finish.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sparsest/recovery.hpp"

namespace sparsest::experiments {

enum class ExperimentKind : std::uint64_t { Phase = 1, Baseline = 2, Scaling = 3, Stability = 4 };

/// Default selectors: oracle, ℓ1/ℓ∞, ℓ1/ℓ2, thresholded-ℓ0 at ε = 0.01.
std::vector<recovery::SelectorSpec> default_selectors();

/// first, first+step, … ≤ last.
std::vector<std::size_t> make_grid(std::size_t first, std::size_t last, std::size_t step = 1);

/// Every even value up to `dense_limit`, then multiples of 5 up to `last`.
std::vector<std::size_t> transition_grid(std::size_t dense_limit, std::size_t last);

/// Lower median (element ⌊(m−1)/2⌋ of the sorted sample).
double lower_median(std::vector<double> values);

struct PhaseDiagramConfig {
  std::size_t n = 100;
  std::vector<std::size_t> k_grid;
  std::vector<std::size_t> s_grid;
  std::size_t trials = 50;
  double delta = 0.01;
  double tau = recovery::kSuccessTolerance;
  std::vector<recovery::SelectorSpec> selectors = default_selectors();
  std::uint64_t master_seed = 1;
  /// Check the necessary condition in every trial with exact oracle recovery.
  bool audit = false;
  std::size_t workers = 1;

  void validate() const;
};

struct PhaseDiagramResult {
  PhaseDiagramConfig config;
  /// Flat [selector][k][s] tables.
  std::vector<std::size_t> successes;
  std::vector<std::size_t> numerical_failures;
  std::size_t audit_exact = 0;       // trials with oracle output within 1e-6 of v/v(i*)
  std::size_t audit_violations = 0;  // of those, ‖v‖₁/‖v‖∞ > condition value + 1e-6

  std::size_t offset(std::size_t selector, std::size_t k_index, std::size_t s_index) const;
  std::size_t success_count(std::size_t selector, std::size_t k_index, std::size_t s_index) const;
  double probability(std::size_t selector, std::size_t k_index, std::size_t s_index) const;
};

inline constexpr double kExactRecoveryTolerance = 1e-6;

PhaseDiagramResult phase_diagram(const PhaseDiagramConfig& config);

enum class BaselineMode { FixedIndex, MinRatio };

struct BaselineCurveConfig {
  std::size_t n = 100;
  std::vector<std::size_t> k_grid;
  std::size_t trials = 50;
  BaselineMode mode = BaselineMode::FixedIndex;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;

  void validate() const;
};

/// Both modes see the same random bases for a given (seed, k, trial).
struct BaselineCurveResult {
  BaselineCurveConfig config;
  /// FixedIndex: median ‖z‖₁ of the program pinned at coordinate 0.
  /// MinRatio: median over trials of the least ℓ1/ℓ∞ score among all n outputs.
  std::vector<double> median_value;
  /// Median ℓ1/ℓ∞ score of the output behind each trial's value.
  std::vector<double> median_score;
  std::size_t numerical_failures = 0;
};

BaselineCurveResult baseline_curve(const BaselineCurveConfig& config);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

struct ScalingConfig {
  std::size_t n_fixed = 100;
  std::vector<std::size_t> k_grid{2, 3, 4, 5, 6};
  std::size_t k_fixed = 4;
  std::vector<std::size_t> n_grid{64, 128, 256};
  std::size_t trials = 50;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;

  void validate() const;
};

struct ScalingResult {
  ScalingConfig config;
  std::vector<double> median_by_k;  // at n_fixed
  std::vector<double> median_by_n;  // at k_fixed
  double slope_k = 0.0;
  double slope_n = 0.0;
  std::size_t numerical_failures = 0;
};

ScalingResult scaling_fit(const ScalingConfig& config);

struct StabilityConfig {
  std::size_t n = 100;
  std::size_t k = 4;
  std::size_t s = 4;
  std::vector<double> delta_grid{0.0, 1e-3, 1e-2, 1e-1};
  std::size_t trials = 20;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;

  void validate() const;
};

/// Trial t uses the same noise direction, random span and mixing for every δ.
struct StabilityResult {
  StabilityConfig config;
  std::vector<double> median_error;    // oracle-selected ‖z# − v/v(i*)‖₂
  std::vector<double> error_over_delta;  // NaN where δ = 0
  std::size_t numerical_failures = 0;
};

StabilityResult stability_sweep(const StabilityConfig& config);

}  // namespace sparsest::experiments
