#include "sparsest/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sparsest/errors.hpp"
#include "sparsest/parallel.hpp"

namespace sparsest::experiments {

using numerics::Matrix;
using numerics::NormKind;
using numerics::Vector;
using recovery::SelectorKind;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t key(ExperimentKind kind) { return static_cast<std::uint64_t>(kind); }

double linf_score(const Vector& z) {
  return numerics::norm(z, NormKind::L1) / numerics::norm(z, NormKind::Linf);
}

void require_grid(const std::vector<std::size_t>& grid, std::size_t lo, std::size_t hi, const std::string& what) {
  require(!grid.empty(), what + ": grid must not be empty");
  for (std::size_t x : grid) {
    require(x >= lo && x <= hi, what + ": value " + std::to_string(x) + " outside " + std::to_string(lo) + ".." +
                                    std::to_string(hi));
  }
}

std::size_t distinct_count(std::vector<std::size_t> grid) {
  std::sort(grid.begin(), grid.end());
  return static_cast<std::size_t>(std::unique(grid.begin(), grid.end()) - grid.begin());
}

struct PhaseTrial {
  std::vector<char> success;
  std::vector<char> numerical;
  bool exact = false;
  bool violation = false;
};

PhaseTrial phase_trial(const PhaseDiagramConfig& config, std::size_t k, std::size_t s, std::size_t trial) {
  const std::size_t m = config.selectors.size();
  PhaseTrial out;
  out.success.assign(m, 0);
  out.numerical.assign(m, 0);

  const rng::Stream base = rng::Stream(config.master_seed).derive({key(ExperimentKind::Phase), k, s, trial});
  rng::Stream vector_stream = base.derive({0});
  rng::Stream span_stream = base.derive({1});

  models::PlantedInstance inst;
  std::vector<recovery::CandidateSolution> candidates;
  try {
    const Vector v = models::make_test_vector(models::TestVectorSpec::leading(config.n, s, config.delta), vector_stream);
    inst = models::planted_random(config.n, k, v, span_stream, true, s);
    candidates = recovery::recover_all(inst.w, 1);
  } catch (const NumericalFailure&) {
    out.numerical.assign(m, 1);
    return out;
  }

  const bool any_failed = std::any_of(candidates.begin(), candidates.end(), [](const auto& c) {
    return c.solution.status == lp::SolveStatus::NumericalFailure;
  });
  for (std::size_t j = 0; j < m; ++j) {
    const auto& selector = config.selectors[j];
    if (selector.kind == SelectorKind::Oracle) {
      out.numerical[j] = candidates[inst.i_star].solution.status == lp::SolveStatus::NumericalFailure;
    } else {
      out.numerical[j] = any_failed;
    }
    try {
      out.success[j] = recovery::run_selector(candidates, selector, inst.v, config.tau).success;
    } catch (const SelectionFailure&) {
      out.success[j] = 0;
    }
  }

  if (config.audit && candidates[inst.i_star].optimal()) {
    const double error = recovery::evaluate_success(candidates[inst.i_star].solution.z, inst.v).error;
    if (error <= kExactRecoveryTolerance) {
      out.exact = true;
      const double ratio = linf_score(inst.v);
      try {
        out.violation = ratio > recovery::necessary_condition_value(inst.vtilde, inst.i_star) + 1e-6;
      } catch (const NumericalFailure&) {
        // Unverifiable; counted against the audit rather than silently passed.
        out.violation = true;
      }
    }
  }
  return out;
}

struct CurvePoint {
  double value = kInf;
  double score = kInf;
  bool failed = false;
};

CurvePoint fixed_index_point(const Matrix& basis) {
  CurvePoint point;
  const auto solution = lp::solve_l1_program(basis, 0);
  if (solution.status != lp::SolveStatus::Optimal) {
    point.failed = true;
    return point;
  }
  point.value = solution.objective;
  point.score = linf_score(solution.z);
  return point;
}

CurvePoint min_ratio_point(const Matrix& basis) {
  CurvePoint point;
  for (const auto& c : recovery::recover_all(basis, 1)) {
    if (!c.optimal()) {
      point.failed = point.failed || c.solution.status == lp::SolveStatus::NumericalFailure;
      continue;
    }
    point.score = std::min(point.score, linf_score(c.solution.z));
  }
  point.value = point.score;
  return point;
}

}  // namespace

std::vector<recovery::SelectorSpec> default_selectors() {
  return {recovery::SelectorSpec::oracle(), recovery::SelectorSpec::l1_over_linf(),
          recovery::SelectorSpec::l1_over_l2(), recovery::SelectorSpec::thresholded_l0(0.01)};
}

std::vector<std::size_t> make_grid(std::size_t first, std::size_t last, std::size_t step) {
  require(step >= 1, "make_grid: step must be positive");
  require(first <= last, "make_grid: first must not exceed last");
  std::vector<std::size_t> grid;
  for (std::size_t x = first; x <= last; x += step) grid.push_back(x);
  return grid;
}

std::vector<std::size_t> transition_grid(std::size_t dense_limit, std::size_t last) {
  std::vector<std::size_t> grid;
  for (std::size_t x = 2; x <= std::min(dense_limit, last); x += 2) grid.push_back(x);
  const std::size_t start = (dense_limit / 5 + 1) * 5;
  for (std::size_t x = start; x <= last; x += 5) grid.push_back(x);
  return grid;
}

double lower_median(std::vector<double> values) {
  require(!values.empty(), "lower_median: empty sample");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

void PhaseDiagramConfig::validate() const {
  require(n >= 2, "n: must be at least 2");
  require_grid(k_grid, 1, n - 1, "k");
  require_grid(s_grid, 1, n, "s");
  require(trials >= 1, "trials: must be at least 1");
  require(delta >= 0.0 && std::isfinite(delta), "delta: must be finite and >= 0");
  require(tau > 0.0 && std::isfinite(tau), "tau: must be positive");
  require(!selectors.empty(), "selectors: at least one selector is required");
  for (std::size_t a = 0; a < selectors.size(); ++a)
    for (std::size_t b = a + 1; b < selectors.size(); ++b)
      require(selectors[a].kind != selectors[b].kind, "selectors: each selector kind may appear only once");
  require(workers >= 1, "workers: must be at least 1");
}

std::size_t PhaseDiagramResult::offset(std::size_t selector, std::size_t k_index, std::size_t s_index) const {
  const std::size_t nk = config.k_grid.size();
  const std::size_t ns = config.s_grid.size();
  require(selector < config.selectors.size() && k_index < nk && s_index < ns, "phase result: index out of range");
  return (selector * nk + k_index) * ns + s_index;
}

std::size_t PhaseDiagramResult::success_count(std::size_t selector, std::size_t k_index, std::size_t s_index) const {
  return successes[offset(selector, k_index, s_index)];
}

double PhaseDiagramResult::probability(std::size_t selector, std::size_t k_index, std::size_t s_index) const {
  return static_cast<double>(success_count(selector, k_index, s_index)) / static_cast<double>(config.trials);
}

PhaseDiagramResult phase_diagram(const PhaseDiagramConfig& config) {
  config.validate();
  const std::size_t nk = config.k_grid.size();
  const std::size_t ns = config.s_grid.size();
  const std::size_t total = nk * ns * config.trials;

  std::vector<PhaseTrial> trials(total);
  parallel_for(total, config.workers, [&](std::size_t task) {
    const std::size_t t = task % config.trials;
    const std::size_t cell = task / config.trials;
    trials[task] = phase_trial(config, config.k_grid[cell / ns], config.s_grid[cell % ns], t);
  });

  PhaseDiagramResult result;
  result.config = config;
  const std::size_t m = config.selectors.size();
  result.successes.assign(m * nk * ns, 0);
  result.numerical_failures.assign(m * nk * ns, 0);
  for (std::size_t task = 0; task < total; ++task) {
    const std::size_t cell = task / config.trials;
    const PhaseTrial& tr = trials[task];
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t at = result.offset(j, cell / ns, cell % ns);
      result.successes[at] += tr.success[j] ? 1 : 0;
      result.numerical_failures[at] += tr.numerical[j] ? 1 : 0;
    }
    result.audit_exact += tr.exact ? 1 : 0;
    result.audit_violations += tr.violation ? 1 : 0;
  }
  return result;
}

void BaselineCurveConfig::validate() const {
  require(n >= 1, "n: must be positive");
  require_grid(k_grid, 1, n, "k");
  require(trials >= 1, "trials: must be at least 1");
  require(workers >= 1, "workers: must be at least 1");
}

BaselineCurveResult baseline_curve(const BaselineCurveConfig& config) {
  config.validate();
  const std::size_t total = config.k_grid.size() * config.trials;
  std::vector<CurvePoint> points(total);
  parallel_for(total, config.workers, [&](std::size_t task) {
    const std::size_t k = config.k_grid[task / config.trials];
    // The mode is deliberately left out of the key so both modes see the same bases.
    rng::Stream stream =
        rng::Stream(config.master_seed).derive({key(ExperimentKind::Baseline), k, task % config.trials});
    const Matrix basis = models::pure_random_basis(config.n, k, stream);
    points[task] = config.mode == BaselineMode::FixedIndex ? fixed_index_point(basis) : min_ratio_point(basis);
  });

  BaselineCurveResult result;
  result.config = config;
  for (std::size_t ki = 0; ki < config.k_grid.size(); ++ki) {
    std::vector<double> values;
    std::vector<double> scores;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const CurvePoint& p = points[ki * config.trials + t];
      values.push_back(p.value);
      scores.push_back(p.score);
      result.numerical_failures += p.failed ? 1 : 0;
    }
    result.median_value.push_back(lower_median(std::move(values)));
    result.median_score.push_back(lower_median(std::move(scores)));
  }
  return result;
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  require(xs.size() == ys.size(), "loglog_slope: xs and ys differ in length");
  require(xs.size() >= 2, "loglog_slope: need at least two points");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(xs[i] > 0.0 && ys[i] > 0.0 && std::isfinite(xs[i]) && std::isfinite(ys[i]),
            "loglog_slope: values must be positive and finite");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  require(sxx > 0.0, "loglog_slope: xs must not all be equal");
  return sxy / sxx;
}

void ScalingConfig::validate() const {
  require(distinct_count(k_grid) >= 3, "k: the k axis needs at least 3 distinct grid points");
  require(distinct_count(n_grid) >= 3, "n: the n axis needs at least 3 distinct grid points");
  for (std::size_t k : k_grid) {
    require(k >= 1 && 16 * k <= n_fixed,
            "k: value " + std::to_string(k) + " violates 1 <= k <= n/16 at n = " + std::to_string(n_fixed));
  }
  require(k_fixed >= 1, "k: fixed k must be positive");
  for (std::size_t n : n_grid) {
    require(16 * k_fixed <= n,
            "n: value " + std::to_string(n) + " violates k <= n/16 at k = " + std::to_string(k_fixed));
  }
  require(trials >= 1, "trials: must be at least 1");
  require(workers >= 1, "workers: must be at least 1");
}

ScalingResult scaling_fit(const ScalingConfig& config) {
  config.validate();
  struct Point {
    std::size_t n, k;
  };
  std::vector<Point> grid;
  for (std::size_t k : config.k_grid) grid.push_back({config.n_fixed, k});
  for (std::size_t n : config.n_grid) grid.push_back({n, config.k_fixed});

  const std::size_t total = grid.size() * config.trials;
  std::vector<CurvePoint> points(total);
  parallel_for(total, config.workers, [&](std::size_t task) {
    const Point p = grid[task / config.trials];
    rng::Stream stream =
        rng::Stream(config.master_seed).derive({key(ExperimentKind::Scaling), p.n, p.k, task % config.trials});
    points[task] = fixed_index_point(models::pure_random_basis(p.n, p.k, stream));
  });

  ScalingResult result;
  result.config = config;
  std::vector<double> medians;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> values;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const CurvePoint& p = points[g * config.trials + t];
      values.push_back(p.value);
      result.numerical_failures += p.failed ? 1 : 0;
    }
    medians.push_back(lower_median(std::move(values)));
  }
  const auto nk = static_cast<std::ptrdiff_t>(config.k_grid.size());
  result.median_by_k.assign(medians.begin(), medians.begin() + nk);
  result.median_by_n.assign(medians.begin() + nk, medians.end());

  std::vector<double> ks(config.k_grid.begin(), config.k_grid.end());
  std::vector<double> ns(config.n_grid.begin(), config.n_grid.end());
  result.slope_k = loglog_slope(ks, result.median_by_k);
  result.slope_n = loglog_slope(ns, result.median_by_n);
  return result;
}

void StabilityConfig::validate() const {
  require(n >= 2, "n: must be at least 2");
  require(k >= 1 && k <= n - 1, "k: must lie in 1..n-1");
  require(s >= 1 && s <= n, "s: must lie in 1..n");
  require(!delta_grid.empty(), "delta: grid must not be empty");
  for (double d : delta_grid) require(d >= 0.0 && std::isfinite(d), "delta: values must be finite and >= 0");
  require(trials >= 1, "trials: must be at least 1");
  require(workers >= 1, "workers: must be at least 1");
}

StabilityResult stability_sweep(const StabilityConfig& config) {
  config.validate();
  const std::size_t total = config.delta_grid.size() * config.trials;
  std::vector<CurvePoint> points(total);
  parallel_for(total, config.workers, [&](std::size_t task) {
    const double delta = config.delta_grid[task / config.trials];
    const rng::Stream base =
        rng::Stream(config.master_seed).derive({key(ExperimentKind::Stability), task % config.trials});
    rng::Stream vector_stream = base.derive({0});
    rng::Stream span_stream = base.derive({1});
    CurvePoint& point = points[task];
    try {
      const Vector v =
          models::make_test_vector(models::TestVectorSpec::leading(config.n, config.s, delta), vector_stream);
      const auto inst = models::planted_random(config.n, config.k, v, span_stream, true, config.s);
      // Oracle selection only ever looks at the i* program.
      const auto solution = lp::solve_l1_program(inst.w, inst.i_star);
      if (solution.status == lp::SolveStatus::Optimal) {
        point.value = recovery::evaluate_success(solution.z, inst.v).error;
      } else {
        point.failed = true;
      }
    } catch (const NumericalFailure&) {
      point.failed = true;
    }
  });

  StabilityResult result;
  result.config = config;
  for (std::size_t di = 0; di < config.delta_grid.size(); ++di) {
    std::vector<double> errors;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const CurvePoint& p = points[di * config.trials + t];
      errors.push_back(p.value);
      result.numerical_failures += p.failed ? 1 : 0;
    }
    const double median = lower_median(std::move(errors));
    const double delta = config.delta_grid[di];
    result.median_error.push_back(median);
    result.error_over_delta.push_back(delta > 0.0 ? median / delta : std::numeric_limits<double>::quiet_NaN());
  }
  return result;
}

}  // namespace sparsest::experiments
