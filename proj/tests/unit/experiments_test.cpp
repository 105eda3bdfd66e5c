#include <gtest/gtest.h>

#include <cmath>

#include "sparsest/errors.hpp"
#include "sparsest/experiments.hpp"

namespace {

using namespace sparsest;
using namespace sparsest::experiments;

TEST(Grids, MakeGrid) {
  EXPECT_EQ(make_grid(2, 10, 4), (std::vector<std::size_t>{2, 6, 10}));
  EXPECT_EQ(make_grid(3, 3), (std::vector<std::size_t>{3}));
  EXPECT_THROW(make_grid(4, 3), ContractViolation);
  EXPECT_THROW(make_grid(1, 3, 0), ContractViolation);
}

TEST(Grids, TransitionGridIsDenseThenCoarse) {
  EXPECT_EQ(transition_grid(8, 25), (std::vector<std::size_t>{2, 4, 6, 8, 10, 15, 20, 25}));
  EXPECT_EQ(transition_grid(10, 20), (std::vector<std::size_t>{2, 4, 6, 8, 10, 15, 20}));
}

TEST(LowerMedian, OddAndEvenCounts) {
  EXPECT_EQ(lower_median({3, 1, 2}), 2.0);
  EXPECT_EQ(lower_median({4, 1, 3, 2}), 2.0);
  EXPECT_EQ(lower_median({7}), 7.0);
  EXPECT_THROW(lower_median({}), ContractViolation);
}

TEST(LogLogSlope, ExactPowerLaws) {
  const std::vector<double> ks{2, 3, 4, 5, 6};
  std::vector<double> inv_sqrt;
  for (double k : ks) inv_sqrt.push_back(17.0 / std::sqrt(k));
  EXPECT_NEAR(loglog_slope(ks, inv_sqrt), -0.5, 1e-12);
  const std::vector<double> ns{64, 128, 256};
  std::vector<double> linear;
  for (double n : ns) linear.push_back(0.3 * n);
  EXPECT_NEAR(loglog_slope(ns, linear), 1.0, 1e-12);
}

TEST(LogLogSlope, DegenerateInputs) {
  const std::vector<double> one{1};
  const std::vector<double> same{2, 2, 2};
  const std::vector<double> y{1, 2, 3};
  const std::vector<double> neg{1, -2, 3};
  EXPECT_THROW(loglog_slope(one, one), ContractViolation);
  EXPECT_THROW(loglog_slope(same, y), ContractViolation);
  EXPECT_THROW(loglog_slope(y, neg), ContractViolation);
}

PhaseDiagramConfig small_phase() {
  PhaseDiagramConfig c;
  c.n = 24;
  c.k_grid = {1, 3};
  c.s_grid = {1, 4};
  c.trials = 4;
  c.master_seed = 5;
  c.audit = true;
  return c;
}

TEST(PhaseDiagram, DeepInsideThePhaseOracleAlwaysSucceeds) {
  PhaseDiagramConfig c;
  c.n = 32;
  c.k_grid = {1};
  c.s_grid = {1};
  c.trials = 20;
  c.delta = 0.0;
  c.selectors = {recovery::SelectorSpec::oracle()};
  const auto r = phase_diagram(c);
  EXPECT_EQ(r.probability(0, 0, 0), 1.0);
}

TEST(PhaseDiagram, DenseVectorIsNeverRecovered) {
  PhaseDiagramConfig c;
  c.n = 32;
  c.k_grid = {8};
  c.s_grid = {32};
  c.trials = 10;
  const auto r = phase_diagram(c);
  for (std::size_t j = 0; j < c.selectors.size(); ++j) EXPECT_EQ(r.probability(j, 0, 0), 0.0);
}

TEST(PhaseDiagram, RejectsInvalidConfigurations) {
  auto c = small_phase();
  c.trials = 0;
  EXPECT_THROW(phase_diagram(c), ContractViolation);
  c = small_phase();
  c.k_grid = {24};
  EXPECT_THROW(phase_diagram(c), ContractViolation);
  c = small_phase();
  c.s_grid = {0};
  EXPECT_THROW(phase_diagram(c), ContractViolation);
  c = small_phase();
  c.delta = -0.1;
  EXPECT_THROW(phase_diagram(c), ContractViolation);
  c = small_phase();
  c.selectors = {recovery::SelectorSpec::oracle(), recovery::SelectorSpec::oracle()};
  EXPECT_THROW(phase_diagram(c), ContractViolation);
}

TEST(PhaseDiagram, ProbabilitiesAreCountsOverTrials) {
  const auto r = phase_diagram(small_phase());
  ASSERT_EQ(r.successes.size(), 4u * 2 * 2);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t ki = 0; ki < 2; ++ki)
      for (std::size_t si = 0; si < 2; ++si) {
        EXPECT_LE(r.success_count(j, ki, si), 4u);
        EXPECT_EQ(r.probability(j, ki, si), static_cast<double>(r.success_count(j, ki, si)) / 4.0);
      }
}

TEST(PhaseDiagram, WorkerCountDoesNotChangeResults) {
  auto c = small_phase();
  const auto one = phase_diagram(c);
  c.workers = 3;
  const auto three = phase_diagram(c);
  EXPECT_EQ(one.successes, three.successes);
  EXPECT_EQ(one.numerical_failures, three.numerical_failures);
  EXPECT_EQ(one.audit_exact, three.audit_exact);
}

TEST(PhaseDiagram, AuditFindsNoViolationsOnExactRuns) {
  auto c = small_phase();
  c.delta = 0.0;
  const auto r = phase_diagram(c);
  EXPECT_GT(r.audit_exact, 0u);
  EXPECT_EQ(r.audit_violations, 0u);
}

TEST(PhaseDiagram, SelectorsShareCandidates) {
  // The same trial under a reordered selector list gives the same per-selector counts.
  auto c = small_phase();
  const auto a = phase_diagram(c);
  c.selectors = {recovery::SelectorSpec::thresholded_l0(), recovery::SelectorSpec::oracle()};
  const auto b = phase_diagram(c);
  for (std::size_t ki = 0; ki < 2; ++ki)
    for (std::size_t si = 0; si < 2; ++si) {
      EXPECT_EQ(a.success_count(0, ki, si), b.success_count(1, ki, si));
      EXPECT_EQ(a.success_count(3, ki, si), b.success_count(0, ki, si));
    }
}

TEST(BaselineCurve, FullSpaceValueIsOne) {
  BaselineCurveConfig c;
  c.n = 12;
  c.k_grid = {12};
  c.trials = 5;
  EXPECT_EQ(baseline_curve(c).median_value[0], 1.0);
}

TEST(BaselineCurve, SingleColumnClosedForm) {
  BaselineCurveConfig c;
  c.n = 20;
  c.k_grid = {1};
  c.trials = 7;
  c.master_seed = 9;
  std::vector<double> expect;
  for (std::uint64_t t = 0; t < 7; ++t) {
    rng::Stream s = rng::Stream(9).derive({static_cast<std::uint64_t>(ExperimentKind::Baseline), 1, t});
    const auto a = rng::gaussian_vector(s, 20);
    expect.push_back(numerics::norm(a, numerics::NormKind::L1) / std::abs(a[0]));
  }
  EXPECT_NEAR(baseline_curve(c).median_value[0], lower_median(expect), 1e-12 * lower_median(expect));
}

TEST(BaselineCurve, MedianDecreasesInK) {
  BaselineCurveConfig c;
  c.n = 100;
  c.k_grid = {2, 4, 8, 16};
  c.trials = 50;
  const auto r = baseline_curve(c);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_LT(r.median_value[i], r.median_value[i - 1]);
  const std::vector<double> ks{2, 4, 8, 16};
  const double slope = loglog_slope(ks, r.median_value);
  EXPECT_GE(slope, -0.65);
  EXPECT_LE(slope, -0.35);
}

TEST(BaselineCurve, MinRatioScoreNeverExceedsFixedIndexScore) {
  BaselineCurveConfig c;
  c.n = 24;
  c.k_grid = {2, 3, 5};
  c.trials = 6;
  const auto fixed = baseline_curve(c);
  c.mode = BaselineMode::MinRatio;
  const auto ratio = baseline_curve(c);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(ratio.median_score[i], fixed.median_score[i]);
  EXPECT_EQ(ratio.median_score, ratio.median_value);
}

TEST(BaselineCurve, RejectsInvalidConfigurations) {
  BaselineCurveConfig c;
  c.n = 10;
  c.k_grid = {11};
  EXPECT_THROW(baseline_curve(c), ContractViolation);
  c.k_grid = {2};
  c.trials = 0;
  EXPECT_THROW(baseline_curve(c), ContractViolation);
}

TEST(ScalingFit, Validation) {
  ScalingConfig c;
  c.k_grid = {2, 3};
  EXPECT_THROW(scaling_fit(c), ContractViolation);
  c = ScalingConfig{};
  c.k_grid = {2, 3, 7};  // 16·7 > 100
  EXPECT_THROW(scaling_fit(c), ContractViolation);
  c = ScalingConfig{};
  c.n_grid = {64, 64, 128};
  EXPECT_THROW(scaling_fit(c), ContractViolation);
  c = ScalingConfig{};
  c.n_grid = {48, 128, 256};  // 16·4 > 48
  EXPECT_THROW(scaling_fit(c), ContractViolation);
}

TEST(ScalingFit, SlopesComeFromTheMedians) {
  ScalingConfig c;
  c.trials = 3;
  c.n_fixed = 48;
  c.k_grid = {1, 2, 3};
  c.k_fixed = 1;
  c.n_grid = {16, 24, 32};
  const auto r = scaling_fit(c);
  const std::vector<double> ks{1, 2, 3};
  const std::vector<double> ns{16, 24, 32};
  EXPECT_EQ(r.slope_k, loglog_slope(ks, r.median_by_k));
  EXPECT_EQ(r.slope_n, loglog_slope(ns, r.median_by_n));
}

TEST(StabilitySweep, ZeroNoiseIsExactAndRatiosAreReported) {
  StabilityConfig c;
  c.n = 40;
  c.k = 2;
  c.s = 3;
  c.trials = 5;
  const auto r = stability_sweep(c);
  ASSERT_EQ(r.median_error.size(), 4u);
  EXPECT_LE(r.median_error[0], 1e-6);
  EXPECT_TRUE(std::isnan(r.error_over_delta[0]));
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(r.error_over_delta[i], r.median_error[i] / c.delta_grid[i]);
}

TEST(StabilitySweep, Validation) {
  StabilityConfig c;
  c.delta_grid = {0.1, -1};
  EXPECT_THROW(stability_sweep(c), ContractViolation);
  c = StabilityConfig{};
  c.k = c.n;
  EXPECT_THROW(stability_sweep(c), ContractViolation);
}

}  // namespace
