#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sparsest/errors.hpp"
#include "sparsest/results_io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace sparsest;
using namespace sparsest::experiments;

class ResultsIo : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("sparsest_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path root_;
};

PhaseDiagramConfig two_by_two() {
  PhaseDiagramConfig c;
  c.n = 20;
  c.k_grid = {1, 2};
  c.s_grid = {2, 5};
  c.trials = 3;
  c.delta = 0.01;
  c.master_seed = 77;
  c.audit = true;
  return c;
}

void expect_same_config(const PhaseDiagramConfig& a, const PhaseDiagramConfig& b) {
  EXPECT_EQ(a.n, b.n);
  EXPECT_EQ(a.k_grid, b.k_grid);
  EXPECT_EQ(a.s_grid, b.s_grid);
  EXPECT_EQ(a.trials, b.trials);
  EXPECT_EQ(a.delta, b.delta);
  EXPECT_EQ(a.tau, b.tau);
  EXPECT_EQ(a.selectors, b.selectors);
  EXPECT_EQ(a.master_seed, b.master_seed);
  EXPECT_EQ(a.audit, b.audit);
  EXPECT_EQ(a.workers, b.workers);
}

TEST_F(ResultsIo, PhaseDiagramRoundTrip) {
  const auto result = phase_diagram(two_by_two());
  write_results(result, make_manifest(result), root_ / "run");
  const auto loaded = read_results(root_ / "run");
  ASSERT_TRUE(std::holds_alternative<PhaseDiagramResult>(loaded.result));
  const auto& back = std::get<PhaseDiagramResult>(loaded.result);
  expect_same_config(back.config, result.config);
  EXPECT_EQ(back.successes, result.successes);
  EXPECT_EQ(back.numerical_failures, result.numerical_failures);
  EXPECT_EQ(back.audit_exact, result.audit_exact);
  EXPECT_EQ(back.audit_violations, result.audit_violations);
  EXPECT_EQ(loaded.manifest.kind, "phase");
  EXPECT_EQ(loaded.manifest.code_version, kCodeVersion);
  EXPECT_EQ(loaded.manifest.schema_version, kSchemaVersion);
  for (const char* f : {"heatmap_oracle.pgm", "heatmap_l1linf.pgm", "heatmap_l1l2.pgm", "heatmap_thresh-l0.pgm"}) {
    EXPECT_TRUE(fs::exists(root_ / "run" / f)) << f;
  }
}

TEST_F(ResultsIo, PhaseCsvLayout) {
  const auto result = phase_diagram(two_by_two());
  write_results(result, make_manifest(result), root_ / "run");
  std::ifstream in(root_ / "run" / "phase.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "selector,k,s,trials,successes,probability,failures_numerical");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 4u * 2 * 2);
}

TEST_F(ResultsIo, HeatmapMapping) {
  PhaseDiagramResult r;
  r.config = two_by_two();
  r.config.selectors = {recovery::SelectorSpec::oracle()};
  r.config.trials = 4;
  r.successes = {4, 3, 1, 0};
  r.numerical_failures = {0, 0, 0, 0};
  write_results(r, make_manifest(r), root_ / "run");
  const std::string pgm = slurp(root_ / "run" / "heatmap_oracle.pgm");
  EXPECT_NE(pgm.find("P2\n"), std::string::npos);
  EXPECT_NE(pgm.find("\n2 2\n255\n255 191\n64 0\n"), std::string::npos);
}

TEST_F(ResultsIo, ReplayReproducesCsvBytes) {
  const auto first = phase_diagram(two_by_two());
  write_results(first, make_manifest(first), root_ / "a");
  const auto loaded = read_results(root_ / "a");
  AnyConfig config = config_from_manifest(loaded.manifest);
  std::get<PhaseDiagramConfig>(config).workers = 3;
  const auto again = run(config);
  write_results(again, make_manifest(again), root_ / "b");
  EXPECT_EQ(slurp(root_ / "a" / "phase.csv"), slurp(root_ / "b" / "phase.csv"));
  EXPECT_EQ(slurp(root_ / "a" / "heatmap_oracle.pgm"), slurp(root_ / "b" / "heatmap_oracle.pgm"));
}

TEST_F(ResultsIo, MalformedHeaderNamesTheColumn) {
  const auto result = phase_diagram(two_by_two());
  write_results(result, make_manifest(result), root_ / "run");
  std::string csv = slurp(root_ / "run" / "phase.csv");
  csv.replace(csv.find("successes"), 9, "wins");
  std::ofstream(root_ / "run" / "phase.csv", std::ios::binary) << csv;
  try {
    read_results(root_ / "run");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("'wins'"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("'successes'"), std::string::npos) << e.what();
  }
}

TEST_F(ResultsIo, MissingColumnAndBadCellsAreParseErrors) {
  const auto result = phase_diagram(two_by_two());
  write_results(result, make_manifest(result), root_ / "run");
  const std::string good = slurp(root_ / "run" / "phase.csv");

  std::string truncated = good;
  truncated.replace(truncated.find(",failures_numerical"), 19, "");
  std::ofstream(root_ / "run" / "phase.csv", std::ios::binary) << truncated;
  EXPECT_THROW(read_results(root_ / "run"), ParseError);

  std::string bad = good;
  bad.replace(bad.find("oracle,1,2,3,"), 13, "oracle,1,2,x,");
  std::ofstream(root_ / "run" / "phase.csv", std::ios::binary) << bad;
  EXPECT_THROW(read_results(root_ / "run"), ParseError);
}

TEST_F(ResultsIo, BaselineRoundTrip) {
  BaselineCurveConfig c;
  c.n = 16;
  c.k_grid = {1, 2, 16};
  c.trials = 4;
  c.mode = BaselineMode::MinRatio;
  const auto r = baseline_curve(c);
  write_results(r, make_manifest(r), root_ / "run");
  const auto back = std::get<BaselineCurveResult>(read_results(root_ / "run").result);
  EXPECT_EQ(back.config.n, c.n);
  EXPECT_EQ(back.config.k_grid, c.k_grid);
  EXPECT_EQ(back.config.mode, c.mode);
  EXPECT_EQ(back.median_value, r.median_value);
  EXPECT_EQ(back.median_score, r.median_score);
  EXPECT_EQ(back.numerical_failures, r.numerical_failures);
  std::ifstream in(root_ / "run" / "curve.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "k,trials,median_value");
}

TEST_F(ResultsIo, ScalingRoundTrip) {
  ScalingConfig c;
  c.trials = 2;
  c.n_fixed = 48;
  c.k_grid = {1, 2, 3};
  c.k_fixed = 1;
  c.n_grid = {16, 20, 24};
  const auto r = scaling_fit(c);
  write_results(r, make_manifest(r), root_ / "run");
  const auto back = std::get<ScalingResult>(read_results(root_ / "run").result);
  EXPECT_EQ(back.config.k_grid, c.k_grid);
  EXPECT_EQ(back.config.n_grid, c.n_grid);
  EXPECT_EQ(back.median_by_k, r.median_by_k);
  EXPECT_EQ(back.median_by_n, r.median_by_n);
  EXPECT_EQ(back.slope_k, r.slope_k);
  EXPECT_EQ(back.slope_n, r.slope_n);
}

TEST_F(ResultsIo, StabilityRoundTripKeepsNan) {
  StabilityConfig c;
  c.n = 30;
  c.k = 2;
  c.s = 3;
  c.trials = 3;
  const auto r = stability_sweep(c);
  write_results(r, make_manifest(r), root_ / "run");
  const auto back = std::get<StabilityResult>(read_results(root_ / "run").result);
  EXPECT_EQ(back.config.delta_grid, c.delta_grid);
  EXPECT_EQ(back.median_error, r.median_error);
  ASSERT_EQ(back.error_over_delta.size(), r.error_over_delta.size());
  EXPECT_TRUE(std::isnan(back.error_over_delta[0]));
  for (std::size_t i = 1; i < r.error_over_delta.size(); ++i) EXPECT_EQ(back.error_over_delta[i], r.error_over_delta[i]);
}

TEST_F(ResultsIo, NumbersUseSeventeenSignificantDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
}

TEST_F(ResultsIo, ExistingDirectoryIsReplacedWhole) {
  fs::create_directories(root_ / "run");
  std::ofstream(root_ / "run" / "stale.txt") << "old";
  const auto result = phase_diagram(two_by_two());
  write_results(result, make_manifest(result), root_ / "run/");
  EXPECT_FALSE(fs::exists(root_ / "run" / "stale.txt"));
  EXPECT_TRUE(fs::exists(root_ / "run" / "manifest.json"));
  for (const auto& entry : fs::directory_iterator(root_)) {
    EXPECT_EQ(entry.path().filename(), "run") << "leftover " << entry.path();
  }
}

TEST_F(ResultsIo, UnwritableDestinationIsAnIoError) {
  std::ofstream(root_ / "file") << "x";
  EXPECT_THROW(ensure_writable(root_ / "file" / "run"), IoError);
  EXPECT_THROW(ensure_writable(root_ / "file"), IoError);
  const auto result = phase_diagram(two_by_two());
  EXPECT_THROW(write_results(result, make_manifest(result), root_ / "file" / "run"), IoError);
}

TEST_F(ResultsIo, MissingDirectoryIsAnIoError) {
  EXPECT_THROW(read_results(root_ / "nowhere"), IoError);
}

TEST_F(ResultsIo, ManifestCarriesEveryParameter) {
  const auto result = phase_diagram(two_by_two());
  const auto m = make_manifest(result);
  for (const char* key : {"n", "k_grid", "s_grid", "trials", "delta", "tau", "selectors", "audit", "workers"}) {
    EXPECT_TRUE(m.parameters.contains(key)) << key;
  }
  EXPECT_EQ(m.master_seed, 77u);
  EXPECT_FALSE(m.timestamp.empty());
  const auto back = RunManifest::from_json(m.to_json());
  EXPECT_EQ(back.parameters, m.parameters);
  EXPECT_EQ(back.tallies, m.tallies);
}

}  // namespace
