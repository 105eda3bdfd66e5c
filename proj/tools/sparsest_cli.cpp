// sparsest: generate planted instances, recover, certify, and run the
// Monte-Carlo experiments. Exit status: 0 success, 1 configuration error
// (bad flag, invalid range, unwritable output), 2 runtime or numerical error.
//
// Indices printed by this tool are 1-based.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparsest/errors.hpp"
#include "sparsest/experiments.hpp"
#include "sparsest/recovery.hpp"
#include "sparsest/results_io.hpp"
#include "sparsest/subspace_models.hpp"

namespace fs = std::filesystem;
using namespace sparsest;
namespace ex = sparsest::experiments;

namespace {

/// A flag value that fails its owning operation's precondition.
struct ConfigError {
  std::string flag;
  std::string message;
};

void check(bool ok, const std::string& flag, const std::string& message) {
  if (!ok) throw ConfigError{flag, message};
}

struct Common {
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out;
  std::string manifest;
};

struct InstanceArgs {
  std::size_t n = 64;
  std::size_t k = 2;
  std::size_t s = 3;
  double delta = 0.01;
  bool unmixed = false;
  std::string instance;  // load instead of generating
};

struct Options {
  Common common;
  InstanceArgs inst;

  // recover / phase
  std::vector<std::string> selectors;
  double epsilon = 0.01;
  double tau = recovery::kSuccessTolerance;

  // certify
  double alpha = 1.0;

  // phase
  std::size_t n = 64;
  std::size_t kmin = 1, kmax = 16, kstep = 1;
  std::size_t smin = 1, smax = 24, sstep = 1;
  std::size_t trials = 50;
  double delta = 0.01;
  bool audit = false;

  // baseline
  std::string mode = "fixed-index";

  // scaling
  std::vector<std::size_t> k_grid{2, 3, 4, 5, 6};
  std::vector<std::size_t> n_grid{64, 128, 256};
  std::size_t k_fixed = 4;

  // stability
  std::size_t k = 4;
  std::size_t s = 4;
  std::vector<double> deltas{0.0, 1e-3, 1e-2, 1e-1};
};

void add_common(CLI::App* cmd, Common& c, bool experiment) {
  cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  cmd->add_option("--workers", c.workers, "Worker threads (results do not depend on this)")->capture_default_str();
  if (experiment) {
    cmd->add_option("--out", c.out, "Output directory (manifest.json, CSV tables)")->required(false);
    cmd->add_option("--manifest", c.manifest, "Replay the run described by this manifest.json");
  }
}

void add_instance(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("--n", a.n, "Ambient dimension")->capture_default_str();
  cmd->add_option("--k", a.k, "Number of random directions")->capture_default_str();
  cmd->add_option("--s", a.s, "Support size of the planted vector (leading coordinates)")->capture_default_str();
  cmd->add_option("--delta", a.delta, "Dense noise mass added to the planted vector")->capture_default_str();
  cmd->add_flag("--unmixed", a.unmixed, "Use [v | vtilde] without the random change of basis");
}

void validate_instance(const InstanceArgs& a) {
  if (!a.instance.empty()) return;
  check(a.n >= 2, "--n", "must be at least 2");
  check(a.k >= 1 && a.k <= a.n - 1, "--k", "must lie in 1..n-1 (n = " + std::to_string(a.n) + ")");
  check(a.s >= 1 && a.s <= a.n, "--s", "must lie in 1..n (n = " + std::to_string(a.n) + ")");
  check(a.delta >= 0.0 && std::isfinite(a.delta), "--delta", "must be finite and >= 0");
}

void validate_workers(const Common& c) { check(c.workers >= 1, "--workers", "must be at least 1"); }

models::PlantedInstance make_instance(const InstanceArgs& a, std::uint64_t seed) {
  if (!a.instance.empty()) return models::load_instance(a.instance);
  const rng::Stream root(seed);
  rng::Stream vector_stream = root.derive({0});
  rng::Stream span_stream = root.derive({1});
  const auto v = models::make_test_vector(models::TestVectorSpec::leading(a.n, a.s, a.delta), vector_stream);
  return models::planted_random(a.n, a.k, v, span_stream, !a.unmixed, a.s);
}

std::vector<recovery::SelectorSpec> parse_selectors(const std::vector<std::string>& names, double epsilon) {
  std::vector<recovery::SelectorSpec> out;
  for (const auto& name : names) {
    try {
      out.push_back(recovery::parse_selector(name, epsilon));
    } catch (const ContractViolation& e) {
      throw ConfigError{"--selectors", e.what()};
    }
  }
  return out;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ---- subcommands ------------------------------------------------------------

int run_generate(const Options& o) {
  validate_instance(o.inst);
  const auto inst = make_instance(o.inst, o.common.seed);
  if (o.common.out.empty()) {
    models::write_instance(std::cout, inst);
    return 0;
  }
  const fs::path target(o.common.out);
  const fs::path tmp = target.string() + ".tmp";
  models::save_instance(tmp.string(), inst);
  fs::rename(tmp, target);
  std::cout << "wrote " << target.string() << " (n " << inst.n << ", k " << inst.k << ", i* " << inst.i_star + 1
            << ")\n";
  return 0;
}

int run_recover(const Options& o) {
  validate_instance(o.inst);
  validate_workers(o.common);
  check(o.tau > 0.0, "--tau", "must be positive");
  check(o.epsilon > 0.0, "--epsilon", "must be positive");
  const auto selectors = parse_selectors(o.selectors, o.epsilon);
  const auto inst = make_instance(o.inst, o.common.seed);
  const auto candidates = recovery::recover_all(inst.w, o.common.workers);
  std::size_t failed = 0;
  for (const auto& c : candidates) failed += c.optimal() ? 0 : 1;
  std::cout << "n " << inst.n << "  k " << inst.k << "  i* " << inst.i_star + 1 << "  programs not optimal "
            << failed << "\n";
  int status = 0;
  for (const auto& sel : selectors) {
    const std::string name(recovery::selector_name(sel.kind));
    try {
      const auto outcome = recovery::run_selector(candidates, sel, inst.v, o.tau);
      std::cout << name << ": chosen index " << outcome.chosen_index + 1 << "  error " << num(outcome.error)
                << "  success " << yes_no(outcome.success) << "\n";
    } catch (const SelectionFailure& e) {
      std::cout << name << ": no selection (" << e.what() << ")\n";
      status = 2;
    }
  }
  return status;
}

int run_certify(const Options& o) {
  validate_instance(o.inst);
  check(o.alpha > 0.0 && std::isfinite(o.alpha), "--alpha", "must be positive");
  const auto inst = make_instance(o.inst, o.common.seed);
  recovery::CertificateOptions opts;
  opts.gain.workers = o.common.workers;
  const double ratio = numerics::norm(inst.v, numerics::NormKind::L1) / numerics::norm(inst.v, numerics::NormKind::Linf);
  const double bound = recovery::necessary_condition_value(inst.vtilde, inst.i_star);
  std::cout << "i* " << inst.i_star + 1 << "  |S| " << inst.support.size() << "\n";
  std::cout << "l1/linf of v " << num(ratio) << "  necessary-condition value " << num(bound) << "  satisfied "
            << yes_no(ratio <= bound) << "\n";
  const bool exact_applicable = std::all_of(inst.v.begin(), inst.v.end(), [&, i = std::size_t{0}](double x) mutable {
    const bool inside = std::binary_search(inst.support.begin(), inst.support.end(), i++);
    return inside || x == 0.0;
  });
  if (exact_applicable) {
    std::cout << "exact certificate " << yes_no(recovery::certify_exact(inst.v, inst.vtilde, inst.support, opts)) << "\n";
  } else {
    std::cout << "exact certificate n/a (v has mass outside S)\n";
  }
  const auto stable = recovery::certify_stable(inst.v, inst.vtilde, inst.support, o.alpha, opts);
  if (stable) {
    std::cout << "stable certificate yes  tail mass " << num(stable->tail_mass) << "  coefficient bound "
              << num(stable->coefficient_bound) << "  tail bound " << num(stable->tail_bound) << "\n";
  } else {
    std::cout << "stable certificate no\n";
  }
  return 0;
}

ex::AnyConfig build_config(const std::string& kind, const Options& o) {
  if (!o.common.manifest.empty()) {
    std::ifstream in(o.common.manifest);
    check(static_cast<bool>(in), "--manifest", "cannot open '" + o.common.manifest + "'");
    ex::RunManifest m;
    try {
      m = ex::RunManifest::from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError{"--manifest", e.what()};
    } catch (const ParseError& e) {
      throw ConfigError{"--manifest", e.what()};
    }
    check(m.kind == kind, "--manifest", "describes a '" + m.kind + "' run, not '" + kind + "'");
    try {
      return ex::config_from_manifest(m);
    } catch (const ParseError& e) {
      throw ConfigError{"--manifest", e.what()};
    }
  }

  const Common& c = o.common;
  validate_workers(c);
  check(o.trials >= 1, "--trials", "must be at least 1");
  if (kind == "phase") {
    check(o.n >= 2, "--n", "must be at least 2");
    check(o.kstep >= 1, "--kstep", "must be at least 1");
    check(o.sstep >= 1, "--sstep", "must be at least 1");
    check(o.kmin >= 1, "--kmin", "must be at least 1");
    check(o.kmax >= o.kmin && o.kmax <= o.n - 1, "--kmax", "must lie in kmin..n-1");
    check(o.smin >= 1, "--smin", "must be at least 1");
    check(o.smax >= o.smin && o.smax <= o.n, "--smax", "must lie in smin..n");
    check(o.delta >= 0.0 && std::isfinite(o.delta), "--delta", "must be finite and >= 0");
    check(o.tau > 0.0, "--tau", "must be positive");
    check(o.epsilon > 0.0, "--epsilon", "must be positive");
    ex::PhaseDiagramConfig cfg;
    cfg.n = o.n;
    cfg.k_grid = ex::make_grid(o.kmin, o.kmax, o.kstep);
    cfg.s_grid = ex::make_grid(o.smin, o.smax, o.sstep);
    cfg.trials = o.trials;
    cfg.delta = o.delta;
    cfg.tau = o.tau;
    cfg.selectors = parse_selectors(o.selectors, o.epsilon);
    try {
      cfg.validate();
    } catch (const ContractViolation& e) {
      throw ConfigError{"--selectors", e.what()};
    }
    cfg.master_seed = c.seed;
    cfg.audit = o.audit;
    cfg.workers = c.workers;
    return cfg;
  }
  if (kind == "baseline") {
    check(o.n >= 1, "--n", "must be positive");
    check(o.kstep >= 1, "--kstep", "must be at least 1");
    check(o.kmin >= 1, "--kmin", "must be at least 1");
    check(o.kmax >= o.kmin && o.kmax <= o.n, "--kmax", "must lie in kmin..n");
    ex::BaselineCurveConfig cfg;
    cfg.n = o.n;
    cfg.k_grid = ex::make_grid(o.kmin, o.kmax, o.kstep);
    cfg.trials = o.trials;
    try {
      cfg.mode = ex::parse_baseline_mode(o.mode);
    } catch (const ContractViolation& e) {
      throw ConfigError{"--mode", e.what()};
    }
    cfg.master_seed = c.seed;
    cfg.workers = c.workers;
    return cfg;
  }
  if (kind == "scaling") {
    ex::ScalingConfig cfg;
    cfg.n_fixed = o.n;
    cfg.k_grid = o.k_grid;
    cfg.k_fixed = o.k_fixed;
    cfg.n_grid = o.n_grid;
    cfg.trials = o.trials;
    cfg.master_seed = c.seed;
    cfg.workers = c.workers;
    try {
      cfg.validate();
    } catch (const ContractViolation& e) {
      const std::string what = e.what();
      throw ConfigError{what.rfind("n:", 0) == 0 ? "--ngrid" : "--kgrid", what};
    }
    return cfg;
  }
  check(o.n >= 2, "--n", "must be at least 2");
  check(o.k >= 1 && o.k <= o.n - 1, "--k", "must lie in 1..n-1");
  check(o.s >= 1 && o.s <= o.n, "--s", "must lie in 1..n");
  check(!o.deltas.empty(), "--deltas", "needs at least one value");
  for (double d : o.deltas) check(d >= 0.0 && std::isfinite(d), "--deltas", "values must be finite and >= 0");
  ex::StabilityConfig cfg;
  cfg.n = o.n;
  cfg.k = o.k;
  cfg.s = o.s;
  cfg.delta_grid = o.deltas;
  cfg.trials = o.trials;
  cfg.master_seed = c.seed;
  cfg.workers = c.workers;
  return cfg;
}

void print_summary(const ex::AnyResult& result) {
  std::visit(
      [](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, ex::PhaseDiagramResult>) {
          std::size_t failures = 0;
          for (std::size_t f : r.numerical_failures) failures += f;
          std::cout << "phase diagram: " << r.config.k_grid.size() << " x " << r.config.s_grid.size() << " cells, "
                    << r.config.trials << " trials, numerical failures " << failures << "\n";
          if (r.config.audit) {
            std::cout << "audit: exact recoveries " << r.audit_exact << ", necessary-condition violations "
                      << r.audit_violations << "\n";
          }
        } else if constexpr (std::is_same_v<R, ex::BaselineCurveResult>) {
          for (std::size_t i = 0; i < r.config.k_grid.size(); ++i) {
            std::cout << "k " << r.config.k_grid[i] << "  median " << num(r.median_value[i]) << "  median score "
                      << num(r.median_score[i]) << "\n";
          }
        } else if constexpr (std::is_same_v<R, ex::ScalingResult>) {
          std::cout << "slope vs k " << num(r.slope_k) << "  slope vs n " << num(r.slope_n) << "\n";
        } else {
          for (std::size_t i = 0; i < r.config.delta_grid.size(); ++i) {
            std::cout << "delta " << num(r.config.delta_grid[i]) << "  median error " << num(r.median_error[i])
                      << "  error/delta " << num(r.error_over_delta[i]) << "\n";
          }
        }
      },
      result);
}

int run_experiment(const std::string& kind, const Options& o) {
  ex::AnyConfig config = build_config(kind, o);
  if (!o.common.manifest.empty()) {
    // Worker count never changes results, so a replay may use a different one.
    std::visit([&](auto& c) { c.workers = o.common.workers; }, config);
  }
  if (!o.common.out.empty()) {
    try {
      ex::ensure_writable(o.common.out);
    } catch (const IoError& e) {
      throw ConfigError{"--out", e.what()};
    }
  }
  const ex::AnyResult result = ex::run(config);
  print_summary(result);
  if (!o.common.out.empty()) {
    ex::write_results(result, ex::make_manifest(result), o.common.out);
    std::cout << "wrote " << o.common.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparsest-vector recovery in planted random subspaces"};
  app.require_subcommand(1);
  Options o;

  auto* generate = app.add_subcommand("generate", "Draw a planted instance and write it as text");
  add_instance(generate, o.inst);
  add_common(generate, o.common, false);
  generate->add_option("--out", o.common.out, "Instance file (stdout when omitted)");

  auto* recover = app.add_subcommand("recover", "Solve the n programs on one instance and select");
  add_instance(recover, o.inst);
  add_common(recover, o.common, false);
  recover->add_option("--instance", o.inst.instance, "Load this instance file instead of drawing one");
  recover->add_option("--selector,--selectors", o.selectors, "oracle, l1linf, l1l2, thresh-l0, strict-l0")
      ->delimiter(',')
      ->default_val(std::vector<std::string>{"oracle", "l1linf", "l1l2", "thresh-l0"});
  recover->add_option("--epsilon", o.epsilon, "Threshold of thresh-l0")->capture_default_str();
  recover->add_option("--tau", o.tau, "Success tolerance on the l2 error")->capture_default_str();

  auto* certify = app.add_subcommand("certify", "Check the recovery certificates on one instance");
  add_instance(certify, o.inst);
  add_common(certify, o.common, false);
  certify->add_option("--instance", o.inst.instance, "Load this instance file instead of drawing one");
  certify->add_option("--alpha", o.alpha, "Margin of the stable certificate")->capture_default_str();

  auto* phase = app.add_subcommand("phase", "Success probability over a (k, s) grid");
  add_common(phase, o.common, true);
  phase->add_option("--n", o.n, "Ambient dimension")->capture_default_str();
  phase->add_option("--kmin", o.kmin, "Smallest k")->capture_default_str();
  phase->add_option("--kmax", o.kmax, "Largest k")->capture_default_str();
  phase->add_option("--kstep", o.kstep, "k step")->capture_default_str();
  phase->add_option("--smin", o.smin, "Smallest s")->capture_default_str();
  phase->add_option("--smax", o.smax, "Largest s")->capture_default_str();
  phase->add_option("--sstep", o.sstep, "s step")->capture_default_str();
  phase->add_option("--trials", o.trials, "Trials per cell")->capture_default_str();
  phase->add_option("--delta", o.delta, "Dense noise mass of the planted vector")->capture_default_str();
  phase->add_option("--tau", o.tau, "Success tolerance on the l2 error")->capture_default_str();
  phase->add_option("--epsilon", o.epsilon, "Threshold of thresh-l0")->capture_default_str();
  phase->add_option("--selectors,--selector", o.selectors, "Comma-separated selector names")
      ->delimiter(',')
      ->default_val(std::vector<std::string>{"oracle", "l1linf", "l1l2", "thresh-l0"});
  phase->add_flag("--audit", o.audit, "Check the necessary condition on every exact oracle recovery");

  auto* baseline = app.add_subcommand("baseline", "Program values in a random span with nothing planted");
  add_common(baseline, o.common, true);
  baseline->add_option("--n", o.n, "Ambient dimension")->capture_default_str();
  baseline->add_option("--kmin", o.kmin, "Smallest k")->capture_default_str();
  baseline->add_option("--kmax", o.kmax, "Largest k")->capture_default_str();
  baseline->add_option("--kstep", o.kstep, "k step")->capture_default_str();
  baseline->add_option("--trials", o.trials, "Trials per k")->capture_default_str();
  baseline->add_option("--mode", o.mode, "fixed-index or min-ratio")->capture_default_str();

  auto* scaling = app.add_subcommand("scaling", "Fit the growth of the fixed-index value in k and n");
  add_common(scaling, o.common, true);
  scaling->add_option("--n", o.n, "n for the k axis")->default_val(100);
  scaling->add_option("--kgrid", o.k_grid, "k axis (needs 16k <= n)")->delimiter(',')->capture_default_str();
  scaling->add_option("--k", o.k_fixed, "k for the n axis")->capture_default_str();
  scaling->add_option("--ngrid", o.n_grid, "n axis (needs 16k <= n)")->delimiter(',')->capture_default_str();
  scaling->add_option("--trials", o.trials, "Trials per grid point")->capture_default_str();

  auto* stability = app.add_subcommand("stability", "Oracle error as the planted vector gains dense noise");
  add_common(stability, o.common, true);
  stability->add_option("--n", o.n, "Ambient dimension")->default_val(100);
  stability->add_option("--k", o.k, "Number of random directions")->capture_default_str();
  stability->add_option("--s", o.s, "Support size")->capture_default_str();
  stability->add_option("--deltas", o.deltas, "Noise masses")->delimiter(',')->capture_default_str();
  stability->add_option("--trials", o.trials, "Trials per noise mass")->default_val(20);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*generate) return run_generate(o);
    if (*recover) return run_recover(o);
    if (*certify) return run_certify(o);
    if (*phase) return run_experiment("phase", o);
    if (*baseline) return run_experiment("baseline", o);
    if (*scaling) return run_experiment("scaling", o);
    if (*stability) return run_experiment("stability", o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.flag << ": " << e.message << "\n";
    return 1;
  } catch (const ContractViolation& e) {
    std::cerr << "error: invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
