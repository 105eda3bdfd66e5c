#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsest/lp_solver.hpp"
#include "sparsest/numerics.hpp"
#include "sparsest/subspace_models.hpp"

namespace sparsest::recovery {

/// Output of the program normalized at coordinate `index` (0-based).
struct CandidateSolution {
  std::size_t index = 0;
  lp::L1ProgramSolution solution;

  bool optimal() const { return solution.status == lp::SolveStatus::Optimal; }
};

enum class SelectorKind { Oracle, L1OverLinf, L1OverL2, ThresholdedL0, StrictL0 };

struct SelectorSpec {
  SelectorKind kind = SelectorKind::L1OverLinf;
  double epsilon = 0.01;    // ThresholdedL0: count |z(i)| ≥ ε
  double zero_tol = 1e-6;   // StrictL0: count |z(i)| > zero_tol

  static SelectorSpec oracle() { return {SelectorKind::Oracle}; }
  static SelectorSpec l1_over_linf() { return {SelectorKind::L1OverLinf}; }
  static SelectorSpec l1_over_l2() { return {SelectorKind::L1OverL2}; }
  static SelectorSpec thresholded_l0(double epsilon = 0.01) { return {SelectorKind::ThresholdedL0, epsilon}; }
  static SelectorSpec strict_l0(double zero_tol = 1e-6) { return {SelectorKind::StrictL0, 0.01, zero_tol}; }

  bool operator==(const SelectorSpec&) const = default;
};

/// Stable names used on the command line and in CSV files:
/// oracle, l1linf, l1l2, thresh-l0, strict-l0.
std::string_view selector_name(SelectorKind kind);
SelectorSpec parse_selector(std::string_view name, double epsilon = 0.01, double zero_tol = 1e-6);

inline constexpr double kSuccessTolerance = 0.01;

/// Solves the n programs min ‖z‖₁ s.t. z ∈ range(W), z(i) = 1. Failed or
/// infeasible programs keep their status and are skipped by `select`.
std::vector<CandidateSolution> recover_all(const numerics::Matrix& w, std::size_t workers = 1);

/// Lower is sparser. Ratio kinds reject the zero vector; Oracle is not
/// scoreable.
double sparsity_score(const numerics::Vector& z, const SelectorSpec& selector);

struct Selection {
  std::size_t chosen_index = 0;
  numerics::Vector z_hat;
  /// One score per candidate; NaN where the candidate was not Optimal or the
  /// selector is Oracle.
  std::vector<double> scores;
};

/// Oracle takes the candidate at `oracle_index`; every other selector takes
/// the Optimal candidate of least score, ties to the lowest index.
Selection select(const std::vector<CandidateSolution>& candidates, const SelectorSpec& selector,
                 std::optional<std::size_t> oracle_index = std::nullopt);

struct SuccessCheck {
  double error = 0.0;  // ‖z_hat − v/v(i*)‖₂
  bool success = false;
};

SuccessCheck evaluate_success(const numerics::Vector& z_hat, const numerics::Vector& v,
                              double tau = kSuccessTolerance);

struct TrialOutcome {
  std::size_t chosen_index = 0;
  numerics::Vector z_hat;
  double error = 0.0;
  bool success = false;
  std::vector<double> per_candidate_scores;
};

TrialOutcome run_selector(const std::vector<CandidateSolution>& candidates, const SelectorSpec& selector,
                          const numerics::Vector& v, double tau = kSuccessTolerance);

/// Optimal value of min ‖z‖₁ s.t. z ∈ range(vtilde), z(i*) = 1: the most
/// ℓ1/ℓ∞ mass the planted vector may carry and still be recovered at i*.
/// Throws ContractViolation when row i* of vtilde vanishes and
/// NumericalFailure when the solve fails.
double necessary_condition_value(const numerics::Matrix& vtilde, std::size_t i_star);

struct CertificateOptions {
  lp::GainOptions gain;
};

/// Checks the sufficient conditions for v/v(i*) to be the unique solution of
/// the i* program:
///   ‖Ṽ_S‖₁→₁ ≤ 2|S|  and  min-gain(Ṽ_{S^c}) ≥ (2‖ã‖∞ + 2)|S|,
/// with ã = row i* of vtilde. Requires supp(v) ⊆ S.
bool certify_exact(const numerics::Vector& v, const numerics::Matrix& vtilde, const models::IndexSet& support,
                   const CertificateOptions& options = {});

struct StabilityBounds {
  double coefficient_bound = 0.0;  // bound on |x#(1) − 1|:      2δ/s
  double tail_bound = 0.0;         // bound on ‖x̃#‖₁:           2δ/(s(‖ã‖∞ + α))
  double tail_mass = 0.0;          // δ = ‖v − v_s‖₁ after v → v/v(i*)
};

/// Approximate-recovery certificate. S must be a best |S|-term support of
/// v. Returns the two bounds when
///   ‖Ṽ_S‖₁→₁ ≤ 2|S|  and  min-gain(Ṽ_{S^c}) ≥ (2‖ã‖∞ + 2 + α)|S|
/// hold, and nothing otherwise.
std::optional<StabilityBounds> certify_stable(const numerics::Vector& v, const numerics::Matrix& vtilde,
                                              const models::IndexSet& support, double alpha,
                                              const CertificateOptions& options = {});

/// Indices of the s largest entries of diag(P_W), ties to the lower index,
/// returned ascending.
models::IndexSet diagonal_threshold_support(const numerics::Matrix& w, std::size_t s);

}  // namespace sparsest::recovery
