#pragma once

// The two ℓ1 linear programs used throughout recovery and certification:
//
//   solve_l1_program:  min ‖Bx‖₁  s.t. (Bx)(i) = 1
//   min_l1_gain:       min_{x≠0} ‖Ax‖₁ / ‖x‖₁
//
// Both run on the bounded simplex in simplex.hpp. The first program is the
// epigraph LP  min Σt  s.t. −t ≤ Bx ≤ t, (Bx)(i) = 1  solved through its
// dual  max μ  s.t. Bᵀy = μ·B(i,:)ᵀ, −1 ≤ y ≤ 1,  which has only d rows.
// The primal minimizer x is read off the dual's simplex multipliers; rows
// whose y is basic are exactly the epigraph rows held at zero, so z = Bx is
// reported as a vertex with those entries snapped to 0.

#include <cstddef>

#include "sparsest/numerics.hpp"
#include "sparsest/simplex.hpp"

namespace sparsest::lp {

enum class SolveStatus { Optimal, Infeasible, NumericalFailure };

const char* to_string(SolveStatus status);

struct L1ProgramSolution {
  numerics::Vector x;  // coefficients in the given basis
  numerics::Vector z;  // B x
  double objective = 0.0;
  SolveStatus status = SolveStatus::NumericalFailure;
  std::size_t iterations = 0;
};

inline constexpr double kFeasibilityTolerance = 1e-9;
inline constexpr double kOptimalityGap = 1e-8;

/// Minimizes ‖Bx‖₁ subject to (Bx)(i) = 1 (0-based i). Infeasible exactly
/// when row i of B vanishes. Any optimizer is returned when it is not unique.
L1ProgramSolution solve_l1_program(const numerics::Matrix& basis, std::size_t index);

struct GainOptions {
  std::size_t k_max = 16;
  /// Threads used to enumerate sign faces; the answer does not depend on it.
  std::size_t workers = 1;
};

/// Exact min_{x≠0} ‖Ax‖₁/‖x‖₁ by one LP per sign face of the ℓ1 sphere
/// (2^{k-1} faces; the other half follow from x → −x). Throws
/// CapabilityError when cols > k_max and NumericalFailure when a face LP
/// fails.
double min_l1_gain(const numerics::Matrix& a, const GainOptions& options = {});

/// σmin(A)/√k, valid for every k: ‖Ax‖₁ ≥ ‖Ax‖₂ ≥ σmin‖x‖₂ ≥ σmin‖x‖₁/√k.
double min_l1_gain_lower_bound(const numerics::Matrix& a);

}  // namespace sparsest::lp
