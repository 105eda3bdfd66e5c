#pragma once

// Dense bounded-variable revised simplex.
//
//   minimize  cᵀx  subject to  A x = b,  lower ≤ x ≤ upper
//
// Bounds may be infinite. Phase 1 starts from an all-artificial basis;
// phase 2 runs Dantzig pricing with a Harris two-pass ratio test and falls
// back to Bland's rule once a run of degenerate pivots suggests stalling.
// The basis inverse is kept explicitly (the row counts we meet are small)
// and rebuilt from scratch periodically and before the answer is reported.

#include <cstddef>
#include <limits>

#include "sparsest/numerics.hpp"

namespace sparsest::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct BoundedLp {
  numerics::Matrix constraints;  // m × N
  numerics::Vector rhs;          // m
  numerics::Vector cost;         // N
  numerics::Vector lower;        // N, may hold -kInfinity
  numerics::Vector upper;        // N, may hold +kInfinity
};

enum class SimplexStatus { Optimal, Infeasible, Unbounded, IterationLimit, SingularBasis };

const char* to_string(SimplexStatus status);

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-10;
  /// 0 selects 50·(m + N).
  std::size_t max_iterations = 0;
  std::size_t refactor_interval = 64;
  /// Consecutive degenerate pivots before Bland's rule engages.
  std::size_t stall_limit = 30;
};

struct SimplexResult {
  SimplexStatus status = SimplexStatus::IterationLimit;
  numerics::Vector x;      // N primal values
  numerics::Vector duals;  // m simplex multipliers, πᵀ A_B = c_B
  /// basic[j] is true when structural j ended in the basis.
  std::vector<bool> basic;
  double objective = 0.0;
  std::size_t iterations = 0;
};

SimplexResult solve(const BoundedLp& problem, const SimplexOptions& options = {});

}  // namespace sparsest::lp
