#include "sparsest/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sparsest/errors.hpp"
#include "sparsest/parallel.hpp"

namespace sparsest::lp {

using numerics::Matrix;
using numerics::NormKind;
using numerics::Vector;

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

L1ProgramSolution failed(std::size_t n, std::size_t d, SolveStatus status, std::size_t iterations) {
  L1ProgramSolution out;
  out.x = Vector(d);
  out.z = Vector(n);
  out.objective = std::numeric_limits<double>::infinity();
  out.status = status;
  out.iterations = iterations;
  return out;
}

}  // namespace

L1ProgramSolution solve_l1_program(const Matrix& basis, std::size_t index) {
  const std::size_t n = basis.rows();
  const std::size_t d = basis.cols();
  require(d >= 1, "solve_l1_program: basis needs at least one column");
  require(d <= n, "solve_l1_program: basis has more columns than rows");
  require(index < n, "solve_l1_program: normalization index " + std::to_string(index) +
                         " out of range for " + std::to_string(n) + " rows");
  require(numerics::all_finite(basis), "solve_l1_program: basis entries must be finite");

  const Vector pinned = basis.row(index);
  if (numerics::norm(pinned, NormKind::Linf) == 0.0) return failed(n, d, SolveStatus::Infeasible, 0);

  // Dual of the epigraph LP: columns y_0..y_{n-1} then μ; one row per basis column.
  BoundedLp dual;
  dual.constraints = Matrix(d, n + 1);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t r = 0; r < d; ++r) dual.constraints(r, j) = basis(j, r);
  for (std::size_t r = 0; r < d; ++r) dual.constraints(r, n) = -pinned[r];
  dual.rhs = Vector(d);
  dual.cost = Vector(n + 1);
  dual.cost[n] = -1.0;
  dual.lower = Vector(n + 1, -1.0);
  dual.upper = Vector(n + 1, 1.0);
  dual.lower[n] = -kInfinity;
  dual.upper[n] = kInfinity;

  SimplexOptions options;
  options.max_iterations = 50 * (n + d);
  const SimplexResult result = solve(dual, options);

  switch (result.status) {
    case SimplexStatus::Optimal: break;
    case SimplexStatus::Unbounded: return failed(n, d, SolveStatus::Infeasible, result.iterations);
    default: return failed(n, d, SolveStatus::NumericalFailure, result.iterations);
  }

  L1ProgramSolution out;
  out.iterations = result.iterations;
  out.x = result.duals;
  Vector z = numerics::matvec(basis, out.x);
  const double pinned_value = z[index];
  if (!(std::abs(pinned_value - 1.0) <= 1e-6)) {
    return failed(n, d, SolveStatus::NumericalFailure, result.iterations);
  }
  for (double& v : out.x) v /= pinned_value;
  z = numerics::matvec(basis, out.x);

  // Basic y_j marks an epigraph row with t_j = |(Bx)_j| = 0.
  const double snap = 1e-9 * std::max(1.0, numerics::norm(z, NormKind::Linf));
  for (std::size_t j = 0; j < n; ++j) {
    if (j != index && result.basic[j] && std::abs(z[j]) <= snap) z[j] = 0.0;
  }
  z[index] = 1.0;
  out.z = std::move(z);
  out.objective = numerics::norm(out.z, NormKind::L1);

  const double dual_value = result.x[n];
  if (!(std::abs(out.objective - dual_value) <= kOptimalityGap * (1.0 + out.objective)) ||
      !numerics::all_finite(out.x)) {
    return failed(n, d, SolveStatus::NumericalFailure, result.iterations);
  }
  out.status = SolveStatus::Optimal;
  return out;
}

namespace {

// min ‖A diag(σ) w‖₁ over the probability simplex, via its dual
//   max μ  s.t. σ_c (Aᵀy)_c − μ − s_c = 0,  |y| ≤ 1,  s ≥ 0.
double face_minimum(const Matrix& a, std::uint64_t sign_bits) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  BoundedLp lp;
  lp.constraints = Matrix(k, n + 1 + k);
  for (std::size_t c = 0; c < k; ++c) {
    const double sigma = (c > 0 && ((sign_bits >> (c - 1)) & 1U)) ? -1.0 : 1.0;
    auto col = a.col(c);
    for (std::size_t j = 0; j < n; ++j) lp.constraints(c, j) = sigma * col[j];
    lp.constraints(c, n) = -1.0;
    lp.constraints(c, n + 1 + c) = -1.0;
  }
  lp.rhs = Vector(k);
  lp.cost = Vector(n + 1 + k);
  lp.cost[n] = -1.0;
  lp.lower = Vector(n + 1 + k, 0.0);
  lp.upper = Vector(n + 1 + k, kInfinity);
  for (std::size_t j = 0; j < n; ++j) {
    lp.lower[j] = -1.0;
    lp.upper[j] = 1.0;
  }
  lp.lower[n] = -kInfinity;

  SimplexOptions options;
  options.max_iterations = 50 * (n + 1 + 2 * k);
  const SimplexResult result = solve(lp, options);
  if (result.status != SimplexStatus::Optimal) {
    throw NumericalFailure(std::string("min_l1_gain: face LP ended with status ") +
                           to_string(result.status));
  }
  return std::max(0.0, result.x[n]);
}

}  // namespace

double min_l1_gain(const Matrix& a, const GainOptions& options) {
  const std::size_t k = a.cols();
  require(k >= 1 && a.rows() >= 1, "min_l1_gain: matrix must be non-empty");
  require(numerics::all_finite(a), "min_l1_gain: entries must be finite");
  if (k > options.k_max) {
    throw CapabilityError("min_l1_gain: k = " + std::to_string(k) + " exceeds the exact-enumeration cap " +
                          std::to_string(options.k_max) + "; use min_l1_gain_lower_bound");
  }
  const std::size_t faces = std::size_t{1} << (k - 1);
  std::vector<double> values(faces);
  parallel_for(faces, options.workers, [&](std::size_t f) { values[f] = face_minimum(a, f); });
  return *std::min_element(values.begin(), values.end());
}

double min_l1_gain_lower_bound(const Matrix& a) {
  const auto bounds = numerics::extreme_singular_values(a);
  return bounds.min / std::sqrt(static_cast<double>(a.cols()));
}

}  // namespace sparsest::lp
