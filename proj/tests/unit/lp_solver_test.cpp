#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sparsest/errors.hpp"
#include "sparsest/lp_solver.hpp"
#include "sparsest/randomness.hpp"

namespace {

using namespace sparsest;
using lp::SolveStatus;
using numerics::Matrix;
using numerics::NormKind;
using numerics::Vector;

Matrix random_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  rng::Stream s(seed);
  return rng::gaussian_matrix(s, rows, cols);
}

TEST(L1Program, IdentityBasis) {
  const auto sol = lp::solve_l1_program(Matrix::identity(3), 1);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_EQ(sol.z, Vector::unit(3, 1));
  EXPECT_EQ(sol.objective, 1.0);
}

TEST(L1Program, SingleColumnOfOnes) {
  const auto sol = lp::solve_l1_program(Matrix::from_rows({{1}, {1}}), 0);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.x[0], 1.0, 1e-15);
  EXPECT_EQ(sol.z, (Vector{1, 1}));
  EXPECT_NEAR(sol.objective, 2.0, 1e-15);
}

TEST(L1Program, SingleColumnClosedForm) {
  const Matrix a = random_matrix(8, 9, 1);
  for (std::size_t i = 0; i < 9; ++i) {
    const auto sol = lp::solve_l1_program(a, i);
    ASSERT_EQ(sol.status, SolveStatus::Optimal);
    EXPECT_NEAR(sol.objective, numerics::norm(a.column(0), NormKind::L1) / std::abs(a(i, 0)), 1e-12 * sol.objective);
  }
}

TEST(L1Program, MatchesBasicFeasiblePointEnumeration) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix b = random_matrix(seed, 6, 3);
    const auto dense = oracle::to_dense(b);
    for (std::size_t i = 0; i < 6; ++i) {
      const auto sol = lp::solve_l1_program(b, i);
      ASSERT_EQ(sol.status, SolveStatus::Optimal);
      EXPECT_NEAR(sol.objective, oracle::l1_program_by_vertices(dense, i), 1e-6) << "seed " << seed << " i " << i;
    }
  }
}

TEST(L1Program, ZeroRowIsInfeasible) {
  Matrix b = random_matrix(2, 5, 2);
  b(3, 0) = 0.0;
  b(3, 1) = 0.0;
  EXPECT_EQ(lp::solve_l1_program(b, 3).status, SolveStatus::Infeasible);
}

TEST(L1Program, RejectsBadArguments) {
  EXPECT_THROW(lp::solve_l1_program(Matrix::identity(3), 3), ContractViolation);
  EXPECT_THROW(lp::solve_l1_program(Matrix(2, 3, 1.0), 0), ContractViolation);
  Matrix bad = Matrix::identity(2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(lp::solve_l1_program(bad, 0), ContractViolation);
}

TEST(L1Program, FullSpaceGivesCoordinateVector) {
  const Matrix b = random_matrix(4, 7, 7);
  for (std::size_t i = 0; i < 7; ++i) {
    const auto sol = lp::solve_l1_program(b, i);
    ASSERT_EQ(sol.status, SolveStatus::Optimal);
    EXPECT_EQ(sol.objective, 1.0);
  }
}

TEST(L1ProgramProperty, SolutionInvariants) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    rng::Stream s(seed);
    const std::size_t n = 4 + s.next_u64() % 20;
    const std::size_t d = 1 + s.next_u64() % std::min<std::size_t>(n, 6);
    const Matrix b = rng::gaussian_matrix(s, n, d);
    const std::size_t i = s.next_u64() % n;
    const auto sol = lp::solve_l1_program(b, i);
    ASSERT_EQ(sol.status, SolveStatus::Optimal);
    EXPECT_LE(std::abs(sol.z[i] - 1.0), lp::kFeasibilityTolerance);
    EXPECT_LE(std::abs(sol.objective - numerics::norm(sol.z, NormKind::L1)), 1e-8 * (1 + sol.objective));
    const Vector bx = numerics::matvec(b, sol.x);
    for (std::size_t r = 0; r < n; ++r) EXPECT_NEAR(bx[r], sol.z[r], 1e-9);
  }
}

// No single-coordinate move of x, pulled back onto (Bx)(i) = 1, improves
// the objective: a first-order check that the returned point is a minimum.
TEST(L1ProgramProperty, NoCoordinatePerturbationImproves) {
  const double eps = 1e-5;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Matrix b = random_matrix(seed * 3, 12, 4);
    const std::size_t i = seed % 12;
    const auto sol = lp::solve_l1_program(b, i);
    ASSERT_EQ(sol.status, SolveStatus::Optimal);
    for (std::size_t j = 0; j < 4; ++j) {
      for (double sign : {-1.0, 1.0}) {
        Vector x = sol.x;
        x[j] += sign * eps;
        const double pin = numerics::matvec(b, x)[i];
        if (std::abs(pin) < 1e-12) continue;
        x = numerics::scaled(x, 1.0 / pin);
        const double value = numerics::norm(numerics::matvec(b, x), NormKind::L1);
        EXPECT_GE(value, sol.objective - 1e-6);
      }
    }
  }
}

TEST(L1ProgramProperty, ScaleEquivariance) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix b = random_matrix(seed, 10, 3);
    Matrix cb = b;
    for (double& e : cb.data()) e *= 37.5;
    const auto base = lp::solve_l1_program(b, seed % 10);
    const auto scaled = lp::solve_l1_program(cb, seed % 10);
    EXPECT_NEAR(scaled.objective, base.objective, 1e-8 * base.objective);
  }
}

TEST(L1ProgramProperty, ColumnMixingInvariance) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix b = random_matrix(seed, 15, 4);
    const Matrix mix = random_matrix(seed + 500, 4, 4);
    const Matrix bm = numerics::matmul(b, mix);
    for (std::size_t i = 0; i < 15; i += 3) {
      const auto base = lp::solve_l1_program(b, i);
      const auto mixed = lp::solve_l1_program(bm, i);
      EXPECT_NEAR(mixed.objective, base.objective, 1e-7 * base.objective);
    }
  }
}

TEST(L1Program, RankDeficientBasisStillSolves) {
  Matrix b = random_matrix(6, 8, 3);
  for (std::size_t r = 0; r < 8; ++r) b(r, 2) = b(r, 0) - 2.0 * b(r, 1);
  const Matrix reduced = b.select_cols(std::vector<std::size_t>{0, 1});
  for (std::size_t i = 0; i < 8; ++i) {
    const auto full = lp::solve_l1_program(b, i);
    const auto thin = lp::solve_l1_program(reduced, i);
    ASSERT_EQ(full.status, SolveStatus::Optimal);
    EXPECT_NEAR(full.objective, thin.objective, 1e-9 * thin.objective);
  }
}

TEST(MinGain, SingleColumn) {
  const Matrix a = Matrix::from_rows({{1}, {-2}, {0.5}});
  EXPECT_NEAR(lp::min_l1_gain(a), 3.5, 1e-12);
}

TEST(MinGain, Identity) {
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_NEAR(lp::min_l1_gain(Matrix::identity(k)), 1.0, 1e-12);
}

TEST(MinGain, MatchesAngularGrid) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix a = random_matrix(seed, 5, 2);
    const double grid = oracle::gain_by_angle_grid(oracle::to_dense(a), 100000);
    const double exact = lp::min_l1_gain(a);
    EXPECT_LE(exact, grid * (1 + 1e-12));
    EXPECT_LE((grid - exact) / exact, 1e-3);
  }
}

TEST(MinGain, CapIsEnforced) {
  lp::GainOptions options;
  options.k_max = 3;
  EXPECT_THROW(lp::min_l1_gain(Matrix::identity(4), options), CapabilityError);
}

TEST(MinGainProperty, BoundedByEveryColumn) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix a = random_matrix(seed, 9, 3);
    const double gain = lp::min_l1_gain(a);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(gain, numerics::norm(a.column(j), NormKind::L1) * (1 + 1e-12));
  }
}

TEST(MinGainProperty, SignFlipsPermutationsAndScaling) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Matrix a = random_matrix(seed, 8, 3);
    const double gain = lp::min_l1_gain(a);
    Matrix flipped = a;
    for (std::size_t r = 0; r < 8; ++r) flipped(r, 1) = -flipped(r, 1);
    EXPECT_NEAR(lp::min_l1_gain(flipped), gain, 1e-9 * gain);
    const Matrix permuted = a.select_rows(std::vector<std::size_t>{7, 2, 5, 0, 1, 6, 4, 3});
    EXPECT_NEAR(lp::min_l1_gain(permuted), gain, 1e-9 * gain);
    Matrix scaled = a;
    for (double& e : scaled.data()) e *= -4.0;
    EXPECT_NEAR(lp::min_l1_gain(scaled), 4.0 * gain, 1e-9 * 4.0 * gain);
  }
}

TEST(MinGainProperty, WorkerCountDoesNotChangeTheAnswer) {
  const Matrix a = random_matrix(77, 20, 6);
  lp::GainOptions one;
  lp::GainOptions many;
  many.workers = 4;
  EXPECT_EQ(lp::min_l1_gain(a, one), lp::min_l1_gain(a, many));
}

TEST(MinGainLowerBound, Identity) {
  EXPECT_NEAR(lp::min_l1_gain_lower_bound(Matrix::identity(4)), 0.5, 1e-12);
}

TEST(MinGainLowerBound, DuplicatedColumnGivesZero) {
  Matrix a = random_matrix(3, 6, 2);
  for (std::size_t r = 0; r < 6; ++r) a(r, 1) = a(r, 0);
  EXPECT_NEAR(lp::min_l1_gain_lower_bound(a), 0.0, 1e-12);
}

TEST(MinGainLowerBoundProperty, NeverExceedsExactGain) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    rng::Stream s(seed);
    const std::size_t k = 1 + s.next_u64() % 4;
    const Matrix a = rng::gaussian_matrix(s, k + 3 + s.next_u64() % 10, k);
    EXPECT_LE(lp::min_l1_gain_lower_bound(a), lp::min_l1_gain(a) + 1e-9);
  }
}

}  // namespace
