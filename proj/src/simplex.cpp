#include "sparsest/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sparsest/errors.hpp"

namespace sparsest::lp {

using numerics::Matrix;
using numerics::Vector;

const char* to_string(SimplexStatus status) {
  switch (status) {
    case SimplexStatus::Optimal: return "optimal";
    case SimplexStatus::Infeasible: return "infeasible";
    case SimplexStatus::Unbounded: return "unbounded";
    case SimplexStatus::IterationLimit: return "iteration-limit";
    case SimplexStatus::SingularBasis: return "singular-basis";
  }
  return "unknown";
}

namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

enum class PhaseOutcome { Optimal, Unbounded, IterationLimit, Singular };

class RevisedSimplex {
 public:
  RevisedSimplex(const BoundedLp& p, const SimplexOptions& o)
      : a_(p.constraints),
        b_(p.rhs),
        opt_(o),
        m_(p.constraints.rows()),
        n_(p.constraints.cols()),
        total_(n_ + m_),
        lower_(total_, 0.0),
        upper_(total_, kInfinity),
        cost_(total_, 0.0),
        x_(total_, 0.0),
        art_sign_(m_, 1.0),
        state_(total_, VarState::AtLower),
        basis_(m_),
        binv_(m_ * m_, 0.0),
        alpha_(m_),
        pi_(m_) {
    max_iterations_ = opt_.max_iterations != 0 ? opt_.max_iterations : 50 * (m_ + n_);
    for (std::size_t j = 0; j < n_; ++j) {
      lower_[j] = p.lower[j];
      upper_[j] = p.upper[j];
      cost_[j] = p.cost[j];
    }
  }

  SimplexResult run() {
    initialize();

    // Phase 1: drive the artificials to zero.
    std::vector<double> phase1(total_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) phase1[n_ + r] = 1.0;
    PhaseOutcome outcome = iterate(phase1);
    if (outcome != PhaseOutcome::Optimal) return finish(outcome);

    double infeasibility = 0.0;
    for (std::size_t r = 0; r < m_; ++r) infeasibility += x_[n_ + r];
    double b_scale = 1.0;
    for (std::size_t r = 0; r < m_; ++r) b_scale = std::max(b_scale, std::abs(b_[r]));
    if (infeasibility > opt_.feasibility_tol * b_scale * static_cast<double>(std::max<std::size_t>(m_, 1))) {
      SimplexResult result = finish(PhaseOutcome::Optimal);
      result.status = SimplexStatus::Infeasible;
      return result;
    }

    for (std::size_t r = 0; r < m_; ++r) upper_[n_ + r] = 0.0;
    expel_artificials();
    if (!refactor()) return finish(PhaseOutcome::Singular);

    outcome = iterate(cost_);
    return finish(outcome);
  }

 private:
  double column_dot(std::size_t j, const std::vector<double>& v) const {
    if (j >= n_) return art_sign_[j - n_] * v[j - n_];
    auto c = a_.col(j);
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i) s += c[i] * v[i];
    return s;
  }

  // alpha_ = B⁻¹ a_j
  void ftran(std::size_t j) {
    if (j >= n_) {
      const std::size_t rr = j - n_;
      for (std::size_t r = 0; r < m_; ++r) alpha_[r] = binv_[r * m_ + rr] * art_sign_[rr];
      return;
    }
    auto c = a_.col(j);
    for (std::size_t r = 0; r < m_; ++r) {
      const double* row = &binv_[r * m_];
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += row[i] * c[i];
      alpha_[r] = s;
    }
  }

  void compute_duals(const std::vector<double>& cost) {
    std::fill(pi_.begin(), pi_.end(), 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = &binv_[r * m_];
      for (std::size_t i = 0; i < m_; ++i) pi_[i] += cb * row[i];
    }
  }

  void initialize() {
    std::vector<double> residual(b_.begin(), b_.end());
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lower_[j])) {
        x_[j] = lower_[j];
        state_[j] = VarState::AtLower;
      } else if (std::isfinite(upper_[j])) {
        x_[j] = upper_[j];
        state_[j] = VarState::AtUpper;
      } else {
        x_[j] = 0.0;
        state_[j] = VarState::FreeZero;
      }
      if (x_[j] != 0.0) {
        auto c = a_.col(j);
        for (std::size_t i = 0; i < m_; ++i) residual[i] -= c[i] * x_[j];
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      art_sign_[r] = residual[r] >= 0.0 ? 1.0 : -1.0;
      x_[n_ + r] = std::abs(residual[r]);
      state_[n_ + r] = VarState::Basic;
      basis_[r] = n_ + r;
      binv_[r * m_ + r] = art_sign_[r];
    }
  }

  // Rebuilds B⁻¹ by Gauss-Jordan with partial pivoting and recomputes the
  // basic values from the nonbasic ones.
  bool refactor() {
    since_refactor_ = 0;
    std::vector<double> work(m_ * m_, 0.0);  // row-major basis matrix
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t j = basis_[r];
      if (j >= n_) {
        work[(j - n_) * m_ + r] = art_sign_[j - n_];
      } else {
        auto c = a_.col(j);
        for (std::size_t i = 0; i < m_; ++i) work[i * m_ + r] = c[i];
      }
    }
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (std::size_t r = 0; r < m_; ++r) binv_[r * m_ + r] = 1.0;

    double scale = 0.0;
    for (double v : work) scale = std::max(scale, std::abs(v));
    const double singular_cut = 1e-13 * std::max(scale, 1.0);

    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = col;
      double best = std::abs(work[col * m_ + col]);
      for (std::size_t r = col + 1; r < m_; ++r) {
        const double v = std::abs(work[r * m_ + col]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best <= singular_cut) return false;
      if (piv != col) {
        for (std::size_t c = 0; c < m_; ++c) {
          std::swap(work[piv * m_ + c], work[col * m_ + c]);
          std::swap(binv_[piv * m_ + c], binv_[col * m_ + c]);
        }
      }
      const double inv = 1.0 / work[col * m_ + col];
      for (std::size_t c = 0; c < m_; ++c) {
        work[col * m_ + c] *= inv;
        binv_[col * m_ + c] *= inv;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = work[r * m_ + col];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < m_; ++c) {
          work[r * m_ + c] -= f * work[col * m_ + c];
          binv_[r * m_ + c] -= f * binv_[col * m_ + c];
        }
      }
    }

    std::vector<double> rhs(b_.begin(), b_.end());
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
      if (j >= n_) {
        rhs[j - n_] -= art_sign_[j - n_] * x_[j];
      } else {
        auto c = a_.col(j);
        for (std::size_t i = 0; i < m_; ++i) rhs[i] -= c[i] * x_[j];
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      const double* row = &binv_[r * m_];
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += row[i] * rhs[i];
      x_[basis_[r]] = s;
    }
    return true;
  }

  void pivot(std::size_t leave_row) {
    const double inv = 1.0 / alpha_[leave_row];
    double* prow = &binv_[leave_row * m_];
    for (std::size_t c = 0; c < m_; ++c) prow[c] *= inv;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == leave_row) continue;
      const double f = alpha_[r];
      if (f == 0.0) continue;
      double* row = &binv_[r * m_];
      for (std::size_t c = 0; c < m_; ++c) row[c] -= f * prow[c];
    }
    ++since_refactor_;
  }

  struct Entering {
    std::size_t column;
    double direction;  // +1 increase, -1 decrease
  };

  bool choose_entering(const std::vector<double>& cost, bool bland, Entering& out) const {
    double best = 0.0;
    bool found = false;
    for (std::size_t j = 0; j < total_; ++j) {
      const VarState s = state_[j];
      if (s == VarState::Basic) continue;
      if (upper_[j] == lower_[j]) continue;
      const double d = cost[j] - column_dot(j, pi_);
      double dir = 0.0;
      if (s == VarState::AtLower) {
        if (d < -opt_.optimality_tol) dir = 1.0;
      } else if (s == VarState::AtUpper) {
        if (d > opt_.optimality_tol) dir = -1.0;
      } else if (std::abs(d) > opt_.optimality_tol) {
        dir = d < 0.0 ? 1.0 : -1.0;
      }
      if (dir == 0.0) continue;
      if (bland) {
        out = {j, dir};
        return true;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        out = {j, dir};
        found = true;
      }
    }
    return found;
  }

  PhaseOutcome iterate(const std::vector<double>& cost) {
    std::size_t degenerate_run = 0;
    for (;;) {
      if (iterations_ >= max_iterations_) return PhaseOutcome::IterationLimit;
      if (since_refactor_ >= opt_.refactor_interval && !refactor()) return PhaseOutcome::Singular;

      compute_duals(cost);
      const bool bland = degenerate_run > opt_.stall_limit;
      Entering enter{};
      if (!choose_entering(cost, bland, enter)) return PhaseOutcome::Optimal;

      const std::size_t q = enter.column;
      const double dir = enter.direction;
      ftran(q);

      const double flip_range = upper_[q] - lower_[q];  // inf unless both bounds finite
      const std::size_t none = m_;
      std::size_t leave = none;
      double theta = kInfinity;
      bool leave_to_upper = false;

      auto exact_ratio = [&](std::size_t r, double rate) {
        const std::size_t j = basis_[r];
        if (rate < 0.0) return std::isfinite(lower_[j]) ? std::max(0.0, (x_[j] - lower_[j]) / -rate) : kInfinity;
        return std::isfinite(upper_[j]) ? std::max(0.0, (upper_[j] - x_[j]) / rate) : kInfinity;
      };

      if (bland) {
        std::size_t best_col = total_;
        for (std::size_t r = 0; r < m_; ++r) {
          if (std::abs(alpha_[r]) <= opt_.pivot_tol) continue;
          const double rate = -dir * alpha_[r];
          const double ratio = exact_ratio(r, rate);
          if (!std::isfinite(ratio)) continue;
          if (ratio < theta || (ratio == theta && basis_[r] < best_col)) {
            theta = ratio;
            leave = r;
            best_col = basis_[r];
            leave_to_upper = rate > 0.0;
          }
        }
      } else {
        // Harris: bound the step with tolerance-relaxed ratios, then take
        // the largest pivot among rows whose exact ratio fits under it.
        double relaxed = kInfinity;
        for (std::size_t r = 0; r < m_; ++r) {
          if (std::abs(alpha_[r]) <= opt_.pivot_tol) continue;
          const double rate = -dir * alpha_[r];
          const std::size_t j = basis_[r];
          double ratio = kInfinity;
          if (rate < 0.0 && std::isfinite(lower_[j])) {
            ratio = (x_[j] - lower_[j] + opt_.feasibility_tol) / -rate;
          } else if (rate > 0.0 && std::isfinite(upper_[j])) {
            ratio = (upper_[j] - x_[j] + opt_.feasibility_tol) / rate;
          }
          relaxed = std::min(relaxed, ratio);
        }
        if (std::isfinite(relaxed)) {
          double best_pivot = 0.0;
          for (std::size_t r = 0; r < m_; ++r) {
            if (std::abs(alpha_[r]) <= opt_.pivot_tol) continue;
            const double rate = -dir * alpha_[r];
            const double ratio = exact_ratio(r, rate);
            if (ratio <= relaxed && std::abs(alpha_[r]) > best_pivot) {
              best_pivot = std::abs(alpha_[r]);
              leave = r;
              theta = ratio;
              leave_to_upper = rate > 0.0;
            }
          }
        }
      }

      ++iterations_;
      if (flip_range <= theta) {
        if (!std::isfinite(flip_range)) return PhaseOutcome::Unbounded;
        // Entering variable runs to its opposite bound; basis unchanged.
        for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] += -dir * alpha_[r] * flip_range;
        if (dir > 0.0) {
          x_[q] = upper_[q];
          state_[q] = VarState::AtUpper;
        } else {
          x_[q] = lower_[q];
          state_[q] = VarState::AtLower;
        }
        degenerate_run = 0;
        continue;
      }
      if (leave == none) return PhaseOutcome::Unbounded;

      for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] += -dir * alpha_[r] * theta;
      x_[q] += dir * theta;
      const std::size_t out = basis_[leave];
      if (leave_to_upper) {
        x_[out] = upper_[out];
        state_[out] = VarState::AtUpper;
      } else {
        x_[out] = lower_[out];
        state_[out] = VarState::AtLower;
      }
      state_[q] = VarState::Basic;
      basis_[leave] = q;
      pivot(leave);

      degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;
    }
  }

  // After phase 1, swap zero-level artificials out of the basis wherever a
  // structural column can take their row. Rows where none can are redundant
  // and keep their (now fixed) artificial.
  void expel_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      const double* row = &binv_[r * m_];
      std::size_t best_j = total_;
      double best = 1e-9;
      for (std::size_t j = 0; j < n_; ++j) {
        if (state_[j] == VarState::Basic) continue;
        auto c = a_.col(j);
        double rho = 0.0;
        for (std::size_t i = 0; i < m_; ++i) rho += row[i] * c[i];
        if (std::abs(rho) > best) {
          best = std::abs(rho);
          best_j = j;
        }
      }
      if (best_j == total_) continue;
      ftran(best_j);
      const std::size_t out = basis_[r];
      x_[out] = 0.0;
      state_[out] = VarState::AtLower;
      state_[best_j] = VarState::Basic;
      basis_[r] = best_j;
      pivot(r);
    }
  }

  SimplexResult finish(PhaseOutcome outcome) {
    SimplexResult result;
    result.iterations = iterations_;
    switch (outcome) {
      case PhaseOutcome::Optimal: result.status = SimplexStatus::Optimal; break;
      case PhaseOutcome::Unbounded: result.status = SimplexStatus::Unbounded; break;
      case PhaseOutcome::IterationLimit: result.status = SimplexStatus::IterationLimit; break;
      case PhaseOutcome::Singular: result.status = SimplexStatus::SingularBasis; break;
    }
    if (outcome == PhaseOutcome::Optimal && !refactor()) result.status = SimplexStatus::SingularBasis;
    compute_duals(cost_);
    result.x = Vector(std::vector<double>(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_)));
    result.duals = Vector(std::vector<double>(pi_.begin(), pi_.end()));
    result.basic.assign(n_, false);
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] < n_) result.basic[basis_[r]] = true;
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
    result.objective = obj;
    return result;
  }

  const Matrix& a_;
  const Vector& b_;
  SimplexOptions opt_;
  std::size_t m_;
  std::size_t n_;
  std::size_t total_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> cost_;
  std::vector<double> x_;
  std::vector<double> art_sign_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  std::vector<double> binv_;  // row-major m × m
  std::vector<double> alpha_;
  std::vector<double> pi_;
  std::size_t iterations_ = 0;
  std::size_t max_iterations_ = 0;
  std::size_t since_refactor_ = 0;
};

}  // namespace

SimplexResult solve(const BoundedLp& problem, const SimplexOptions& options) {
  const std::size_t m = problem.constraints.rows();
  const std::size_t n = problem.constraints.cols();
  require(problem.rhs.size() == m, "simplex: rhs length must equal constraint rows");
  require(problem.cost.size() == n && problem.lower.size() == n && problem.upper.size() == n,
          "simplex: cost and bound vectors must match constraint columns");
  for (std::size_t j = 0; j < n; ++j) {
    require(!(problem.lower[j] > problem.upper[j]), "simplex: lower bound exceeds upper bound");
    require(problem.lower[j] != kInfinity && problem.upper[j] != -kInfinity,
            "simplex: bounds must admit a finite value");
  }
  require(numerics::all_finite(problem.constraints) && numerics::all_finite(problem.rhs) &&
              numerics::all_finite(problem.cost),
          "simplex: constraint data must be finite");
  RevisedSimplex engine(problem, options);
  return engine.run();
}

}  // namespace sparsest::lp
