#include "sparsest/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sparsest/errors.hpp"
#include "sparsest/parallel.hpp"

namespace sparsest::recovery {

using numerics::Matrix;
using numerics::NormKind;
using numerics::Vector;

std::string_view selector_name(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::Oracle: return "oracle";
    case SelectorKind::L1OverLinf: return "l1linf";
    case SelectorKind::L1OverL2: return "l1l2";
    case SelectorKind::ThresholdedL0: return "thresh-l0";
    case SelectorKind::StrictL0: return "strict-l0";
  }
  return "unknown";
}

SelectorSpec parse_selector(std::string_view name, double epsilon, double zero_tol) {
  require(epsilon > 0.0, "selector epsilon must be positive");
  require(zero_tol > 0.0, "selector zero tolerance must be positive");
  for (SelectorKind kind : {SelectorKind::Oracle, SelectorKind::L1OverLinf, SelectorKind::L1OverL2,
                            SelectorKind::ThresholdedL0, SelectorKind::StrictL0}) {
    if (selector_name(kind) == name) return {kind, epsilon, zero_tol};
  }
  throw ContractViolation("unknown selector '" + std::string(name) +
                          "' (expected oracle, l1linf, l1l2, thresh-l0 or strict-l0)");
}

std::vector<CandidateSolution> recover_all(const Matrix& w, std::size_t workers) {
  require(numerics::all_finite(w), "recover_all: basis entries must be finite");
  require(w.cols() <= w.rows(), "recover_all: basis has more columns than rows");
  std::vector<CandidateSolution> candidates(w.rows());
  parallel_for(w.rows(), workers, [&](std::size_t i) {
    candidates[i].index = i;
    candidates[i].solution = lp::solve_l1_program(w, i);
  });
  return candidates;
}

double sparsity_score(const Vector& z, const SelectorSpec& selector) {
  switch (selector.kind) {
    case SelectorKind::Oracle:
      throw ContractViolation("sparsity_score: the oracle selector has no score");
    case SelectorKind::L1OverLinf:
    case SelectorKind::L1OverL2: {
      const double denom = numerics::norm(z, selector.kind == SelectorKind::L1OverLinf ? NormKind::Linf : NormKind::L2);
      if (denom == 0.0) throw ContractViolation("sparsity_score: ratio measures are undefined at z = 0");
      return numerics::norm(z, NormKind::L1) / denom;
    }
    case SelectorKind::ThresholdedL0:
      return static_cast<double>(
          std::count_if(z.begin(), z.end(), [&](double x) { return std::abs(x) >= selector.epsilon; }));
    case SelectorKind::StrictL0:
      return static_cast<double>(
          std::count_if(z.begin(), z.end(), [&](double x) { return std::abs(x) > selector.zero_tol; }));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Selection select(const std::vector<CandidateSolution>& candidates, const SelectorSpec& selector,
                 std::optional<std::size_t> oracle_index) {
  Selection out;
  out.scores.assign(candidates.size(), std::numeric_limits<double>::quiet_NaN());

  if (selector.kind == SelectorKind::Oracle) {
    require(oracle_index.has_value(), "select: the oracle selector needs an oracle index");
    auto it = std::find_if(candidates.begin(), candidates.end(),
                           [&](const CandidateSolution& c) { return c.index == *oracle_index; });
    if (it == candidates.end()) throw SelectionFailure("select: no candidate at the oracle index");
    if (!it->optimal()) {
      throw SelectionFailure(std::string("select: oracle candidate is ") + lp::to_string(it->solution.status));
    }
    out.chosen_index = it->index;
    out.z_hat = it->solution.z;
    return out;
  }

  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (!candidates[c].optimal()) continue;
    out.scores[c] = sparsity_score(candidates[c].solution.z, selector);
    if (!best || out.scores[c] < out.scores[*best] ||
        (out.scores[c] == out.scores[*best] && candidates[c].index < candidates[*best].index)) {
      best = c;
    }
  }
  if (!best) throw SelectionFailure("select: no candidate solved to optimality");
  out.chosen_index = candidates[*best].index;
  out.z_hat = candidates[*best].solution.z;
  return out;
}

SuccessCheck evaluate_success(const Vector& z_hat, const Vector& v, double tau) {
  require(z_hat.size() == v.size(), "evaluate_success: length mismatch");
  const std::size_t i_star = models::argmax_abs(v);
  const double peak = v[i_star];
  require(peak != 0.0, "evaluate_success: v must be nonzero");
  Vector diff(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) diff[i] = z_hat[i] - v[i] / peak;
  SuccessCheck out;
  out.error = numerics::norm(diff, NormKind::L2);
  out.success = out.error <= tau;
  return out;
}

TrialOutcome run_selector(const std::vector<CandidateSolution>& candidates, const SelectorSpec& selector,
                          const Vector& v, double tau) {
  const std::optional<std::size_t> oracle =
      selector.kind == SelectorKind::Oracle ? std::optional<std::size_t>(models::argmax_abs(v)) : std::nullopt;
  Selection chosen = select(candidates, selector, oracle);
  const SuccessCheck check = evaluate_success(chosen.z_hat, v, tau);
  TrialOutcome out;
  out.chosen_index = chosen.chosen_index;
  out.z_hat = std::move(chosen.z_hat);
  out.error = check.error;
  out.success = check.success;
  out.per_candidate_scores = std::move(chosen.scores);
  return out;
}

double necessary_condition_value(const Matrix& vtilde, std::size_t i_star) {
  require(i_star < vtilde.rows(), "necessary_condition_value: i* out of range");
  const auto solution = lp::solve_l1_program(vtilde, i_star);
  switch (solution.status) {
    case lp::SolveStatus::Optimal: return solution.objective;
    case lp::SolveStatus::Infeasible:
      throw ContractViolation("necessary_condition_value: row i* of vtilde is zero, program infeasible");
    case lp::SolveStatus::NumericalFailure: break;
  }
  throw NumericalFailure("necessary_condition_value: LP solve failed");
}

namespace {

struct SplitRows {
  Matrix on_support;
  Matrix off_support;
  double a_inf = 0.0;
  Vector normalized_v;
  models::IndexSet complement;
};

SplitRows split_certificate_rows(const Vector& v, const Matrix& vtilde, const models::IndexSet& support,
                                 const CertificateOptions& options) {
  const std::size_t n = v.size();
  require(vtilde.rows() == n, "certificate: vtilde must have one row per entry of v");
  require(vtilde.cols() >= 1, "certificate: vtilde needs at least one column");
  require(!support.empty(), "certificate: support set must be non-empty");
  if (vtilde.cols() > options.gain.k_max) {
    throw CapabilityError("certificate: k = " + std::to_string(vtilde.cols()) +
                          " exceeds the exact-gain cap " + std::to_string(options.gain.k_max));
  }
  std::vector<bool> in_support(n, false);
  for (std::size_t idx : support) {
    require(idx < n, "certificate: support index out of range");
    require(!in_support[idx], "certificate: duplicate support index");
    in_support[idx] = true;
  }
  SplitRows out;
  const std::size_t i_star = models::argmax_abs(v);
  require(v[i_star] != 0.0, "certificate: v must be nonzero");
  out.normalized_v = numerics::scaled(v, 1.0 / v[i_star]);
  for (std::size_t i = 0; i < n; ++i)
    if (!in_support[i]) out.complement.push_back(i);
  out.on_support = vtilde.select_rows(support);
  out.off_support = vtilde.select_rows(out.complement);
  out.a_inf = numerics::norm(vtilde.row(i_star), NormKind::Linf);
  return out;
}

}  // namespace

bool certify_exact(const Vector& v, const Matrix& vtilde, const models::IndexSet& support,
                   const CertificateOptions& options) {
  const SplitRows rows = split_certificate_rows(v, vtilde, support, options);
  for (std::size_t i : rows.complement) {
    require(rows.normalized_v[i] == 0.0, "certify_exact: supp(v) must lie inside S");
  }
  if (rows.complement.empty()) return false;
  const double s = static_cast<double>(support.size());
  if (numerics::l1_operator_norm(rows.on_support) > 2.0 * s) return false;
  return lp::min_l1_gain(rows.off_support, options.gain) >= (2.0 * rows.a_inf + 2.0) * s;
}

std::optional<StabilityBounds> certify_stable(const Vector& v, const Matrix& vtilde,
                                              const models::IndexSet& support, double alpha,
                                              const CertificateOptions& options) {
  require(alpha > 0.0 && std::isfinite(alpha), "certify_stable: alpha must be positive");
  const SplitRows rows = split_certificate_rows(v, vtilde, support, options);

  double min_on = std::numeric_limits<double>::infinity();
  for (std::size_t i : support) min_on = std::min(min_on, std::abs(rows.normalized_v[i]));
  double tail = 0.0;
  double max_off = 0.0;
  for (std::size_t i : rows.complement) {
    tail += std::abs(rows.normalized_v[i]);
    max_off = std::max(max_off, std::abs(rows.normalized_v[i]));
  }
  require(min_on >= max_off, "certify_stable: S must index a best |S|-term approximation of v");

  if (rows.complement.empty()) return std::nullopt;
  const double s = static_cast<double>(support.size());
  if (numerics::l1_operator_norm(rows.on_support) > 2.0 * s) return std::nullopt;
  if (lp::min_l1_gain(rows.off_support, options.gain) < (2.0 * rows.a_inf + 2.0 + alpha) * s) return std::nullopt;
  StabilityBounds bounds;
  bounds.tail_mass = tail;
  bounds.coefficient_bound = 2.0 * tail / s;
  bounds.tail_bound = 2.0 * tail / (s * (rows.a_inf + alpha));
  return bounds;
}

models::IndexSet diagonal_threshold_support(const Matrix& w, std::size_t s) {
  require(s >= 1 && s <= w.rows(), "diagonal_threshold_support: need 1 <= s <= n");
  return models::top_support(models::projector_diagonal(w), s);
}

}  // namespace sparsest::recovery
