#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sparsest/numerics.hpp"
#include "sparsest/randomness.hpp"

namespace sparsest::models {

using IndexSet = std::vector<std::size_t>;

/// v = 1_S + δ·u with u iid normal rescaled to ‖u‖₁ = 1.
struct TestVectorSpec {
  std::size_t n = 0;
  double delta = 0.0;
  IndexSet support;  // S, |S| = s, 0-based

  /// S = {0, …, s−1}.
  static TestVectorSpec leading(std::size_t n, std::size_t s, double delta);
  std::size_t s() const { return support.size(); }
};

numerics::Vector make_test_vector(const TestVectorSpec& spec, rng::Stream& stream);

/// One draw of the planted model. Only `w` is meant to reach the recovery
/// path; everything else is ground truth.
struct PlantedInstance {
  std::size_t n = 0;
  std::size_t k = 0;
  numerics::Vector v;       // planted vector
  numerics::Matrix vtilde;  // n × k, iid N(0, 1)
  numerics::Matrix mix;     // (k+1) × (k+1), invertible
  numerics::Matrix w;       // [v | vtilde] · mix
  std::size_t i_star = 0;   // lowest index attaining ‖v‖∞
  IndexSet support;         // indices of the s largest |v|, ascending

  /// [v | vtilde].
  numerics::Matrix unmixed() const;
};

inline constexpr double kMaxMixCondition = 1e3;

/// Lowest index among argmax |v(i)|.
std::size_t argmax_abs(const numerics::Vector& v);

/// Indices of the s largest |v(i)| (ties to the lower index), ascending.
IndexSet top_support(const numerics::Vector& v, std::size_t s);

/// Draws vtilde (column by column) and then, when `mixed`, Gaussian mixing
/// matrices until one has condition number ≤ 10³. `support_size` fixes |S|;
/// by default S is the exact support of v.
PlantedInstance planted_random(std::size_t n, std::size_t k, const numerics::Vector& v, rng::Stream& stream,
                               bool mixed = true, std::optional<std::size_t> support_size = std::nullopt);

/// n × k iid N(0, 1): a random subspace with nothing planted.
numerics::Matrix pure_random_basis(std::size_t n, std::size_t k, rng::Stream& stream);

/// Each entry independently: with probability θ a standard normal, else 0.
/// Entries are visited column by column; each draws one uniform for the
/// mask and, if kept, one normal.
numerics::Matrix bernoulli_gaussian(std::size_t rows, std::size_t cols, double theta, rng::Stream& stream);

/// diag(P_W), P_W the orthogonal projector onto range(W).
numerics::Vector projector_diagonal(const numerics::Matrix& w);

// Plain-text matrix format:
//   <rows> <cols>
//   one line per row, entries separated by spaces, 17 significant digits.
void write_matrix(std::ostream& out, const numerics::Matrix& m);
numerics::Matrix read_matrix(std::istream& in);

// Instance file: a `planted-instance 1` header line, a line
// `n <n> k <k> i_star <i>`, a line `support <s> <idx>...`, then the matrices
// v (n × 1), vtilde, mix and w in that order, each in the matrix format.
void write_instance(std::ostream& out, const PlantedInstance& instance);
PlantedInstance read_instance(std::istream& in);
void save_instance(const std::string& path, const PlantedInstance& instance);
PlantedInstance load_instance(const std::string& path);

}  // namespace sparsest::models
