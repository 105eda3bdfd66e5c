#include "sparsest/subspace_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sparsest/errors.hpp"

namespace sparsest::models {

using numerics::Matrix;
using numerics::NormKind;
using numerics::Vector;

TestVectorSpec TestVectorSpec::leading(std::size_t n, std::size_t s, double delta) {
  TestVectorSpec spec;
  spec.n = n;
  spec.delta = delta;
  spec.support.resize(s);
  std::iota(spec.support.begin(), spec.support.end(), std::size_t{0});
  return spec;
}

Vector make_test_vector(const TestVectorSpec& spec, rng::Stream& stream) {
  require(spec.n >= 1, "make_test_vector: n must be positive");
  require(spec.s() >= 1 && spec.s() <= spec.n, "make_test_vector: need 1 <= s <= n");
  require(spec.delta >= 0.0 && std::isfinite(spec.delta), "make_test_vector: delta must be finite and >= 0");
  Vector v(spec.n);
  for (std::size_t idx : spec.support) {
    require(idx < spec.n, "make_test_vector: support index out of range");
    require(v[idx] == 0.0, "make_test_vector: duplicate support index");
    v[idx] = 1.0;
  }
  if (spec.delta == 0.0) return v;
  Vector g = rng::gaussian_vector(stream, spec.n);
  const double scale = spec.delta / numerics::norm(g, NormKind::L1);
  for (std::size_t i = 0; i < spec.n; ++i) v[i] += scale * g[i];
  return v;
}

Matrix PlantedInstance::unmixed() const {
  Matrix m(n, k + 1);
  std::copy(v.begin(), v.end(), m.col(0).begin());
  for (std::size_t j = 0; j < k; ++j) std::copy_n(vtilde.col(j).begin(), n, m.col(j + 1).begin());
  return m;
}

std::size_t argmax_abs(const Vector& v) {
  require(!v.empty(), "argmax_abs: empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  return best;
}

IndexSet top_support(const Vector& v, std::size_t s) {
  require(s <= v.size(), "top_support: s exceeds vector length");
  IndexSet order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(v[a]) > std::abs(v[b]); });
  order.resize(s);
  std::sort(order.begin(), order.end());
  return order;
}

PlantedInstance planted_random(std::size_t n, std::size_t k, const Vector& v, rng::Stream& stream, bool mixed,
                               std::optional<std::size_t> support_size) {
  require(v.size() == n, "planted_random: v must have length n");
  require(k >= 1 && k + 1 <= n, "planted_random: need 1 <= k <= n - 1");
  require(numerics::all_finite(v), "planted_random: v must be finite");
  require(numerics::norm(v, NormKind::Linf) > 0.0, "planted_random: v must be nonzero");

  PlantedInstance inst;
  inst.n = n;
  inst.k = k;
  inst.v = v;
  inst.vtilde = rng::gaussian_matrix(stream, n, k);
  if (mixed) {
    // Resample until well conditioned; Gaussian (k+1)² matrices pass quickly.
    for (;;) {
      inst.mix = rng::gaussian_matrix(stream, k + 1, k + 1);
      if (numerics::condition_number(inst.mix) <= kMaxMixCondition) break;
    }
  } else {
    inst.mix = Matrix::identity(k + 1);
  }
  inst.w = mixed ? numerics::matmul(inst.unmixed(), inst.mix) : inst.unmixed();
  inst.i_star = argmax_abs(v);
  std::size_t s = 0;
  if (support_size) {
    s = *support_size;
    require(s >= 1 && s <= n, "planted_random: support size must lie in 1..n");
  } else {
    s = static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }));
  }
  inst.support = top_support(v, s);
  return inst;
}

Matrix pure_random_basis(std::size_t n, std::size_t k, rng::Stream& stream) {
  require(k >= 1 && k <= n, "pure_random_basis: need 1 <= k <= n");
  return rng::gaussian_matrix(stream, n, k);
}

Matrix bernoulli_gaussian(std::size_t rows, std::size_t cols, double theta, rng::Stream& stream) {
  require(theta > 0.0 && theta <= 1.0, "bernoulli_gaussian: theta must lie in (0, 1]");
  Matrix m(rows, cols);
  for (double& entry : m.data()) {
    if (stream.uniform() < theta) entry = stream.standard_normal();
  }
  return m;
}

Vector projector_diagonal(const Matrix& w) {
  const Matrix q = numerics::orthonormal_basis(w);
  Vector diag(w.rows());
  for (std::size_t c = 0; c < q.cols(); ++c) {
    auto col = q.col(c);
    for (std::size_t i = 0; i < w.rows(); ++i) diag[i] += col[i] * col[i];
  }
  for (double& d : diag) d = std::clamp(d, 0.0, 1.0);
  return diag;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(in >> rows >> cols)) throw ParseError("matrix: missing '<rows> <cols>' header");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (!(in >> m(i, j))) {
        throw ParseError("matrix: expected " + std::to_string(rows * cols) + " entries, ran out at row " +
                         std::to_string(i) + " column " + std::to_string(j));
      }
    }
  }
  return m;
}

void write_instance(std::ostream& out, const PlantedInstance& inst) {
  out << "planted-instance 1\n";
  out << "n " << inst.n << " k " << inst.k << " i_star " << inst.i_star << '\n';
  out << "support " << inst.support.size();
  for (std::size_t idx : inst.support) out << ' ' << idx;
  out << '\n';
  Matrix v(inst.n, 1);
  std::copy(inst.v.begin(), inst.v.end(), v.col(0).begin());
  write_matrix(out, v);
  write_matrix(out, inst.vtilde);
  write_matrix(out, inst.mix);
  write_matrix(out, inst.w);
}

PlantedInstance read_instance(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "planted-instance" || version != 1) {
    throw ParseError("instance: expected header 'planted-instance 1'");
  }
  PlantedInstance inst;
  std::string kn, kk, ki;
  if (!(in >> kn >> inst.n >> kk >> inst.k >> ki >> inst.i_star) || kn != "n" || kk != "k" || ki != "i_star") {
    throw ParseError("instance: malformed 'n <n> k <k> i_star <i>' line");
  }
  std::string ks;
  std::size_t s = 0;
  if (!(in >> ks >> s) || ks != "support") throw ParseError("instance: malformed support line");
  inst.support.resize(s);
  for (auto& idx : inst.support)
    if (!(in >> idx)) throw ParseError("instance: truncated support list");
  const Matrix v = read_matrix(in);
  inst.vtilde = read_matrix(in);
  inst.mix = read_matrix(in);
  inst.w = read_matrix(in);
  if (v.rows() != inst.n || v.cols() != 1 || inst.vtilde.rows() != inst.n || inst.vtilde.cols() != inst.k ||
      inst.mix.rows() != inst.k + 1 || inst.mix.cols() != inst.k + 1 || inst.w.rows() != inst.n ||
      inst.w.cols() != inst.k + 1) {
    throw ParseError("instance: matrix shapes disagree with the declared n and k");
  }
  inst.v = v.column(0);
  return inst;
}

void save_instance(const std::string& path, const PlantedInstance& instance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_instance(out, instance);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

PlantedInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return read_instance(in);
}

}  // namespace sparsest::models
