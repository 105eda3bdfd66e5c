#include "sparsest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sparsest/errors.hpp"

namespace sparsest::numerics {

Vector Vector::unit(std::size_t n, std::size_t i) {
  require(i < n, "unit vector index out of range");
  Vector e(n);
  e[i] = 1.0;
  return e;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t d = n == 0 ? 0 : rows.begin()->size();
  Matrix m(n, d);
  std::size_t i = 0;
  for (const auto& row : rows) {
    require(row.size() == d, "ragged row in matrix literal");
    std::size_t j = 0;
    for (double value : row) m(i, j++) = value;
    ++i;
  }
  return m;
}

Matrix Matrix::from_columns(std::span<const Vector> columns) {
  if (columns.empty()) return {};
  const std::size_t n = columns.front().size();
  Matrix m(n, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    require(columns[j].size() == n, "columns of unequal length");
    std::copy(columns[j].begin(), columns[j].end(), m.col(j).begin());
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::column(std::size_t j) const {
  require(j < cols_, "column index out of range");
  auto c = col(j);
  return Vector(std::vector<double>(c.begin(), c.end()));
}

Vector Matrix::row(std::size_t i) const {
  require(i < rows_, "row index out of range");
  Vector r(cols_);
  for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
  return r;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix m(indices.size(), cols_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    require(indices[r] < rows_, "row index out of range");
    for (std::size_t j = 0; j < cols_; ++j) m(r, j) = (*this)(indices[r], j);
  }
  return m;
}

Matrix Matrix::select_cols(std::span<const std::size_t> indices) const {
  Matrix m(rows_, indices.size());
  for (std::size_t c = 0; c < indices.size(); ++c) {
    require(indices[c] < cols_, "column index out of range");
    std::copy_n(col(indices[c]).begin(), rows_, m.col(c).begin());
  }
  return m;
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> x, NormKind kind) {
  switch (kind) {
    case NormKind::L1: {
      double s = 0.0;
      for (double v : x) s += std::abs(v);
      return s;
    }
    case NormKind::L2: {
      // Scaled accumulation keeps tiny and huge entries from under/overflowing.
      double scale = 0.0;
      for (double v : x) scale = std::max(scale, std::abs(v));
      if (scale == 0.0) return 0.0;
      double s = 0.0;
      for (double v : x) {
        const double r = v / scale;
        s += r * r;
      }
      return scale * std::sqrt(s);
    }
    case NormKind::Linf: {
      double m = 0.0;
      for (double v : x) m = std::max(m, std::abs(v));
      return m;
    }
  }
  return 0.0;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) {
    throw ContractViolation("matvec: matrix has " + std::to_string(a.cols()) +
                            " columns but vector has length " + std::to_string(x.size()));
  }
  Vector y(a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    auto c = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += c[i] * xj;
  }
  return y;
}

Vector matvec_transposed(const Matrix& a, const Vector& y) {
  require(a.rows() == y.size(), "matvec_transposed: dimension mismatch");
  Vector x(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) x[j] = dot(a.col(j), y.span());
  return x;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto out = c.col(j);
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double bpj = b(p, j);
      if (bpj == 0.0) continue;
      auto ap = a.col(p);
      for (std::size_t i = 0; i < a.rows(); ++i) out[i] += ap[i] * bpj;
    }
  }
  return c;
}

Vector axpy(double alpha, const Vector& x, const Vector& y) {
  require(x.size() == y.size(), "axpy: length mismatch");
  Vector r(y);
  for (std::size_t i = 0; i < x.size(); ++i) r[i] += alpha * x[i];
  return r;
}

Vector scaled(const Vector& x, double alpha) {
  Vector r(x);
  for (double& v : r) v *= alpha;
  return r;
}

Vector subtract(const Vector& x, const Vector& y) { return axpy(-1.0, y, x); }

double l1_operator_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) best = std::max(best, norm(a.col(j), NormKind::L1));
  return best;
}

ThinSvd thin_svd(const Matrix& a, int max_sweeps) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  Matrix u = a;
  Matrix v = Matrix::identity(k);

  // Rotate column pairs until every pair is orthogonal to working precision.
  constexpr double kOrthTol = 1e-15;
  bool converged = k < 2;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        auto up = u.col(p);
        auto uq = u.col(q);
        const double alpha = dot(up, up);
        const double beta = dot(uq, uq);
        const double gamma = dot(up, uq);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kOrthTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double x = up[i];
          const double y = uq[i];
          up[i] = c * x - s * y;
          uq[i] = s * x + c * y;
        }
        auto vp = v.col(p);
        auto vq = v.col(q);
        for (std::size_t i = 0; i < k; ++i) {
          const double x = vp[i];
          const double y = vq[i];
          vp[i] = c * x - s * y;
          vq[i] = s * x + c * y;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    throw NumericalFailure("thin_svd: Jacobi sweeps did not converge within " +
                           std::to_string(max_sweeps) + " sweeps");
  }

  std::vector<double> sigma(k);
  for (std::size_t j = 0; j < k; ++j) sigma[j] = norm(u.col(j), NormKind::L2);
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const std::size_t r = std::min(n, k);
  ThinSvd out{Matrix(n, r), Vector(r), Matrix(k, r)};
  for (std::size_t c = 0; c < r; ++c) {
    const std::size_t j = order[c];
    out.sigma[c] = sigma[j];
    auto src = u.col(j);
    auto dst = out.u.col(c);
    if (sigma[j] > 0.0) {
      for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] / sigma[j];
    }
    std::copy_n(v.col(j).begin(), k, out.v.col(c).begin());
  }
  return out;
}

SingularValueBounds extreme_singular_values(const Matrix& a) {
  require(a.cols() >= 1, "extreme_singular_values: need at least one column");
  require(a.cols() <= a.rows(), "extreme_singular_values: requires cols <= rows");
  const ThinSvd svd = thin_svd(a);
  return {svd.sigma[svd.sigma.size() - 1], svd.sigma[0]};
}

namespace {

std::size_t numerical_rank(const Vector& sigma) {
  if (sigma.empty() || sigma[0] == 0.0) return 0;
  const double cut = kRankTolerance * sigma[0];
  std::size_t r = 0;
  while (r < sigma.size() && sigma[r] > cut) ++r;
  return r;
}

}  // namespace

Matrix orthonormal_basis(const Matrix& a) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  const ThinSvd svd = thin_svd(a);
  const std::size_t r = numerical_rank(svd.sigma);
  Matrix q(a.rows(), r);
  for (std::size_t c = 0; c < r; ++c) std::copy_n(svd.u.col(c).begin(), a.rows(), q.col(c).begin());
  return q;
}

Vector least_squares(const Matrix& a, const Vector& b) {
  require(a.rows() == b.size(), "least_squares: dimension mismatch");
  const ThinSvd svd = thin_svd(a);
  const std::size_t r = numerical_rank(svd.sigma);
  Vector x(a.cols());
  for (std::size_t c = 0; c < r; ++c) {
    const double coeff = dot(svd.u.col(c), b.span()) / svd.sigma[c];
    auto vc = svd.v.col(c);
    for (std::size_t j = 0; j < a.cols(); ++j) x[j] += coeff * vc[j];
  }
  return x;
}

double condition_number(const Matrix& a) {
  const auto bounds = extreme_singular_values(a);
  if (bounds.min == 0.0) return std::numeric_limits<double>::infinity();
  return bounds.max / bounds.min;
}

}  // namespace sparsest::numerics
