#pragma once

// Dense real linear algebra for desk-scale problems (dimensions up to ~10^3).
//
// Matrices are stored column-major: entry (i, j) lives at data[i + j * rows].
// Columns are therefore contiguous and exposed as spans.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sparsest::numerics {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  const std::vector<double>& values() const { return data_; }

  static Vector unit(std::size_t n, std::size_t i);
  static Vector ones(std::size_t n) { return Vector(n, 1.0); }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> data_;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Row-major nested initializer, the natural way to write a literal.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_columns(std::span<const Vector> columns);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  Vector column(std::size_t j) const;
  Vector row(std::size_t i) const;

  Matrix transpose() const;
  Matrix select_rows(std::span<const std::size_t> indices) const;
  Matrix select_cols(std::span<const std::size_t> indices) const;

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class NormKind { L1, L2, Linf };

bool all_finite(std::span<const double> values);
inline bool all_finite(const Vector& x) { return all_finite(x.span()); }
inline bool all_finite(const Matrix& a) { return all_finite(a.data()); }

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> x, NormKind kind);
inline double norm(const Vector& x, NormKind kind) { return norm(x.span(), kind); }

Vector matvec(const Matrix& a, const Vector& x);
/// Aᵀ y without materializing the transpose.
Vector matvec_transposed(const Matrix& a, const Vector& y);
Matrix matmul(const Matrix& a, const Matrix& b);

Vector axpy(double alpha, const Vector& x, const Vector& y);  // alpha*x + y
Vector scaled(const Vector& x, double alpha);
Vector subtract(const Vector& x, const Vector& y);

/// max_j ‖A e_j‖₁, the ℓ1→ℓ1 operator norm.
double l1_operator_norm(const Matrix& a);

struct SingularValueBounds {
  double min = 0.0;
  double max = 0.0;
};

/// Thin SVD A = U diag(sigma) Vᵀ with sigma sorted descending.
struct ThinSvd {
  Matrix u;      // rows × r
  Vector sigma;  // r
  Matrix v;      // cols × r
};

/// One-sided (Hestenes) Jacobi: implicit cyclic Jacobi on AᵀA applied to the
/// columns of A. Throws NumericalFailure if `max_sweeps` sweeps do not
/// converge.
ThinSvd thin_svd(const Matrix& a, int max_sweeps = 100);

/// Smallest and largest singular values of a tall matrix (cols ≤ rows).
SingularValueBounds extreme_singular_values(const Matrix& a);

/// Orthonormal basis of range(A); rank cut at 1e-10·σmax.
Matrix orthonormal_basis(const Matrix& a);

inline constexpr double kRankTolerance = 1e-10;

/// Minimum-norm least-squares solution of A x ≈ b.
Vector least_squares(const Matrix& a, const Vector& b);

/// σmax/σmin for a square or tall matrix (infinity when rank deficient).
double condition_number(const Matrix& a);

}  // namespace sparsest::numerics
