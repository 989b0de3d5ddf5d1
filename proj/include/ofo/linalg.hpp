#pragma once

// Small dense linear algebra. Sizes in this library are tiny (n <= ~10), so
// everything is dynamically sized, row-major, and copied by value.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ofo {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : v_(n, fill) {}
  Vector(std::initializer_list<double> values) : v_(values) {}
  explicit Vector(std::vector<double> values) : v_(std::move(values)) {}
  explicit Vector(std::span<const double> values) : v_(values.begin(), values.end()) {}

  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double* data() noexcept { return v_.data(); }
  const double* data() const noexcept { return v_.data(); }
  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  std::span<double> span() noexcept { return v_; }
  std::span<const double> span() const noexcept { return v_; }
  operator std::span<const double>() const noexcept { return v_; }

  const std::vector<double>& values() const noexcept { return v_; }

  bool all_finite() const noexcept;
  double norm() const noexcept;
  double max_abs() const noexcept;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> v_;
};

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);
double dot(std::span<const double> a, std::span<const double> b);

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Throws InputError if entries.size() != rows*cols or an entry is not finite.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  const std::vector<double>& entries() const noexcept { return a_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(a_).subspan(i * cols_, cols_);
  }

  Matrix transpose() const;
  double max_abs() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);
inline Vector operator*(const Matrix& a, const Vector& x) { return a * x.span(); }
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// out = a * x, no allocation. Sizes must agree.
void multiply_into(const Matrix& a, std::span<const double> x, std::span<double> out);
/// out = a^T * x, no allocation.
void multiply_transpose_into(const Matrix& a, std::span<const double> x, std::span<double> out);

bool is_symmetric(const Matrix& m, double tol = 1e-12);

/// Solves a*x = b by LU with partial pivoting. Throws SingularMatrixError when a
/// pivot falls below 1e-12 times the largest entry of a.
Vector lu_solve(const Matrix& a, std::span<const double> b);

/// Throws SingularMatrixError under the same degeneracy threshold as lu_solve.
Matrix inverse(const Matrix& m);

/// Solves A*P + P*A^T = -Q for symmetric P by Kronecker vectorization.
///
/// Q must be symmetric positive-definite. Throws NotHurwitzError when the
/// vectorized system is singular or the solution is not positive-definite,
/// and InputError on shape problems.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

/// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi).
Vector sym_eigenvalues(const Matrix& m);

/// Largest singular value.
double spectral_norm(const Matrix& m);

}  // namespace ofo
