#include "ofo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ofo/errors.hpp"

namespace ofo {

namespace {

constexpr double kDegeneracy = 1e-12;
constexpr int kJacobiSweeps = 100;
constexpr double kJacobiOffTol = 1e-14;

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InputError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InputError(std::string(what) + ": size mismatch " + std::to_string(a) + " vs " +
                     std::to_string(b));
  }
}

// In-place LU with partial pivoting; returns false on a degenerate pivot.
bool lu_factor(std::vector<double>& a, std::size_t n, std::vector<std::size_t>& perm) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  const double threshold = kDegeneracy * (scale > 0.0 ? scale : 1.0);
  perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    }
    if (!(std::abs(a[piv * n + k]) > threshold)) return false;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(perm[k], perm[piv]);
    }
    const double d = a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / d;
      a[i * n + k] = f;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return true;
}

std::vector<double> lu_back(const std::vector<double>& lu, std::size_t n,
                            const std::vector<std::size_t>& perm, std::span<const double> b) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu[i * n + j] * x[j];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu[i * n + j] * x[j];
    x[i] /= lu[i * n + i];
  }
  return x;
}

// A*P + P*A^T as a linear map on row-major vec(P).
std::vector<double> lyapunov_operator(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::size_t nn = n * n;
  std::vector<double> k(nn * nn, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t l = 0; l < n; ++l) {
        k[row * nn + (l * n + j)] += a(i, l);
        k[row * nn + (i * n + l)] += a(j, l);
      }
    }
  }
  return k;
}

}  // namespace

bool Vector::all_finite() const noexcept {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

double Vector::norm() const noexcept { return std::sqrt(dot(v_, v_)); }

double Vector::max_abs() const noexcept {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

Vector operator+(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "vector add");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vector operator-(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "vector subtract");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector operator*(double s, const Vector& a) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), a_(std::move(row_major)) {
  if (a_.size() != rows_ * cols_) {
    throw InputError("matrix " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                     " needs " + std::to_string(rows_ * cols_) + " entries, got " +
                     std::to_string(a_.size()));
  }
  for (double v : a_) {
    if (!std::isfinite(v)) throw InputError("matrix entries must be finite");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  a_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("ragged matrix literal");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::column(std::span<const double> v) {
  return Matrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double x : a_) m = std::max(m, std::abs(x));
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw InputError("matrix product: inner dimensions " + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()));
  }
  Matrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  Vector r(a.rows());
  multiply_into(a, x, r.span());
  return r;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix add");
  Matrix r = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) += b(i, j);
  }
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix subtract");
  Matrix r = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) -= b(i, j);
  }
  return r;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix r = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) *= s;
  }
  return r;
}

void multiply_into(const Matrix& a, std::span<const double> x, std::span<double> out) {
  require_same_size(a.cols(), x.size(), "matrix-vector product");
  require_same_size(a.rows(), out.size(), "matrix-vector product output");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    out[i] = s;
  }
}

void multiply_transpose_into(const Matrix& a, std::span<const double> x, std::span<double> out) {
  require_same_size(a.rows(), x.size(), "transposed product");
  require_same_size(a.cols(), out.size(), "transposed product output");
  for (std::size_t j = 0; j < a.cols(); ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j) * x[i];
  }
}

bool is_symmetric(const Matrix& m, double tol) {
  if (!m.square()) return false;
  const double scale = std::max(1.0, m.max_abs());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol * scale) return false;
    }
  }
  return true;
}

Vector lu_solve(const Matrix& a, std::span<const double> b) {
  if (!a.square()) throw InputError("lu_solve: matrix must be square");
  require_same_size(a.rows(), b.size(), "lu_solve right-hand side");
  std::vector<double> lu = a.entries();
  std::vector<std::size_t> perm;
  if (!lu_factor(lu, a.rows(), perm)) throw SingularMatrixError();
  return Vector(lu_back(lu, a.rows(), perm, b));
}

Matrix inverse(const Matrix& m) {
  if (!m.square()) throw InputError("inverse: matrix must be square");
  const std::size_t n = m.rows();
  std::vector<double> lu = m.entries();
  std::vector<std::size_t> perm;
  if (!lu_factor(lu, n, perm)) throw SingularMatrixError();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const auto col = lu_back(lu, n, perm, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  if (!a.square()) throw InputError("solve_lyapunov: A must be square");
  require_same_shape(a, q, "solve_lyapunov");
  if (!is_symmetric(q)) throw InputError("solve_lyapunov: Q must be symmetric");
  if (!(sym_eigenvalues(q)[0] > 0.0)) throw InputError("solve_lyapunov: Q must be positive-definite");

  const std::size_t n = a.rows();
  const std::size_t nn = n * n;
  std::vector<double> k = lyapunov_operator(a);
  std::vector<std::size_t> perm;
  if (!lu_factor(k, nn, perm)) throw NotHurwitzError("Lyapunov operator is singular");

  std::vector<double> rhs(nn);
  for (std::size_t i = 0; i < nn; ++i) rhs[i] = -q.entries()[i];
  std::vector<double> p = lu_back(k, nn, perm, rhs);

  // One step of iterative refinement on the residual, then symmetrize.
  const std::vector<double> op = lyapunov_operator(a);
  std::vector<double> r(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    double s = rhs[i];
    for (std::size_t j = 0; j < nn; ++j) s -= op[i * nn + j] * p[j];
    r[i] = s;
  }
  const std::vector<double> dp = lu_back(k, nn, perm, r);
  for (std::size_t i = 0; i < nn; ++i) p[i] += dp[i];

  Matrix sol(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sol(i, j) = 0.5 * (p[i * n + j] + p[j * n + i]);
  }
  for (double v : sol.entries()) {
    if (!std::isfinite(v)) throw NotHurwitzError("non-finite Lyapunov solution");
  }
  if (!(sym_eigenvalues(sol)[0] > 0.0)) throw NotHurwitzError("Lyapunov solution is indefinite");
  return sol;
}

Vector sym_eigenvalues(const Matrix& m) {
  if (!m.square()) throw InputError("sym_eigenvalues: matrix must be square");
  if (!is_symmetric(m)) throw InputError("sym_eigenvalues: matrix must be symmetric");
  const std::size_t n = m.rows();
  Matrix a = m;
  double frob = 0.0;
  for (double v : a.entries()) frob += v * v;
  const double tol = kJacobiOffTol * std::max(1.0, std::sqrt(frob));

  for (int sweep = 0; sweep < kJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    }
    if (std::sqrt(off) <= tol) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double spectral_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Matrix g = m.transpose() * m;
  // Exact symmetry so the Jacobi precondition never trips on rounding.
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = i + 1; j < g.cols(); ++j) g(j, i) = g(i, j);
  }
  const Vector ev = sym_eigenvalues(g);
  return std::sqrt(std::max(0.0, ev[ev.size() - 1]));
}

}  // namespace ofo
