#include <doctest.h>

#include <cmath>

#include "ofo/errors.hpp"
#include "ofo/linalg.hpp"
#include "support.hpp"

using namespace ofo;

namespace {

double lyapunov_residual(const Matrix& a, const Matrix& p, const Matrix& q) {
  return (a * p + p * a.transpose() + q).max_abs();
}

double det3(const Matrix& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

Matrix random_hurwitz(std::mt19937_64& g, std::size_t n) {
  // -(M^T M + 0.1 I) + S with S skew is Hurwitz: its symmetric part is negative definite.
  Matrix m(n, n), s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = test::uniform(g, -2, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      s(i, j) = test::uniform(g, -5, 5);
      s(j, i) = -s(i, j);
    }
  return s - (m.transpose() * m + 0.1 * Matrix::identity(n));
}

}  // namespace

TEST_CASE("matrix construction validates shape and finiteness") {
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), InputError);
  CHECK_THROWS_AS(Matrix(1, 1, std::vector<double>{NAN}), InputError);
  CHECK_THROWS_AS(Matrix(1, 1, std::vector<double>{INFINITY}), InputError);
  const Matrix m{{1, 2}, {3, 4}};
  CHECK(m.rows() == 2);
  CHECK(m(1, 0) == 3);
  CHECK(m.transpose()(0, 1) == 3);
}

TEST_CASE("solve_lyapunov examples") {
  SUBCASE("negative identity") {
    const Matrix a = -1.0 * Matrix::identity(2);
    const Matrix p = solve_lyapunov(a, Matrix::identity(2));
    CHECK((p - 0.5 * Matrix::identity(2)).max_abs() <= 1e-14);
  }
  SUBCASE("rotation with damping") {
    const Matrix a{{-1, 10}, {-10, -1}};
    const Matrix p = solve_lyapunov(a, Matrix::identity(2));
    CHECK((p - 0.5 * Matrix::identity(2)).max_abs() <= 1e-12);
    CHECK(lyapunov_residual(a, p, Matrix::identity(2)) <= 1e-10);
  }
  SUBCASE("round trip through a known weight") {
    const Matrix a{{0, -0.1}, {0.1, -0.1}};
    const Matrix p0{{0.66, 0.33}, {0.33, 0.66}};
    const Matrix q = -1.0 * (a * p0 + p0 * a.transpose());
    const Matrix p = solve_lyapunov(a, q);
    CHECK((p - p0).max_abs() <= 1e-10);
    CHECK(lyapunov_residual(a, p, q) <= 1e-10);
  }
}

TEST_CASE("solve_lyapunov residual, symmetry and positivity on random Hurwitz matrices") {
  auto g = test::rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const Matrix a = random_hurwitz(g, n);
    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r(i, j) = test::uniform(g, -1, 1);
    const Matrix q = r * r.transpose() + Matrix::identity(n);
    const Matrix p = solve_lyapunov(a, q);
    CHECK(lyapunov_residual(a, p, q) <= 1e-10 * std::max(1.0, q.max_abs()));
    CHECK(is_symmetric(p, 1e-12));
    CHECK(sym_eigenvalues(p)[0] > 0.0);
  }
}

TEST_CASE("solve_lyapunov rejects unstable and malformed input") {
  const Matrix q = Matrix::identity(2);
  CHECK_THROWS_AS(solve_lyapunov(Matrix{{0, 1}, {0, 0}}, q), NotHurwitzError);
  CHECK_THROWS_AS(solve_lyapunov(Matrix::identity(2), q), NotHurwitzError);
  CHECK_THROWS_AS(solve_lyapunov(Matrix{{1, 0}, {0, -2}}, q), NotHurwitzError);
  CHECK_THROWS_AS(solve_lyapunov(Matrix(2, 3), q), InputError);
  CHECK_THROWS_AS(solve_lyapunov(-1.0 * Matrix::identity(3), q), InputError);
  CHECK_THROWS_AS(solve_lyapunov(-1.0 * Matrix::identity(2), Matrix{{1, 2}, {0, 1}}), InputError);
  CHECK_THROWS_AS(solve_lyapunov(-1.0 * Matrix::identity(2), Matrix{{1, 0}, {0, -1}}), InputError);
  try {
    solve_lyapunov(Matrix{{0, 1}, {0, 0}}, q);
  } catch (const NotHurwitzError& e) {
    CHECK(std::string(e.what()).find("plant not pre-stabilized") == 0);
  }
}

TEST_CASE("sym_eigenvalues examples") {
  const Vector id = sym_eigenvalues(Matrix::identity(2));
  CHECK(id[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(id[1] == doctest::Approx(1.0).epsilon(1e-14));
  const Vector p = sym_eigenvalues(Matrix{{0.66, 0.33}, {0.33, 0.66}});
  CHECK(std::abs(p[0] - 0.33) <= 1e-10);
  CHECK(std::abs(p[1] - 0.99) <= 1e-10);
  const Vector d = sym_eigenvalues(Matrix{{3, 0}, {0, -1}});
  CHECK(d[0] == -1.0);
  CHECK(d[1] == 3.0);
  CHECK_THROWS_AS(sym_eigenvalues(Matrix{{1, 2}, {0, 1}}), InputError);
}

TEST_CASE("sym_eigenvalues satisfy the characteristic polynomial") {
  auto g = test::rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i; j < 3; ++j) m(i, j) = m(j, i) = test::uniform(g, -3, 3);
    const Vector ev = sym_eigenvalues(m);
    CHECK(ev[0] <= ev[1]);
    CHECK(ev[1] <= ev[2]);
    for (double l : ev) CHECK(std::abs(det3(m - l * Matrix::identity(3))) <= 1e-8);
  }
}

TEST_CASE("spectral_norm examples") {
  CHECK(spectral_norm(Matrix{{0}, {1}}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_norm(Matrix::identity(2)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(spectral_norm(Matrix{{-10.0 / 101.0}}) - 10.0 / 101.0) <= 1e-8);
  // 2x2 closed form: sqrt of the largest eigenvalue of M^T M.
  const Matrix m{{1, 2}, {3, 4}};
  const double t = 1 + 4 + 9 + 16;
  const double det = (1 * 4 - 2 * 3) * (1 * 4 - 2 * 3);
  CHECK(std::abs(spectral_norm(m) - std::sqrt((t + std::sqrt(t * t - 4 * det)) / 2)) <= 1e-8);
}

TEST_CASE("inverse examples") {
  const Matrix i3 = Matrix::identity(3);
  CHECK(inverse(i3) == i3);
  const Matrix a{{-1, 10}, {-10, -1}};
  const Matrix expect = (1.0 / 101.0) * Matrix{{-1, -10}, {10, -1}};
  CHECK((inverse(a) - expect).max_abs() <= 1e-14);
  CHECK((a * inverse(a) - Matrix::identity(2)).max_abs() <= 1e-10);
  const Matrix b{{0, -0.1}, {0.1, -0.1}};
  CHECK((inverse(b) - Matrix{{-10, 10}, {-10, 0}}).max_abs() <= 1e-12);
}

TEST_CASE("inverse rejects singular matrices") {
  CHECK_THROWS_AS(inverse(Matrix{{1, 2}, {2, 4}}), SingularMatrixError);
  CHECK_THROWS_WITH(inverse(Matrix{{0, 0}, {0, 0}}), "singular plant matrix");
  CHECK_THROWS_AS(inverse(Matrix(2, 3)), InputError);
}

TEST_CASE("lu_solve agrees with the inverse") {
  auto g = test::rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_hurwitz(g, 3);
    const Vector b{test::uniform(g, -1, 1), test::uniform(g, -1, 1), test::uniform(g, -1, 1)};
    const Vector x = lu_solve(a, b.span());
    CHECK((a * x - b).max_abs() <= 1e-10);
  }
}
