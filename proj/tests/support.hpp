#pragma once

// Shared fixtures: the two example plants and oracles that do not go
// through the library's own numerics.

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "ofo/controller.hpp"
#include "ofo/cost.hpp"
#include "ofo/linalg.hpp"
#include "ofo/plant.hpp"

namespace ofo::test {

inline std::shared_ptr<LinearPlant> linear_example(double w = 0.0) {
  return std::make_shared<LinearPlant>(Matrix{{-1, 10}, {-10, -1}}, Matrix{{0}, {1}},
                                       Matrix{{1}, {1}}, Matrix{{1, 0}}, Vector{w});
}

inline std::shared_ptr<SinePlant> sine_example(double w = 0.0) {
  return std::make_shared<SinePlant>(Matrix{{0, -0.1}, {0.1, -0.1}}, Matrix{{0}, {0.1}},
                                     Matrix{{0.1}, {0.1}}, Matrix{{1, 1}}, Vector{w});
}

inline std::shared_ptr<QuadraticCost> linear_example_cost() {
  return std::make_shared<QuadraticCost>(0.01, 1.0);
}

inline std::shared_ptr<SqrtPlusCost> sine_example_cost() { return std::make_shared<SqrtPlusCost>(11.0); }

inline BoxSet sine_example_box() { return BoxSet(Vector{-5e-5}, Vector{5e-5}); }

/// Unconstrained optimum of 0.01 u^2 + h(u)^2 with h(u) = (10/101) u + (11/101) w,
/// by setting the derivative of the scalar quadratic to zero.
inline double linear_example_optimum(double w) {
  const double hb = 10.0 / 101.0;
  const double hw = 11.0 / 101.0;
  return -(hb * hw * w) / (0.01 + hb * hb);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// Dense row-major square matrix helpers kept separate from the library.
using Dense = std::vector<std::vector<double>>;

inline Dense dense_mul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size();
  Dense c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

/// exp(M) by scaling and squaring with a 30-term Taylor series.
inline Dense expm(Dense m) {
  const std::size_t n = m.size();
  double norm = 0.0;
  for (const auto& r : m)
    for (double v : r) norm = std::max(norm, std::abs(v));
  int squarings = 0;
  while (norm * static_cast<double>(n) > 0.25) {
    norm /= 2.0;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (auto& r : m)
    for (double& v : r) v *= scale;
  Dense result(n, std::vector<double>(n, 0.0));
  Dense term(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) result[i][i] = term[i][i] = 1.0;
  for (int k = 1; k <= 30; ++k) {
    term = dense_mul(term, m);
    for (auto& r : term)
      for (double& v : r) v /= k;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) result = dense_mul(result, result);
  return result;
}

/// Exact solution of z' = M z + c from z0 over time t, via the augmented
/// matrix [[M, c], [0, 0]].
inline std::vector<double> affine_flow(const Dense& m, const std::vector<double>& c,
                                       const std::vector<double>& z0, double t) {
  const std::size_t n = m.size();
  Dense aug(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = m[i][j] * t;
    aug[i][n] = c[i] * t;
  }
  const Dense e = expm(aug);
  std::vector<double> z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) z[i] += e[i][j] * z0[j];
    z[i] += e[i][n];
  }
  return z;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// 10^uniform(lo_exp, hi_exp).
inline double log_uniform(std::mt19937_64& g, double lo_exp, double hi_exp) {
  return std::pow(10.0, uniform(g, lo_exp, hi_exp));
}

}  // namespace ofo::test
