#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>

#include "ofo/linalg.hpp"

namespace ofo {

/// A pre-stabilized plant  x' = f(x, u; w),  y = g(x)  with a unique
/// steady-state map s(u) and steady output h(u) = g(s(u)).
///
/// The disturbance w is part of the plant value. It is piecewise constant
/// in simulations; a new segment gets a clone via with_disturbance().
///
/// The span overloads are the allocation-free hot path and assume correctly
/// sized arguments; the Vector overloads check dimensions and throw
/// InputError.
class Plant {
 public:
  virtual ~Plant() = default;

  virtual std::string_view kind() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual const Vector& disturbance() const = 0;

  virtual void dynamics(std::span<const double> x, std::span<const double> u,
                        std::span<double> dxdt) const = 0;
  virtual void output(std::span<const double> x, std::span<double> y) const = 0;
  virtual Vector steady_state(std::span<const double> u) const = 0;
  /// Row-major p x m Jacobian of h at u.
  virtual void sensitivity(std::span<const double> u, std::span<double> out) const = 0;

  virtual std::unique_ptr<Plant> with_disturbance(const Vector& w) const = 0;

  Vector dynamics(const Vector& x, const Vector& u) const;
  Vector output(const Vector& x) const;
  Vector steady_state(const Vector& u) const;
  Vector steady_output(const Vector& u) const;
  Matrix sensitivity(const Vector& u) const;

 protected:
  void check_state(std::size_t n) const;
  void check_input(std::size_t m) const;
};

/// Plants of the form  x' = A x + B phi(u) + B_w w,  y = C x  with a
/// componentwise input nonlinearity phi. A must be Hurwitz.
class LtiPlant : public Plant {
 public:
  using Plant::dynamics;
  using Plant::output;
  using Plant::sensitivity;
  using Plant::steady_state;

  std::size_t state_dim() const override { return a_.rows(); }
  std::size_t input_dim() const override { return b_.cols(); }
  std::size_t output_dim() const override { return c_.rows(); }
  const Vector& disturbance() const override { return w_; }

  void dynamics(std::span<const double> x, std::span<const double> u,
                std::span<double> dxdt) const override;
  void output(std::span<const double> x, std::span<double> y) const override;
  Vector steady_state(std::span<const double> u) const override;
  void sensitivity(std::span<const double> u, std::span<double> out) const override;

  const Matrix& a() const noexcept { return a_; }
  const Matrix& b() const noexcept { return b_; }
  const Matrix& b_w() const noexcept { return bw_; }
  const Matrix& c() const noexcept { return c_; }

  /// P with A^T P + P A = -I, i.e. W(x,u) = (x - s(u))^T P (x - s(u)) decays
  /// as -||x - s(u)||^2 along the plant for constant u.
  const Matrix& lyapunov_weight() const noexcept { return p_; }

  /// -C A^{-1} B, the sensitivity with phi' = 1.
  const Matrix& dc_gain() const noexcept { return gain_; }

  /// Upper bound on |phi'(u)| (componentwise); 1 for the identity.
  virtual double input_slope_bound() const = 0;
  /// Lipschitz modulus of phi' (componentwise); 0 for the identity.
  virtual double input_curvature_bound() const = 0;

  /// Lipschitz modulus of f in u: slope bound times ||B||.
  double ell_f() const;
  double ell_g() const;
  /// Lipschitz modulus of h (bound on ||grad h||).
  double ell_h() const;
  /// Lipschitz modulus of grad h.
  double ell_grad_h() const;
  double state_matrix_norm() const;

 protected:
  LtiPlant(Matrix a, Matrix b, Matrix b_w, Matrix c, Vector w);

  /// Componentwise input nonlinearity phi and its derivative.
  virtual double phi(double u) const = 0;
  virtual double phi_slope(double u) const = 0;

 private:
  Matrix a_, b_, bw_, c_;
  Vector w_;
  Matrix a_inv_;
  Matrix p_;
  Matrix gain_;
  Matrix neg_ainv_b_;
  Vector offset_;  // B_w w
  Vector steady_offset_;  // -A^{-1} B_w w
};

/// x' = A x + B u + B_w w
class LinearPlant final : public LtiPlant {
 public:
  /// Throws InputError on inconsistent dimensions and NotHurwitzError when A
  /// has no positive-definite Lyapunov solution.
  LinearPlant(Matrix a, Matrix b, Matrix b_w, Matrix c, Vector w);

  std::string_view kind() const override { return "linear"; }
  std::unique_ptr<Plant> with_disturbance(const Vector& w) const override;
  double input_slope_bound() const override { return 1.0; }
  double input_curvature_bound() const override { return 0.0; }

 protected:
  double phi(double u) const override;
  double phi_slope(double u) const override;
};

/// x' = A x + B (u + sin u) + B_w w with scalar input.
class SinePlant final : public LtiPlant {
 public:
  SinePlant(Matrix a, Matrix b, Matrix b_w, Matrix c, Vector w);

  std::string_view kind() const override { return "sine"; }
  std::unique_ptr<Plant> with_disturbance(const Vector& w) const override;
  double input_slope_bound() const override { return 2.0; }
  double input_curvature_bound() const override { return 1.0; }

 protected:
  double phi(double u) const override;
  double phi_slope(double u) const override;
};

/// User-supplied plant: every map receives the current disturbance.
struct PlantFunctions {
  std::function<Vector(const Vector& x, const Vector& u, const Vector& w)> f;
  std::function<Vector(const Vector& x)> g;
  std::function<Vector(const Vector& u, const Vector& w)> s;
  std::function<Matrix(const Vector& u, const Vector& w)> grad_h;
};

class FunctionPlant final : public Plant {
 public:
  using Plant::dynamics;
  using Plant::output;
  using Plant::sensitivity;
  using Plant::steady_state;

  FunctionPlant(std::size_t n, std::size_t m, std::size_t p, PlantFunctions fns, Vector w);

  std::string_view kind() const override { return "function"; }
  std::size_t state_dim() const override { return n_; }
  std::size_t input_dim() const override { return m_; }
  std::size_t output_dim() const override { return p_; }
  const Vector& disturbance() const override { return w_; }

  void dynamics(std::span<const double> x, std::span<const double> u,
                std::span<double> dxdt) const override;
  void output(std::span<const double> x, std::span<double> y) const override;
  Vector steady_state(std::span<const double> u) const override;
  void sensitivity(std::span<const double> u, std::span<double> out) const override;
  std::unique_ptr<Plant> with_disturbance(const Vector& w) const override;

 private:
  std::size_t n_, m_, p_;
  PlantFunctions fns_;
  Vector w_;
};

}  // namespace ofo
