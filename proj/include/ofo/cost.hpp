#pragma once

#include <memory>
#include <span>
#include <string_view>

#include "ofo/linalg.hpp"

namespace ofo {

/// Moduli of a cost used by the stability certificate.
struct CostDescriptor {
  double mu_Phi = 0.0;     // strong convexity of Phi in u
  double L = 0.0;          // Lipschitz modulus of grad_u Phi in u
  double ell_Phi_u = 0.0;  // Lipschitz modulus of grad_h^T grad_y Phi in u
  double ell_Phi_y = 0.0;  // Lipschitz modulus of the reduced gradient in y
};

/// Steady-state objective Phi(u, y).
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual std::string_view kind() const = 0;
  virtual double value(std::span<const double> u, std::span<const double> y) const = 0;
  virtual void grad_u(std::span<const double> u, std::span<const double> y,
                      std::span<double> out) const = 0;
  virtual void grad_y(std::span<const double> u, std::span<const double> y,
                      std::span<double> out) const = 0;

  virtual double strong_convexity() const = 0;
  virtual double grad_u_lipschitz() const = 0;

  /// ell_h bounds ||grad h|| and ell_grad_h is the Lipschitz modulus of grad h.
  /// Throws InputError on negative moduli, or when the cost family cannot
  /// provide a finite modulus for the given sensitivity.
  virtual CostDescriptor descriptor(double ell_h, double ell_grad_h) const = 0;

  Vector grad_u(const Vector& u, const Vector& y) const;
  Vector grad_y(const Vector& u, const Vector& y) const;
};

/// Phi = q_u ||u||^2 + q_y ||y||^2
class QuadraticCost final : public CostModel {
 public:
  QuadraticCost(double q_u, double q_y);

  std::string_view kind() const override { return "quadratic"; }
  double value(std::span<const double> u, std::span<const double> y) const override;
  void grad_u(std::span<const double> u, std::span<const double> y,
              std::span<double> out) const override;
  void grad_y(std::span<const double> u, std::span<const double> y,
              std::span<double> out) const override;
  double strong_convexity() const override { return 2.0 * q_u_; }
  double grad_u_lipschitz() const override { return 2.0 * q_u_; }
  CostDescriptor descriptor(double ell_h, double ell_grad_h) const override;

  using CostModel::grad_u;
  using CostModel::grad_y;

  double q_u() const noexcept { return q_u_; }
  double q_y() const noexcept { return q_y_; }

 private:
  double q_u_;
  double q_y_;
};

/// Phi = a u^2 + sqrt(y^2 + 1) for scalar u and y.
class SqrtPlusCost final : public CostModel {
 public:
  explicit SqrtPlusCost(double a);

  std::string_view kind() const override { return "sqrtplus"; }
  double value(std::span<const double> u, std::span<const double> y) const override;
  void grad_u(std::span<const double> u, std::span<const double> y,
              std::span<double> out) const override;
  void grad_y(std::span<const double> u, std::span<const double> y,
              std::span<double> out) const override;
  double strong_convexity() const override { return 2.0 * a_; }
  double grad_u_lipschitz() const override { return 2.0 * a_; }
  CostDescriptor descriptor(double ell_h, double ell_grad_h) const override;

  using CostModel::grad_u;
  using CostModel::grad_y;

  double a() const noexcept { return a_; }

 private:
  double a_;
};

/// Phi + (mu4 / 2) ||u||^2
class RegularizedCost final : public CostModel {
 public:
  RegularizedCost(std::shared_ptr<const CostModel> base, double mu4);

  std::string_view kind() const override { return base_->kind(); }
  double value(std::span<const double> u, std::span<const double> y) const override;
  void grad_u(std::span<const double> u, std::span<const double> y,
              std::span<double> out) const override;
  void grad_y(std::span<const double> u, std::span<const double> y,
              std::span<double> out) const override;
  double strong_convexity() const override { return base_->strong_convexity() + mu4_; }
  double grad_u_lipschitz() const override { return base_->grad_u_lipschitz() + mu4_; }
  CostDescriptor descriptor(double ell_h, double ell_grad_h) const override;

  using CostModel::grad_u;
  using CostModel::grad_y;

  const CostModel& base() const noexcept { return *base_; }
  double mu4() const noexcept { return mu4_; }

 private:
  std::shared_ptr<const CostModel> base_;
  double mu4_;
};

/// Scratch buffers for reduced_gradient_into (sized for m inputs, p outputs).
struct GradientWorkspace {
  GradientWorkspace(std::size_t m, std::size_t p) : gu(m), gy(p) {}
  std::vector<double> gu;
  std::vector<double> gy;
};

/// grad_u Phi + S^T grad_y Phi, where S is the p x m sensitivity (row-major).
void reduced_gradient_into(const CostModel& cost, std::span<const double> sensitivity,
                           std::span<const double> u, std::span<const double> y,
                           std::span<double> out, GradientWorkspace& ws);

Vector reduced_gradient(const CostModel& cost, const Matrix& sensitivity, const Vector& u,
                        const Vector& y);

}  // namespace ofo
