#include "ofo/cost.hpp"

#include <cmath>
#include <string>

#include "ofo/errors.hpp"

namespace ofo {

namespace {

void check_moduli(double ell_h, double ell_grad_h) {
  if (!(ell_h >= 0.0) || !(ell_grad_h >= 0.0)) {
    throw InputError("cost descriptor: ell_h and ell_grad_h must be nonnegative");
  }
}

void check_scalar(std::size_t m, std::size_t p) {
  if (m != 1 || p != 1) throw InputError("sqrtplus cost takes scalar u and y");
}

}  // namespace

Vector CostModel::grad_u(const Vector& u, const Vector& y) const {
  Vector g(u.size());
  grad_u(u.span(), y.span(), g.span());
  return g;
}

Vector CostModel::grad_y(const Vector& u, const Vector& y) const {
  Vector g(y.size());
  grad_y(u.span(), y.span(), g.span());
  return g;
}

QuadraticCost::QuadraticCost(double q_u, double q_y) : q_u_(q_u), q_y_(q_y) {
  if (!(q_u > 0.0) || !std::isfinite(q_u)) throw InputError("quadratic cost: q_u must be positive");
  if (!(q_y >= 0.0) || !std::isfinite(q_y)) throw InputError("quadratic cost: q_y must be nonnegative");
}

double QuadraticCost::value(std::span<const double> u, std::span<const double> y) const {
  return q_u_ * dot(u, u) + q_y_ * dot(y, y);
}

void QuadraticCost::grad_u(std::span<const double> u, std::span<const double>,
                           std::span<double> out) const {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = 2.0 * q_u_ * u[i];
}

void QuadraticCost::grad_y(std::span<const double>, std::span<const double> y,
                           std::span<double> out) const {
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = 2.0 * q_y_ * y[i];
}

CostDescriptor QuadraticCost::descriptor(double ell_h, double ell_grad_h) const {
  check_moduli(ell_h, ell_grad_h);
  // grad_h^T (2 q_y y) is only globally Lipschitz in u when grad_h is constant.
  if (ell_grad_h > 0.0 && q_y_ > 0.0) {
    throw InputError("quadratic output cost needs a constant sensitivity (ell_grad_h = 0)");
  }
  return {.mu_Phi = 2.0 * q_u_, .L = 2.0 * q_u_, .ell_Phi_u = 0.0, .ell_Phi_y = 2.0 * q_y_ * ell_h};
}

SqrtPlusCost::SqrtPlusCost(double a) : a_(a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InputError("sqrtplus cost: a must be positive");
}

double SqrtPlusCost::value(std::span<const double> u, std::span<const double> y) const {
  check_scalar(u.size(), y.size());
  return a_ * u[0] * u[0] + std::sqrt(y[0] * y[0] + 1.0);
}

void SqrtPlusCost::grad_u(std::span<const double> u, std::span<const double>,
                          std::span<double> out) const {
  out[0] = 2.0 * a_ * u[0];
}

void SqrtPlusCost::grad_y(std::span<const double>, std::span<const double> y,
                          std::span<double> out) const {
  out[0] = y[0] / std::sqrt(y[0] * y[0] + 1.0);
}

CostDescriptor SqrtPlusCost::descriptor(double ell_h, double ell_grad_h) const {
  check_moduli(ell_h, ell_grad_h);
  // |d/dy sqrt(y^2+1)| <= 1 and its derivative is 1-Lipschitz.
  return {.mu_Phi = 2.0 * a_, .L = 2.0 * a_, .ell_Phi_u = ell_grad_h, .ell_Phi_y = ell_h};
}

RegularizedCost::RegularizedCost(std::shared_ptr<const CostModel> base, double mu4)
    : base_(std::move(base)), mu4_(mu4) {
  if (!base_) throw InputError("regularized cost needs a base cost");
  if (!(mu4 >= 0.0) || !std::isfinite(mu4)) throw InputError("regularization mu4 must be nonnegative");
}

double RegularizedCost::value(std::span<const double> u, std::span<const double> y) const {
  return base_->value(u, y) + 0.5 * mu4_ * dot(u, u);
}

void RegularizedCost::grad_u(std::span<const double> u, std::span<const double> y,
                             std::span<double> out) const {
  base_->grad_u(u, y, out);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] += mu4_ * u[i];
}

void RegularizedCost::grad_y(std::span<const double> u, std::span<const double> y,
                             std::span<double> out) const {
  base_->grad_y(u, y, out);
}

CostDescriptor RegularizedCost::descriptor(double ell_h, double ell_grad_h) const {
  CostDescriptor d = base_->descriptor(ell_h, ell_grad_h);
  d.mu_Phi += mu4_;
  d.L += mu4_;
  return d;
}

void reduced_gradient_into(const CostModel& cost, std::span<const double> sensitivity,
                           std::span<const double> u, std::span<const double> y,
                           std::span<double> out, GradientWorkspace& ws) {
  const std::size_t m = u.size();
  const std::size_t p = y.size();
  cost.grad_u(u, y, ws.gu);
  cost.grad_y(u, y, ws.gy);
  for (std::size_t j = 0; j < m; ++j) {
    double s = ws.gu[j];
    for (std::size_t i = 0; i < p; ++i) s += sensitivity[i * m + j] * ws.gy[i];
    out[j] = s;
  }
}

Vector reduced_gradient(const CostModel& cost, const Matrix& sensitivity, const Vector& u,
                        const Vector& y) {
  if (sensitivity.rows() != y.size() || sensitivity.cols() != u.size()) {
    throw InputError("reduced_gradient: sensitivity must be " + std::to_string(y.size()) + "x" +
                     std::to_string(u.size()));
  }
  GradientWorkspace ws(u.size(), y.size());
  Vector out(u.size());
  reduced_gradient_into(cost, sensitivity.entries(), u.span(), y.span(), out.span(), ws);
  return out;
}

}  // namespace ofo
