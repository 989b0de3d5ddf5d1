#include "ofo/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ofo/errors.hpp"

namespace ofo {

BoxSet::BoxSet(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw InputError("box: lo and hi differ in dimension");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] <= hi_[i])) {
      throw InputError("box: lo[" + std::to_string(i) + "] > hi[" + std::to_string(i) + "]");
    }
  }
}

BoxSet BoxSet::unbounded(std::size_t m) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return BoxSet(Vector(m, -inf), Vector(m, inf));
}

bool BoxSet::contains(std::span<const double> u, double tol) const {
  return violation(u) <= tol;
}

double BoxSet::violation(std::span<const double> u) const {
  double v = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    v = std::max({v, lo_[i] - u[i], u[i] - hi_[i]});
  }
  return v;
}

void BoxSet::project_into(std::span<const double> v, std::span<double> out) const {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i], lo_[i], hi_[i]);
}

Vector proj_box(const Vector& v, const BoxSet& box) {
  if (v.size() != box.size()) throw InputError("proj_box: dimension mismatch");
  Vector out(v.size());
  box.project_into(v.span(), out.span());
  return out;
}

Controller::Controller(double alpha, std::shared_ptr<const CostModel> cost,
                       std::shared_ptr<const Plant> model)
    : alpha_(alpha), cost_(std::move(cost)), model_(std::move(model)) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("controller gain alpha must be positive");
  if (!cost_) throw InputError("controller needs a cost model");
  if (!model_) throw InputError("controller needs a sensitivity model");
}

Vector Controller::rate(const Vector& u, const Vector& y) const {
  if (u.size() != model_->input_dim() || y.size() != model_->output_dim()) {
    throw InputError("controller rate: (u, y) dimensions do not match the plant model");
  }
  ControllerWorkspace ws(u.size(), y.size());
  Vector du(u.size());
  rate(u.span(), y.span(), du.span(), ws);
  return du;
}

GradientOfoController::GradientOfoController(double alpha, std::shared_ptr<const CostModel> cost,
                                             std::shared_ptr<const Plant> model)
    : Controller(alpha, std::move(cost), std::move(model)) {}

void GradientOfoController::rate(std::span<const double> u, std::span<const double> y,
                                 std::span<double> du, ControllerWorkspace& ws) const {
  model().sensitivity(u, ws.sensitivity);
  reduced_gradient_into(cost(), ws.sensitivity, u, y, du, ws.gradient);
  for (double& v : du) v *= -alpha();
}

std::unique_ptr<Controller> GradientOfoController::with_alpha(double alpha) const {
  return std::make_unique<GradientOfoController>(alpha, cost_ptr(), model_ptr());
}

ProjectedOfoController::ProjectedOfoController(double alpha, BoxSet box,
                                               std::shared_ptr<const CostModel> cost,
                                               std::shared_ptr<const Plant> model,
                                               std::optional<double> beta)
    : Controller(alpha, std::move(cost), std::move(model)), box_(std::move(box)), beta_(0.0) {
  if (box_.size() != this->model().input_dim()) throw InputError("box dimension differs from the input dimension");
  const double lip = this->cost().grad_u_lipschitz();
  beta_ = beta.value_or(1.0 / lip);
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw InputError("stepsize beta must be positive");
  if (beta_ > 1.0 / lip) {
    throw InputError("stepsize violates the projected-controller precondition beta <= 1/L: beta = " + std::to_string(beta_) +
                     " > 1/L = " + std::to_string(1.0 / lip));
  }
}

void ProjectedOfoController::rate(std::span<const double> u, std::span<const double> y,
                                  std::span<double> du, ControllerWorkspace& ws) const {
  model().sensitivity(u, ws.sensitivity);
  reduced_gradient_into(cost(), ws.sensitivity, u, y, ws.grad, ws.gradient);
  for (std::size_t i = 0; i < u.size(); ++i) ws.step[i] = u[i] - beta_ * ws.grad[i];
  box_.project_into(ws.step, du);
  for (std::size_t i = 0; i < u.size(); ++i) du[i] = alpha() * (du[i] - u[i]);
}

std::unique_ptr<Controller> ProjectedOfoController::with_alpha(double alpha) const {
  return std::make_unique<ProjectedOfoController>(alpha, box_, cost_ptr(), model_ptr(), beta_);
}

}  // namespace ofo
