#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "ofo/cost.hpp"
#include "ofo/linalg.hpp"
#include "ofo/plant.hpp"

namespace ofo {

/// Axis-aligned box {u : lo <= u <= hi}; entries may be infinite.
class BoxSet {
 public:
  /// Throws InputError unless lo <= hi componentwise (NaN rejected).
  BoxSet(Vector lo, Vector hi);
  static BoxSet unbounded(std::size_t m);

  std::size_t size() const noexcept { return lo_.size(); }
  const Vector& lo() const noexcept { return lo_; }
  const Vector& hi() const noexcept { return hi_; }

  bool contains(std::span<const double> u, double tol = 0.0) const;
  /// Largest componentwise distance outside the box (0 inside).
  double violation(std::span<const double> u) const;
  void project_into(std::span<const double> v, std::span<double> out) const;

 private:
  Vector lo_;
  Vector hi_;
};

/// Euclidean projection onto the box: componentwise clamp.
Vector proj_box(const Vector& v, const BoxSet& box);

struct ControllerWorkspace {
  ControllerWorkspace(std::size_t m, std::size_t p)
      : sensitivity(m * p), grad(m), step(m), gradient(m, p) {}
  std::vector<double> sensitivity;
  std::vector<double> grad;
  std::vector<double> step;
  GradientWorkspace gradient;
};

/// An OFO control law u' = k(u, y). The sensitivity grad_h(u) comes from a
/// plant model; only its sensitivity is ever queried, so the model's
/// disturbance is irrelevant for plants whose sensitivity ignores w.
class Controller {
 public:
  virtual ~Controller() = default;

  virtual std::string_view kind() const = 0;
  virtual void rate(std::span<const double> u, std::span<const double> y, std::span<double> du,
                    ControllerWorkspace& ws) const = 0;
  virtual std::unique_ptr<Controller> with_alpha(double alpha) const = 0;
  virtual const BoxSet* box() const { return nullptr; }
  /// Gain multiplying the algorithm decay in the certificate.
  virtual double effective_gain() const { return alpha_; }

  Vector rate(const Vector& u, const Vector& y) const;

  double alpha() const noexcept { return alpha_; }
  const CostModel& cost() const noexcept { return *cost_; }
  const std::shared_ptr<const CostModel>& cost_ptr() const noexcept { return cost_; }
  const Plant& model() const noexcept { return *model_; }
  const std::shared_ptr<const Plant>& model_ptr() const noexcept { return model_; }

 protected:
  Controller(double alpha, std::shared_ptr<const CostModel> cost,
             std::shared_ptr<const Plant> model);

 private:
  double alpha_;
  std::shared_ptr<const CostModel> cost_;
  std::shared_ptr<const Plant> model_;
};

/// u' = -alpha * (grad_u Phi + grad_h(u)^T grad_y Phi)
class GradientOfoController final : public Controller {
 public:
  GradientOfoController(double alpha, std::shared_ptr<const CostModel> cost,
                        std::shared_ptr<const Plant> model);

  std::string_view kind() const override { return "gradient"; }
  void rate(std::span<const double> u, std::span<const double> y, std::span<double> du,
            ControllerWorkspace& ws) const override;
  std::unique_ptr<Controller> with_alpha(double alpha) const override;
  using Controller::rate;
};

/// u' = -alpha u + alpha proj_U(u - beta * reduced gradient)
///
/// beta defaults to 1/L, the largest stepsize for which the projected
/// gradient map stays contractive.
class ProjectedOfoController final : public Controller {
 public:
  /// Throws InputError if beta > 1/L ("stepsize violates ...") or beta <= 0.
  ProjectedOfoController(double alpha, BoxSet box, std::shared_ptr<const CostModel> cost,
                         std::shared_ptr<const Plant> model,
                         std::optional<double> beta = std::nullopt);

  std::string_view kind() const override { return "projected"; }
  void rate(std::span<const double> u, std::span<const double> y, std::span<double> du,
            ControllerWorkspace& ws) const override;
  std::unique_ptr<Controller> with_alpha(double alpha) const override;
  const BoxSet* box() const override { return &box_; }
  double effective_gain() const override { return alpha() * beta_; }
  using Controller::rate;

  double beta() const noexcept { return beta_; }

 private:
  BoxSet box_;
  double beta_;
};

inline Vector control_rate_gradient(const GradientOfoController& c, const Vector& u,
                                    const Vector& y) {
  return c.rate(u, y);
}

inline Vector control_rate_projected(const ProjectedOfoController& c, const Vector& u,
                                     const Vector& y) {
  return c.rate(u, y);
}

}  // namespace ofo
