#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ofo/errors.hpp"
#include "ofo/linalg.hpp"

namespace ofo {

/// Right-hand side of an autonomous-in-segment ODE: writes dx/dt into `dxdt`.
using VectorField =
    std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;

struct SampledPath {
  std::vector<double> t;
  std::vector<Vector> x;
};

/// Classical fourth-order Runge-Kutta with preallocated stage buffers.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(std::size_t n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

  template <class Field>
  void step(Field&& field, double t, std::span<double> x, double h) {
    const std::size_t n = x.size();
    field(t, std::span<const double>(x), std::span<double>(k1_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k1_[i];
    field(t + 0.5 * h, std::span<const double>(tmp_), std::span<double>(k2_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k2_[i];
    field(t + 0.5 * h, std::span<const double>(tmp_), std::span<double>(k3_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * k3_[i];
    field(t + h, std::span<const double>(tmp_), std::span<double>(k4_));
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

 private:
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

/// Number of steps on the grid t0, t0+dt, ..., t1 where the final step is
/// shortened to land on t1. A span shorter than dt gives one step.
std::size_t step_count(double t0, double t1, double dt);

/// Time of grid point k (exact t1 for the last one).
inline double grid_time(double t0, double t1, double dt, std::size_t k, std::size_t steps) {
  return k >= steps ? t1 : t0 + static_cast<double>(k) * dt;
}

void validate_span(double t0, double t1, double dt);

/// Integrates `x` in place from t0 to t1, calling observe(t, x) at t0 and after
/// every step. Throws DivergenceError naming the first non-finite time.
template <class Field, class Observer>
void integrate_observed(Field&& field, std::span<double> x, double t0, double t1, double dt,
                        Observer&& observe, const std::string& where = {}) {
  validate_span(t0, t1, dt);
  Rk4Stepper stepper(x.size());
  const std::size_t steps = step_count(t0, t1, dt);
  observe(t0, std::span<const double>(x));
  for (std::size_t k = 0; k < steps; ++k) {
    const double ta = grid_time(t0, t1, dt, k, steps);
    const double tb = grid_time(t0, t1, dt, k + 1, steps);
    stepper.step(field, ta, x, tb - ta);
    for (double v : x) {
      if (!std::isfinite(v)) throw DivergenceError(tb, where);
    }
    observe(tb, std::span<const double>(x));
  }
}

/// Fixed-step RK4 samples at every grid point from t0 to t1 inclusive.
SampledPath integrate(const VectorField& field, const Vector& x0, double t0, double t1, double dt);

/// Relative end-state difference between integrating with dt and dt/2.
double step_halving_difference(const VectorField& field, const Vector& x0, double t0, double t1,
                               double dt);

/// Forward-difference surrogate for the upper-right Dini derivative of a
/// sampled scalar path: (V[i+1] - V[i]) / (t[i+1] - t[i]).
double dini_upper_estimate(std::span<const double> series, std::span<const double> t,
                           std::size_t index);

}  // namespace ofo
