#include "ofo/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace ofo {

void validate_span(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("integrate: dt must be positive");
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) {
    throw InputError("integrate: need finite t0 < t1");
  }
}

std::size_t step_count(double t0, double t1, double dt) {
  const double ratio = (t1 - t0) / dt;
  // Tolerate rounding so that an exact multiple does not yield a sliver step.
  const double steps = std::ceil(ratio - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(steps));
}

SampledPath integrate(const VectorField& field, const Vector& x0, double t0, double t1,
                      double dt) {
  SampledPath path;
  Vector x = x0;
  const std::size_t steps = t1 > t0 && dt > 0.0 ? step_count(t0, t1, dt) : 0;
  path.t.reserve(steps + 1);
  path.x.reserve(steps + 1);
  integrate_observed(field, x.span(), t0, t1, dt, [&](double t, std::span<const double> s) {
    path.t.push_back(t);
    path.x.emplace_back(s);
  });
  return path;
}

double step_halving_difference(const VectorField& field, const Vector& x0, double t0, double t1,
                               double dt) {
  Vector coarse = x0;
  Vector fine = x0;
  auto ignore = [](double, std::span<const double>) {};
  integrate_observed(field, coarse.span(), t0, t1, dt, ignore);
  integrate_observed(field, fine.span(), t0, t1, 0.5 * dt, ignore);
  const double scale = std::max(fine.norm(), 1e-300);
  return (coarse - fine).norm() / scale;
}

double dini_upper_estimate(std::span<const double> series, std::span<const double> t,
                           std::size_t index) {
  if (series.size() != t.size()) throw InputError("dini_upper_estimate: length mismatch");
  if (index + 1 >= series.size()) throw InputError("dini_upper_estimate: index is the last sample");
  return (series[index + 1] - series[index]) / (t[index + 1] - t[index]);
}

}  // namespace ofo
