#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ofo/controller.hpp"
#include "ofo/cost.hpp"
#include "ofo/linalg.hpp"
#include "ofo/plant.hpp"

namespace ofo {

struct DisturbanceSegment {
  double t_start = 0.0;
  Vector w;

  friend bool operator==(const DisturbanceSegment&, const DisturbanceSegment&) = default;
};

/// Piecewise-constant disturbance: w(t) = segments[i].w on
/// [segments[i].t_start, segments[i+1].t_start).
class DisturbanceSchedule {
 public:
  DisturbanceSchedule() = default;
  /// Throws InputError unless nonempty, first t_start == 0, strictly
  /// increasing, finite, and all w of equal dimension.
  explicit DisturbanceSchedule(std::vector<DisturbanceSegment> segments);

  static DisturbanceSchedule constant(Vector w);
  /// Cycles through `values`, switching every `period` until t_end.
  static DisturbanceSchedule alternating(const std::vector<Vector>& values, double period,
                                         double t_end);

  const std::vector<DisturbanceSegment>& segments() const noexcept { return segments_; }
  bool empty() const noexcept { return segments_.empty(); }
  std::size_t segment_at(double t) const;

  friend bool operator==(const DisturbanceSchedule&, const DisturbanceSchedule&) = default;

 private:
  std::vector<DisturbanceSegment> segments_;
};

/// V = max{xi (x - x*)^T P (x - x*), 0.5 ||u - u*||^2}
struct LyapunovSpec {
  double xi = 1.0;
  Matrix weight;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> x, u, y, w;
  std::vector<double> V;  // empty unless a LyapunovSpec was supplied
  /// Index of the first sample of each simulated segment. A sample taken at a
  /// switching instant belongs to the segment that starts there.
  std::vector<std::size_t> segment_marks;
  std::vector<double> segment_start;
  std::vector<Vector> ustar_per_segment;
  std::vector<Vector> xstar_per_segment;
  double dt = 0.0;
  /// Largest box violation over every integration step, not just samples.
  double max_box_violation = 0.0;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return t.size(); }
  std::size_t segment_of(std::size_t sample) const;
};

/// Steady-state optimum for the plant's current disturbance.
using OptimumHook =
    std::function<Vector(const Plant& plant, const CostModel& cost, const BoxSet* box)>;

struct SimulationOptions {
  std::optional<double> dt;         // default_time_step() when absent
  std::optional<double> record_dt;  // max(dt, 0.01) when absent
  OptimumHook optimum;              // required for multi-input plants
  std::optional<LyapunovSpec> lyapunov;
};

/// 0.02 / max(1, ||A||, gain * L_k) clamped to [1e-6, 1e-2], with
/// L_k = L + ell_Phi_y * ell_g * ell_h the controller-field stiffness estimate
/// and gain the controller's effective gain (alpha * beta when projected, in
/// which case alpha itself also enters the max).
double default_time_step(const Plant& plant, const Controller& controller);

/// Integrates x' = f(x, u), u' = controller(u, g(x)) segment by segment with
/// fixed-step RK4, landing exactly on every switching time. Samples are
/// recorded every record_dt (rounded to whole steps), at every switch and at
/// t_end. Throws DivergenceError naming the blow-up time and segment.
Trajectory simulate(const Plant& plant, const Controller& controller,
                    const DisturbanceSchedule& schedule, const Vector& x0, const Vector& u0,
                    double t_end, const SimulationOptions& options = {});

/// Minimizer of Phi(u, h(u)) over the box (or [-1e6, 1e6] when unbounded) for
/// scalar inputs: grid scan, golden-section search to 1e-10, then a bisection
/// polish on the central-difference slope. Throws InputError for m > 1 or
/// when the unconstrained optimum is not bracketed.
Vector optimal_input(const Plant& plant, const CostModel& cost, const BoxSet* box = nullptr);

std::vector<double> lyapunov_trace(const Trajectory& traj, const LyapunovSpec& spec);

struct EnvelopeResult {
  bool holds = true;
  double worst_ratio = 0.0;  // max V[i] / (V[0] e^{-tau (t[i]-t[0])})
};

/// Checks V[i] <= V[0] e^{-tau (t[i]-t[0])} (1 + 1e-6) for a single segment.
EnvelopeResult envelope_check(std::span<const double> V, std::span<const double> t, double tau);

struct SegmentMetrics {
  double t_start = 0.0;
  double t_end = 0.0;
  Vector ustar;
  double final_error = 0.0;
  double settling_time = 0.0;  // inf when the 1% band is never kept
  double overshoot = 0.0;
};

struct RunMetrics {
  double settling_time = 0.0;  // max over segments
  double overshoot = 0.0;      // max over segments
  double final_error = 0.0;    // ||u(t_end) - u*|| of the last segment
  double max_violation = 0.0;
  std::vector<SegmentMetrics> segments;
};

/// Settling uses the band 0.01 * max(||u(t_s) - u*||, ||u*||) around each
/// segment optimum; overshoot is the largest excess past u* along the
/// direction of approach.
RunMetrics run_metrics(const Trajectory& traj);

struct SimulationSetup {
  std::shared_ptr<const Plant> plant;
  std::shared_ptr<const Controller> controller;
  DisturbanceSchedule schedule;
  Vector x0;
  Vector u0;
  double t_end = 0.0;
  SimulationOptions options;
};

Trajectory simulate(const SimulationSetup& setup);

struct SweepRow {
  double alpha = 0.0;
  bool ok = false;
  bool diverged = false;
  std::string error;
  RunMetrics metrics;
  Trajectory trajectory;
};

/// One independent run per alpha, at most `threads` at a time. Rows come
/// back in the order of `alphas`. Per-run failures are recorded in the row.
/// Throws InputError if any alpha is not positive.
std::vector<SweepRow> sweep_alpha(const SimulationSetup& setup, std::span<const double> alphas,
                                  unsigned threads = 1);

std::string trajectory_csv_header(std::size_t n, std::size_t m, std::size_t p, std::size_t q);
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
std::string trajectory_csv(const Trajectory& traj);
std::string sweep_summary_csv(std::span<const SweepRow> rows);

}  // namespace ofo
