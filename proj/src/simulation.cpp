#include "ofo/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "ofo/errors.hpp"
#include "ofo/format.hpp"
#include "ofo/integrate.hpp"

namespace ofo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUnboundedBracket = 1e6;
constexpr std::size_t kGridPoints = 2001;
constexpr double kGoldenTol = 1e-10;

double distance(const Vector& a, const Vector& b) { return (a - b).norm(); }

}  // namespace

DisturbanceSchedule::DisturbanceSchedule(std::vector<DisturbanceSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw InputError("schedule: needs at least one segment");
  if (segments_.front().t_start != 0.0) throw InputError("schedule: first segment must start at t = 0");
  const std::size_t q = segments_.front().w.size();
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!std::isfinite(s.t_start)) throw InputError("schedule: non-finite start time");
    if (s.w.size() != q) throw InputError("schedule: segment " + std::to_string(i) + " has a different disturbance dimension");
    if (!s.w.all_finite()) throw InputError("schedule: segment " + std::to_string(i) + " has a non-finite disturbance");
    if (i > 0 && !(s.t_start > segments_[i - 1].t_start)) {
      throw InputError("schedule: start times must be strictly increasing (segment " + std::to_string(i) + ")");
    }
  }
}

DisturbanceSchedule DisturbanceSchedule::constant(Vector w) {
  return DisturbanceSchedule({DisturbanceSegment{0.0, std::move(w)}});
}

DisturbanceSchedule DisturbanceSchedule::alternating(const std::vector<Vector>& values,
                                                     double period, double t_end) {
  if (values.empty()) throw InputError("schedule: no disturbance values");
  if (!(period > 0.0) || !(t_end > 0.0)) throw InputError("schedule: period and t_end must be positive");
  std::vector<DisturbanceSegment> segs;
  for (std::size_t k = 0; static_cast<double>(k) * period < t_end; ++k) {
    segs.push_back({static_cast<double>(k) * period, values[k % values.size()]});
  }
  return DisturbanceSchedule(std::move(segs));
}

std::size_t DisturbanceSchedule::segment_at(double t) const {
  std::size_t i = 0;
  while (i + 1 < segments_.size() && segments_[i + 1].t_start <= t) ++i;
  return i;
}

std::size_t Trajectory::segment_of(std::size_t sample) const {
  const auto it = std::upper_bound(segment_marks.begin(), segment_marks.end(), sample);
  return it == segment_marks.begin() ? 0 : static_cast<std::size_t>(it - segment_marks.begin()) - 1;
}

double default_time_step(const Plant& plant, const Controller& controller) {
  double stiffness = 1.0;
  double lk = controller.cost().grad_u_lipschitz();
  if (const auto* lti = dynamic_cast<const LtiPlant*>(&plant)) {
    stiffness = std::max(stiffness, lti->state_matrix_norm());
    try {
      const CostDescriptor d = controller.cost().descriptor(lti->ell_h(), lti->ell_grad_h());
      lk = d.L + d.ell_Phi_y * lti->ell_g() * lti->ell_h();
    } catch (const InputError&) {
      // The cost has no finite modulus for this plant; keep the L estimate.
    }
  }
  stiffness = std::max(stiffness, controller.effective_gain() * lk);
  // The projected law relaxes toward the box at rate alpha regardless of beta.
  if (controller.box()) stiffness = std::max(stiffness, controller.alpha());
  return std::clamp(0.02 / stiffness, 1e-6, 1e-2);
}

Vector optimal_input(const Plant& plant, const CostModel& cost, const BoxSet* box) {
  if (plant.input_dim() != 1) {
    throw InputError("optimal_input: the bundled solver handles scalar inputs; supply an optimum hook");
  }
  double lo = -kUnboundedBracket;
  double hi = kUnboundedBracket;
  const bool lo_bounded = box && std::isfinite(box->lo()[0]);
  const bool hi_bounded = box && std::isfinite(box->hi()[0]);
  if (lo_bounded) lo = box->lo()[0];
  if (hi_bounded) hi = box->hi()[0];

  Vector uv(1);
  auto reduced_cost = [&](double u) {
    uv[0] = u;
    const Vector y = plant.steady_output(uv);
    return cost.value(uv.span(), y.span());
  };

  if (lo == hi) return Vector{lo};

  // Coarse scan to locate the basin.
  std::size_t best = 0;
  double best_val = kInf;
  const double h = (hi - lo) / static_cast<double>(kGridPoints - 1);
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    const double u = i + 1 == kGridPoints ? hi : lo + static_cast<double>(i) * h;
    const double v = reduced_cost(u);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if ((best == 0 && !lo_bounded) || (best + 1 == kGridPoints && !hi_bounded)) {
    throw InputError("optimal_input: optimum not bracketed by [" + format_number(lo) + ", " +
                     format_number(hi) + "]; use a wider bracket or a box");
  }

  // Golden-section search on the neighbouring cells.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = best == 0 ? lo : lo + static_cast<double>(best - 1) * h;
  double b = best + 1 >= kGridPoints ? hi : std::min(hi, lo + static_cast<double>(best + 1) * h);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = reduced_cost(c);
  double fd = reduced_cost(d);
  while (b - a > kGoldenTol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = reduced_cost(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = reduced_cost(d);
    }
    if (b - a <= 0.0) break;
  }
  double u = 0.5 * (a + b);

  // Function values stop resolving the minimizer near sqrt(eps); polish on
  // the sign of a central-difference slope when it brackets a root.
  const double step = 1e-5 * std::max(1.0, std::abs(u));
  auto slope = [&](double v) { return (reduced_cost(v + step) - reduced_cost(v - step)) / (2.0 * step); };
  double pa = std::max(lo, u - 1e-6 * std::max(1.0, std::abs(u)));
  double pb = std::min(hi, u + 1e-6 * std::max(1.0, std::abs(u)));
  double sa = slope(pa);
  double sb = slope(pb);
  if (sa < 0.0 && sb > 0.0) {
    for (int it = 0; it < 200 && pb - pa > 0.0; ++it) {
      const double mid = 0.5 * (pa + pb);
      if (mid <= pa || mid >= pb) break;
      const double sm = slope(mid);
      if (sm < 0.0) {
        pa = mid;
      } else if (sm > 0.0) {
        pb = mid;
      } else {
        pa = pb = mid;
      }
    }
    u = 0.5 * (pa + pb);
  }

  // Active bounds win when they are at least as good.
  double best_u = u;
  double best_f = reduced_cost(u);
  if (lo_bounded && reduced_cost(lo) <= best_f) {
    best_u = lo;
    best_f = reduced_cost(lo);
  }
  if (hi_bounded && reduced_cost(hi) <= best_f) {
    best_u = hi;
  }
  return Vector{best_u};
}

Trajectory simulate(const Plant& plant, const Controller& controller,
                    const DisturbanceSchedule& schedule, const Vector& x0, const Vector& u0,
                    double t_end, const SimulationOptions& options) {
  const std::size_t n = plant.state_dim();
  const std::size_t m = plant.input_dim();
  const std::size_t p = plant.output_dim();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InputError("simulate: t_end must be positive");
  if (schedule.empty()) throw InputError("simulate: empty disturbance schedule");
  if (x0.size() != n) throw InputError("simulate: x0 has dimension " + std::to_string(x0.size()) + ", plant has " + std::to_string(n));
  if (u0.size() != m) throw InputError("simulate: u0 has dimension " + std::to_string(u0.size()) + ", plant has " + std::to_string(m));
  if (!x0.all_finite() || !u0.all_finite()) throw InputError("simulate: initial state must be finite");
  if (controller.model().input_dim() != m || controller.model().output_dim() != p) {
    throw InputError("simulate: controller model dimensions differ from the plant");
  }
  if (schedule.segments().front().w.size() != plant.disturbance().size()) {
    throw InputError("simulate: schedule disturbance dimension differs from the plant");
  }
  if (options.lyapunov && (options.lyapunov->weight.rows() != n || options.lyapunov->weight.cols() != n)) {
    throw InputError("simulate: Lyapunov weight must be n x n");
  }

  const double dt = options.dt.value_or(default_time_step(plant, controller));
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("simulate: dt must be positive");
  const double record_dt = options.record_dt.value_or(std::max(dt, 0.01));
  if (!(record_dt > 0.0)) throw InputError("simulate: record_dt must be positive");
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(record_dt / dt)));

  const BoxSet* box = controller.box();
  Trajectory tr;
  tr.dt = dt;
  if (box && !box->contains(u0.span())) {
    tr.warnings.emplace_back("u0 lies outside the input box; box invariance is not guaranteed");
  }

  std::vector<double> state(n + m);
  std::copy(x0.begin(), x0.end(), state.begin());
  std::copy(u0.begin(), u0.end(), state.begin() + static_cast<std::ptrdiff_t>(n));
  ControllerWorkspace ws(m, p);
  std::vector<double> ybuf(p);

  const auto& segs = schedule.segments();
  for (std::size_t si = 0; si < segs.size(); ++si) {
    const double ta = segs[si].t_start;
    if (ta >= t_end) break;
    const bool last = si + 1 == segs.size() || segs[si + 1].t_start >= t_end;
    const double tb = last ? t_end : segs[si + 1].t_start;

    const std::unique_ptr<Plant> seg_plant = plant.with_disturbance(segs[si].w);
    const Vector ustar = options.optimum ? options.optimum(*seg_plant, controller.cost(), box)
                                         : optimal_input(*seg_plant, controller.cost(), box);
    tr.ustar_per_segment.push_back(ustar);
    tr.xstar_per_segment.push_back(seg_plant->steady_state(ustar));
    tr.segment_start.push_back(ta);
    tr.segment_marks.push_back(tr.t.size());

    auto field = [&](double, std::span<const double> s, std::span<double> ds) {
      const auto xs = s.first(n);
      const auto us = s.subspan(n, m);
      seg_plant->dynamics(xs, us, ds.first(n));
      seg_plant->output(xs, ybuf);
      controller.rate(us, ybuf, ds.subspan(n, m), ws);
    };

    const std::size_t steps = step_count(ta, tb, dt);
    std::size_t k = 0;
    auto observe = [&](double t, std::span<const double> s) {
      const auto us = s.subspan(n, m);
      if (box) tr.max_box_violation = std::max(tr.max_box_violation, box->violation(us));
      const bool record = k == 0 || (k == steps ? last : k % stride == 0);
      if (record) {
        tr.t.push_back(t);
        tr.x.emplace_back(s.first(n));
        tr.u.emplace_back(us);
        Vector y(p);
        seg_plant->output(s.first(n), y.span());
        tr.y.push_back(std::move(y));
        tr.w.push_back(segs[si].w);
      }
      ++k;
    };
    integrate_observed(field, std::span<double>(state), ta, tb, dt, observe,
                       "segment " + std::to_string(si));
  }

  if (options.lyapunov) tr.V = lyapunov_trace(tr, *options.lyapunov);
  return tr;
}

Trajectory simulate(const SimulationSetup& setup) {
  if (!setup.plant || !setup.controller) throw InputError("simulate: setup needs a plant and a controller");
  return simulate(*setup.plant, *setup.controller, setup.schedule, setup.x0, setup.u0, setup.t_end,
                  setup.options);
}

std::vector<double> lyapunov_trace(const Trajectory& traj, const LyapunovSpec& spec) {
  std::vector<double> v(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const std::size_t s = traj.segment_of(i);
    const Vector e = traj.x[i] - traj.xstar_per_segment[s];
    const Vector pe = spec.weight * e;
    const Vector du = traj.u[i] - traj.ustar_per_segment[s];
    v[i] = std::max(spec.xi * dot(e.span(), pe.span()), 0.5 * dot(du.span(), du.span()));
  }
  return v;
}

EnvelopeResult envelope_check(std::span<const double> V, std::span<const double> t, double tau) {
  if (V.size() != t.size()) throw InputError("envelope_check: length mismatch");
  if (!(tau >= 0.0)) throw InputError("envelope_check: tau must be nonnegative");
  EnvelopeResult r;
  if (V.empty()) return r;
  for (std::size_t i = 0; i < V.size(); ++i) {
    const double bound = V[0] * std::exp(-tau * (t[i] - t[0]));
    if (V[i] > bound * (1.0 + 1e-6)) r.holds = false;
    const double ratio = bound > 0.0 ? V[i] / bound : (V[i] > 0.0 ? kInf : 0.0);
    r.worst_ratio = std::max(r.worst_ratio, ratio);
  }
  return r;
}

RunMetrics run_metrics(const Trajectory& traj) {
  RunMetrics rm;
  rm.max_violation = traj.max_box_violation;
  const std::size_t nseg = traj.segment_marks.size();
  for (std::size_t s = 0; s < nseg; ++s) {
    const std::size_t a = traj.segment_marks[s];
    const std::size_t b = s + 1 < nseg ? traj.segment_marks[s + 1] : traj.size() - 1;
    const Vector& ustar = traj.ustar_per_segment[s];
    SegmentMetrics sm;
    sm.t_start = traj.t[a];
    sm.t_end = traj.t[b];
    sm.ustar = ustar;
    sm.final_error = distance(traj.u[b], ustar);

    const Vector approach = ustar - traj.u[a];
    const double step = approach.norm();
    const double band = 0.01 * std::max(step, ustar.norm());
    std::optional<std::size_t> last_out;
    for (std::size_t i = a; i <= b; ++i) {
      if (distance(traj.u[i], ustar) > band) last_out = i;
    }
    if (!last_out) {
      sm.settling_time = 0.0;
    } else if (*last_out >= b) {
      sm.settling_time = kInf;
    } else {
      sm.settling_time = traj.t[*last_out + 1] - traj.t[a];
    }

    if (step > 0.0) {
      const Vector dir = (1.0 / step) * approach;
      for (std::size_t i = a; i <= b; ++i) {
        const Vector e = traj.u[i] - ustar;
        sm.overshoot = std::max(sm.overshoot, dot(dir.span(), e.span()));
      }
    }
    rm.settling_time = std::max(rm.settling_time, sm.settling_time);
    rm.overshoot = std::max(rm.overshoot, sm.overshoot);
    rm.final_error = sm.final_error;
    rm.segments.push_back(std::move(sm));
  }
  return rm;
}

std::vector<SweepRow> sweep_alpha(const SimulationSetup& setup, std::span<const double> alphas,
                                  unsigned threads) {
  if (!setup.plant || !setup.controller) throw InputError("sweep: setup needs a plant and a controller");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InputError("sweep: alpha values must be positive, got " + format_number(a));
  }
  std::vector<SweepRow> rows(alphas.size());
  auto run_one = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.alpha = alphas[i];
    try {
      const auto ctrl = setup.controller->with_alpha(alphas[i]);
      row.trajectory = simulate(*setup.plant, *ctrl, setup.schedule, setup.x0, setup.u0,
                                setup.t_end, setup.options);
      row.metrics = run_metrics(row.trajectory);
      row.ok = true;
    } catch (const DivergenceError& e) {
      row.diverged = true;
      row.error = e.what();
    } catch (const Error& e) {
      row.error = e.what();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(alphas.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < alphas.size(); ++i) run_one(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < alphas.size(); i = next++) run_one(i);
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

std::string trajectory_csv_header(std::size_t n, std::size_t m, std::size_t p, std::size_t q) {
  std::string h = "t";
  auto cols = [&](const char* prefix, std::size_t count) {
    for (std::size_t i = 1; i <= count; ++i) h += "," + std::string(prefix) + std::to_string(i);
  };
  cols("x", n);
  cols("u", m);
  cols("y", p);
  cols("w", q);
  h += ",V";
  cols("ustar", m);
  return h;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const std::size_t n = traj.x.empty() ? 0 : traj.x[0].size();
  const std::size_t m = traj.u.empty() ? 0 : traj.u[0].size();
  const std::size_t p = traj.y.empty() ? 0 : traj.y[0].size();
  const std::size_t q = traj.w.empty() ? 0 : traj.w[0].size();
  out << trajectory_csv_header(n, m, p, q) << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_number(traj.t[i]);
    for (const Vector* v : {&traj.x[i], &traj.u[i], &traj.y[i], &traj.w[i]}) {
      for (double e : *v) out << ',' << format_number(e);
    }
    out << ',';
    if (!traj.V.empty()) out << format_number(traj.V[i]);
    for (double e : traj.ustar_per_segment[traj.segment_of(i)]) out << ',' << format_number(e);
    out << '\n';
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  write_trajectory_csv(traj, os);
  return os.str();
}

std::string sweep_summary_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << "alpha,settling_time,overshoot,final_error,max_violation,status\n";
  for (const auto& r : rows) {
    os << format_number(r.alpha) << ',';
    if (r.ok) {
      os << format_number(r.metrics.settling_time) << ',' << format_number(r.metrics.overshoot) << ','
         << format_number(r.metrics.final_error) << ',' << format_number(r.metrics.max_violation)
         << ",ok\n";
    } else {
      os << "nan,nan,nan,nan," << (r.diverged ? "diverged" : "error") << '\n';
    }
  }
  return os.str();
}

}  // namespace ofo
