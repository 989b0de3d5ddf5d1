#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ofo/certificate.hpp"
#include "ofo/errors.hpp"
#include "ofo/integrate.hpp"
#include "ofo/simulation.hpp"
#include "support.hpp"

using namespace ofo;

namespace {

std::shared_ptr<GradientOfoController> linear_controller(double alpha, std::shared_ptr<const CostModel> cost = nullptr) {
  if (!cost) cost = test::linear_example_cost();
  return std::make_shared<GradientOfoController>(alpha, cost, test::linear_example());
}

std::shared_ptr<ProjectedOfoController> sine_controller(double alpha) {
  return std::make_shared<ProjectedOfoController>(alpha, test::sine_example_box(), test::sine_example_cost(),
                                                  test::sine_example());
}

/// Closed loop of the linear example under the gradient controller as z' = M z + c,
/// z = (x1, x2, u), written out from the plant matrices and the quadratic cost.
test::Dense linear_loop_matrix(double alpha, double q_u, double q_y) {
  const double hb = 10.0 / 101.0;
  // u' = -alpha (2 q_u u + hb * 2 q_y x1)
  return {{-1, 10, 0}, {-10, -1, 1}, {-alpha * 2 * q_y * hb, 0, -alpha * 2 * q_u}};
}

double sine_cost(double u, double w) {
  const double y = -(u + std::sin(u)) + w;
  return 11.0 * u * u + std::sqrt(1.0 + y * y);
}

SimplifyingConstants moderate_certified_constants(std::mt19937_64& g) {
  SimplifyingConstants k;
  k.ell_f = test::log_uniform(g, -1, 1);
  k.ell_g = test::log_uniform(g, -1, 1);
  k.c3 = test::log_uniform(g, -1, 1);
  k.d3 = k.c3 * test::log_uniform(g, 0, 1);
  k.mu3 = test::log_uniform(g, -1, 1);
  k.zeta3 = test::log_uniform(g, -1, 1);
  k.ell_Phi_u = test::uniform(g, 0, 1) < 0.3 ? 0.0 : test::log_uniform(g, -1, 1);
  k.ell_Phi_y = test::log_uniform(g, -1, 1);
  k.mu_Phi = k.ell_Phi_u;  // raised above the bound below
  k.L = 1.0;
  const double rhs = check_mu_bound(k).rhs;
  k.mu_Phi = k.ell_Phi_u + (rhs - k.ell_Phi_u) * test::uniform(g, 1.5, 10.0);
  k.L = 2.0 * k.mu_Phi;
  return k;
}

}  // namespace

TEST_CASE("disturbance schedule validation") {
  CHECK_THROWS_AS(DisturbanceSchedule(std::vector<DisturbanceSegment>{}), InputError);
  CHECK_THROWS_AS(DisturbanceSchedule({{1.0, Vector{0}}}), InputError);
  CHECK_THROWS_AS(DisturbanceSchedule({{0.0, Vector{0}}, {0.0, Vector{1}}}), InputError);
  CHECK_THROWS_AS(DisturbanceSchedule({{0.0, Vector{0}}, {2.0, Vector{1}}, {1.0, Vector{1}}}), InputError);
  CHECK_THROWS_AS(DisturbanceSchedule({{0.0, Vector{0}}, {1.0, Vector{1, 2}}}), InputError);
  CHECK_THROWS_AS(DisturbanceSchedule({{0.0, Vector{NAN}}}), InputError);

  const DisturbanceSchedule s({{0.0, Vector{10}}, {5.0, Vector{-10}}, {10.0, Vector{10}}});
  CHECK(s.segment_at(0.0) == 0);
  CHECK(s.segment_at(4.999) == 0);
  CHECK(s.segment_at(5.0) == 1);
  CHECK(s.segment_at(100.0) == 2);

  const DisturbanceSchedule alt = DisturbanceSchedule::alternating({Vector{10}, Vector{-10}}, 5.0, 20.0);
  REQUIRE(alt.segments().size() == 4);
  CHECK(alt.segments()[3].t_start == 15.0);
  CHECK(alt.segments()[3].w == Vector{-10});
  CHECK(DisturbanceSchedule::constant(Vector{3}).segments().size() == 1);
}

TEST_CASE("optimal input examples") {
  const QuadraticCost q(0.01, 1.0);
  CHECK(std::abs(optimal_input(*test::linear_example(0.0), q)[0]) <= 1e-9);
  CHECK(std::abs(optimal_input(*test::sine_example(0.0), SqrtPlusCost(11.0))[0]) <= 1e-9);

  for (double w : {10.0, -10.0, 3.0}) {
    const double u = optimal_input(*test::linear_example(w), q)[0];
    CHECK(std::abs(u - test::linear_example_optimum(w)) <= 1e-6);
  }
  const double u10 = optimal_input(*test::linear_example(10.0), q)[0];
  CHECK(u10 == doctest::Approx(-5.44527).epsilon(1e-6));
  CHECK(test::linear_example(10.0)->steady_output(Vector{u10})[0] == doctest::Approx(0.54997).epsilon(1e-5));
}

TEST_CASE("optimal input with an active box matches a fine grid") {
  const BoxSet box = test::sine_example_box();
  for (double w : {0.001, -0.001, 1e-5}) {
    const double u = optimal_input(*test::sine_example(w), SqrtPlusCost(11.0), &box)[0];
    double best = -5e-5, best_val = sine_cost(best, w);
    for (int i = 0; i <= 100000; ++i) {
      const double c = -5e-5 + i * 1e-9;
      if (const double v = sine_cost(c, w); v < best_val) {
        best_val = v;
        best = c;
      }
    }
    // Cost differences below ~3e-9 in u drop under double resolution, so compare values.
    CHECK(sine_cost(u, w) <= best_val + 4e-16);
    CHECK(std::abs(u - best) <= 1e-8);
  }
  CHECK(optimal_input(*test::sine_example(0.001), SqrtPlusCost(11.0), &box)[0] == 5e-5);
  CHECK(optimal_input(*test::sine_example(-0.001), SqrtPlusCost(11.0), &box)[0] == -5e-5);
  // Unconstrained minimizer lies outside the box.
  CHECK(optimal_input(*test::sine_example(0.001), SqrtPlusCost(11.0))[0] == doctest::Approx(9.09e-5).epsilon(1e-3));
}

TEST_CASE("optimal input errors") {
  CHECK_THROWS_WITH_AS(optimal_input(*test::linear_example(1e7), QuadraticCost(0.01, 1.0)),
                       doctest::Contains("bracket"), InputError);
  PlantFunctions fns;
  fns.f = [](const Vector& x, const Vector& u, const Vector&) { return Vector{-x[0] + u[0] + u[1]}; };
  fns.g = [](const Vector& x) { return x; };
  fns.s = [](const Vector& u, const Vector&) { return Vector{u[0] + u[1]}; };
  fns.grad_h = [](const Vector&, const Vector&) { return Matrix{{1, 1}}; };
  const FunctionPlant two_input(1, 2, 1, fns, Vector{0});
  CHECK_THROWS_AS(optimal_input(two_input, QuadraticCost(1.0, 1.0)), InputError);
}

TEST_CASE("starting at the equilibrium stays there") {
  SUBCASE("gradient loop") {
    const auto plant = test::linear_example(10.0);
    const auto ctrl = linear_controller(100.0);
    const Vector us = optimal_input(*plant, ctrl->cost());
    const Vector xs = plant->steady_state(us);
    const Trajectory tr = simulate(*plant, *ctrl, DisturbanceSchedule::constant(Vector{10}), xs, us, 5.0);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      CHECK((tr.x[i] - xs).max_abs() <= 1e-8);
      CHECK((tr.u[i] - us).max_abs() <= 1e-8);
    }
  }
  SUBCASE("projected loop on the active face") {
    const auto plant = test::sine_example(0.001);
    const auto ctrl = sine_controller(100.0);
    const BoxSet box = test::sine_example_box();
    const Vector us = optimal_input(*plant, ctrl->cost(), &box);
    const Vector xs = plant->steady_state(us);
    const Trajectory tr = simulate(*plant, *ctrl, DisturbanceSchedule::constant(Vector{0.001}), xs, us, 50.0);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      CHECK((tr.x[i] - xs).max_abs() <= 1e-8);
      CHECK((tr.u[i] - us).max_abs() <= 1e-8);
    }
  }
}

TEST_CASE("trajectory bookkeeping") {
  const auto plant = test::linear_example();
  const auto ctrl = linear_controller(10.0);
  const auto sched = DisturbanceSchedule::alternating({Vector{10}, Vector{-10}}, 5.0, 20.0);
  const Trajectory tr = simulate(*plant, *ctrl, sched, Vector{0, 0}, Vector{0}, 20.0);
  REQUIRE(tr.segment_marks.size() == 4);
  CHECK(tr.t.front() == 0.0);
  CHECK(tr.t.back() == 20.0);
  for (std::size_t s = 0; s < 4; ++s) {
    CHECK(tr.t[tr.segment_marks[s]] == 5.0 * static_cast<double>(s));
    CHECK(std::abs(tr.ustar_per_segment[s][0] - test::linear_example_optimum(s % 2 == 0 ? 10.0 : -10.0)) <= 1e-6);
  }
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.t[i] > tr.t[i - 1]);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.y[i] == plant->output(tr.x[i]));
    CHECK(tr.w[i] == sched.segments()[tr.segment_of(i)].w);
  }
  CHECK(tr.V.empty());
}

TEST_CASE("linear loop agrees with the exact matrix-exponential solution") {
  // The closed loop of the linear example is affine, so exp(M t) gives it exactly.
  for (double alpha : {1.0, 10.0, 100.0}) {
    const auto plant = test::linear_example();
    const auto ctrl = linear_controller(alpha);
    const Trajectory tr =
        simulate(*plant, *ctrl, DisturbanceSchedule::constant(Vector{10}), Vector{0, 0}, Vector{0}, 10.0);
    const auto z = test::affine_flow(linear_loop_matrix(alpha, 0.01, 1.0), {10, 10, 0}, {0, 0, 0}, 10.0);
    CHECK(test::rel_err(tr.x.back()[0], z[0]) <= 1e-6);
    CHECK(test::rel_err(tr.x.back()[1], z[1]) <= 1e-6);
    CHECK(test::rel_err(tr.u.back()[0], z[2]) <= 1e-6);
  }
}

TEST_CASE("projected loop never leaves the box") {
  const auto plant = test::sine_example();
  const auto sched = DisturbanceSchedule::alternating({Vector{0.001}, Vector{-0.001}}, 50.0, 200.0);
  for (double alpha : {1.0, 10.0, 100.0}) {
    const Trajectory tr = simulate(*plant, *sine_controller(alpha), sched, Vector{0, 0}, Vector{0}, 200.0);
    CHECK(tr.max_box_violation <= 1e-12);
    for (const Vector& u : tr.u) CHECK(std::abs(u[0]) <= 5e-5 + 1e-12);
    CHECK(tr.warnings.empty());
  }
  const Trajectory outside =
      simulate(*plant, *sine_controller(10.0), sched, Vector{0, 0}, Vector{1e-4}, 1.0);
  CHECK(outside.warnings.size() == 1);
}

TEST_CASE("lyapunov trace examples") {
  Trajectory tr;
  tr.t = {0.0, 1.0};
  tr.x = {Vector{1, 2}, Vector{2, 2}};
  tr.u = {Vector{3}, Vector{3}};
  tr.segment_marks = {0};
  tr.segment_start = {0.0};
  tr.ustar_per_segment = {Vector{3}};
  tr.xstar_per_segment = {Vector{1, 2}};
  const LyapunovSpec spec{1.0, Matrix::identity(2)};
  const std::vector<double> v = lyapunov_trace(tr, spec);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 1.0);
  tr.u[1] = Vector{5};
  CHECK(lyapunov_trace(tr, spec)[1] == 2.0);
  CHECK(lyapunov_trace(tr, LyapunovSpec{4.0, Matrix::identity(2)})[1] == 4.0);
}

TEST_CASE("envelope check examples") {
  std::vector<double> t, zero, fast, slow;
  for (int i = 0; i <= 100; ++i) {
    const double ti = 0.05 * i;
    t.push_back(ti);
    zero.push_back(0.0);
    fast.push_back(std::exp(-2.0 * ti));
    slow.push_back(std::exp(-0.5 * ti));
  }
  CHECK(envelope_check(zero, t, 1.0).holds);
  const EnvelopeResult f = envelope_check(fast, t, 1.0);
  CHECK(f.holds);
  CHECK(f.worst_ratio <= 1.0);
  const EnvelopeResult s = envelope_check(slow, t, 1.0);
  CHECK_FALSE(s.holds);
  CHECK(s.worst_ratio == doctest::Approx(std::exp(0.5 * 5.0)));
  CHECK_THROWS_AS(envelope_check(fast, std::vector<double>{0.0}, 1.0), InputError);
}

TEST_CASE("comparison system decays within the certified envelope") {
  auto g = test::rng(61);
  for (int draw = 0; draw < 100; ++draw) {
    const SimplifyingConstants k = moderate_certified_constants(g);
    for (double alpha : {0.01, 1.0, 1000.0}) {
      const CertificateReport r = certify(k, alpha, alpha);
      REQUIRE(r.certified);
      REQUIRE(r.tau);
      const DominanceParams& p = *r.params;
      const double xi = r.xi->chosen;
      const double tau = *r.tau;
      const test::Dense m{{-p.mu1, p.theta1}, {alpha * p.theta2, -alpha * p.mu2}};
      const std::vector<double> z0{test::uniform(g, 0, 1), test::uniform(g, 0, 1)};
      const double horizon = 3.0 / tau;
      std::vector<double> ts, vs;
      for (int i = 0; i <= 200; ++i) {
        const double t = horizon * i / 200.0;
        const auto z = test::affine_flow(m, {0, 0}, z0, t);
        ts.push_back(t);
        vs.push_back(std::max(xi * z[0], z[1]));
      }
      const EnvelopeResult e = envelope_check(vs, ts, tau);
      CHECK_MESSAGE(e.holds, "draw ", draw, " alpha ", alpha, " worst ratio ", e.worst_ratio);
    }
  }
}

namespace {

/// Share of samples where the forward-difference Dini estimate of V stays
/// below -tau V plus the slack tau V 0.05 + 1e-9.
double dini_decrease_share(const Trajectory& tr, double tau) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    const double d = dini_upper_estimate(tr.V, tr.t, i);
    if (d <= -tau * tr.V[i] + tau * tr.V[i] * 0.05 + 1e-9) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(tr.size() - 1);
}

struct RegularizedLinearLoop {
  std::shared_ptr<LinearPlant> plant = test::linear_example();
  PlantConstants pk = derive_plant_constants(*plant);
  double needed = certify(combine_constants(pk, test::linear_example_cost()->descriptor(plant->ell_h(), 0.0)),
                          1.0, 1.0)
                      .required_mu4;

  std::shared_ptr<RegularizedCost> cost(double scale) const {
    return std::make_shared<RegularizedCost>(test::linear_example_cost(), scale * needed);
  }
  CertificateReport report(double scale, double alpha) const {
    return certify(combine_constants(pk, cost(scale)->descriptor(plant->ell_h(), 0.0)), alpha, alpha);
  }
  Trajectory run(double scale, double alpha, double xi) const {
    SimulationOptions opt;
    opt.lyapunov = LyapunovSpec{xi, pk.weight};
    return simulate(*plant, *linear_controller(alpha, cost(scale)), DisturbanceSchedule::constant(Vector{10}),
                    Vector{0, 0}, Vector{0}, 5.0, opt);
  }
};

}  // namespace

TEST_CASE("lyapunov trace decreases along a certified closed loop") {
  const RegularizedLinearLoop loop;
  for (double alpha : {1.0, 10.0, 100.0}) {
    const CertificateReport r = loop.report(4.0, alpha);
    REQUIRE(r.certified);
    const Trajectory tr = loop.run(4.0, alpha, r.xi->chosen);
    CHECK_MESSAGE(dini_decrease_share(tr, *r.tau) >= 0.99, "alpha ", alpha);
  }
}

TEST_CASE("plant-side coupling coefficient needs twice the closed form") {
  // Young's inequality on l_f zeta3 |e| |du| leaves l_f^2 zeta3^2 / (2 mu3) |du|^2,
  // which is l_f^2 zeta3^2 / mu3 times Vu = |du|^2 / 2.
  const RegularizedLinearLoop loop;
  const Matrix& a = loop.plant->a();
  const Matrix& b = loop.plant->b();
  const Matrix& p = loop.pk.weight;
  const DominanceParams dp = loop.report(1.0, 1.0).params.value();
  auto vx_rate = [&](const Vector& e, double du) {
    // d/dt (e^T P e) with e' = A e + B du.
    const Vector de = a * e + Vector{b(0, 0) * du, b(1, 0) * du};
    return 2.0 * dot(e.span(), (p * de).span());
  };
  auto vx = [&](const Vector& e) { return dot(e.span(), (p * e).span()); };

  const Vector e{0.0, 0.5};
  CHECK(vx_rate(e, 1.0) > -dp.mu1 * vx(e) + dp.theta1 * 0.5);

  auto g = test::rng(62);
  for (int i = 0; i < 1000; ++i) {
    const Vector ei{test::uniform(g, -1, 1), test::uniform(g, -1, 1)};
    const double du = test::uniform(g, -1, 1);
    CHECK(vx_rate(ei, du) <= -dp.mu1 * vx(ei) + 2.0 * dp.theta1 * 0.5 * du * du + 1e-12);
  }

  // With the doubled coefficient (and the equally valid doubled mu2, which keeps
  // the feasibility test unchanged) the minimally regularized loop decreases.
  for (double alpha : {1.0, 10.0, 100.0}) {
    const CertificateReport r = loop.report(1.0, alpha);
    REQUIRE(r.certified);
    DominanceParams q = *r.params;
    q.theta1 *= 2.0;
    q.mu2 *= 2.0;
    const auto xi = feasible_xi(q);
    REQUIRE(xi);
    const double tau = decay_rate(q, xi->chosen, alpha);
    const Trajectory tr = loop.run(1.0, alpha, xi->chosen);
    CHECK_MESSAGE(dini_decrease_share(tr, tau) >= 0.99, "alpha ", alpha);
  }
}

TEST_CASE("halving the step leaves the end state unchanged") {
  const auto sched1 = DisturbanceSchedule::alternating({Vector{10}, Vector{-10}}, 5.0, 20.0);
  for (double alpha : {1.0, 10.0, 100.0}) {
    const auto plant = test::linear_example();
    const auto ctrl = linear_controller(alpha);
    const double dt = default_time_step(*plant, *ctrl);
    SimulationOptions a, b;
    a.dt = dt;
    b.dt = dt / 2;
    const Trajectory ta = simulate(*plant, *ctrl, sched1, Vector{0, 0}, Vector{0}, 20.0, a);
    const Trajectory tb = simulate(*plant, *ctrl, sched1, Vector{0, 0}, Vector{0}, 20.0, b);
    const double scale = std::max(1.0, tb.u.back().norm());
    CHECK((ta.u.back() - tb.u.back()).norm() / scale <= 1e-6);
    CHECK((ta.x.back() - tb.x.back()).norm() / std::max(1.0, tb.x.back().norm()) <= 1e-6);
  }
}

TEST_CASE("default time step") {
  const auto plant = test::linear_example();
  // ||A|| = sqrt(101) dominates for small alpha.
  CHECK(default_time_step(*plant, *linear_controller(1.0)) == doctest::Approx(0.02 / std::sqrt(101.0)));
  CHECK(default_time_step(*plant, *linear_controller(1e9)) == 1e-6);
  const double big = default_time_step(*plant, *linear_controller(1000.0));
  CHECK(big < default_time_step(*plant, *linear_controller(100.0)));
}

TEST_CASE("run metrics on a hand-made trajectory") {
  Trajectory tr;
  tr.t = {0, 1, 2, 3, 4};
  tr.u = {Vector{0}, Vector{0.5}, Vector{1.2}, Vector{0.995}, Vector{1.0}};
  tr.segment_marks = {0};
  tr.ustar_per_segment = {Vector{1}};
  tr.max_box_violation = 0.25;
  const RunMetrics m = run_metrics(tr);
  CHECK(m.settling_time == 3.0);
  CHECK(m.overshoot == doctest::Approx(0.2));
  CHECK(m.final_error == 0.0);
  CHECK(m.max_violation == 0.25);

  tr.u.back() = Vector{0.5};
  CHECK(std::isinf(run_metrics(tr).settling_time));
  tr.u = {Vector{1}, Vector{1}, Vector{1}, Vector{1}, Vector{1}};
  CHECK(run_metrics(tr).settling_time == 0.0);
  CHECK(run_metrics(tr).overshoot == 0.0);
}

TEST_CASE("sweep rows") {
  SimulationSetup setup;
  setup.plant = test::linear_example();
  setup.controller = linear_controller(1.0);
  setup.schedule = DisturbanceSchedule::alternating({Vector{10}, Vector{-10}}, 5.0, 10.0);
  setup.x0 = Vector{0, 0};
  setup.u0 = Vector{0};
  setup.t_end = 10.0;

  SUBCASE("a single alpha reproduces a plain run bit for bit") {
    const std::vector<double> alphas{100.0};
    const auto rows = sweep_alpha(setup, alphas);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].ok);
    const Trajectory direct = simulate(*setup.plant, *linear_controller(100.0), setup.schedule, setup.x0, setup.u0,
                                       setup.t_end);
    CHECK(rows[0].trajectory.t == direct.t);
    CHECK(rows[0].trajectory.x == direct.x);
    CHECK(rows[0].trajectory.u == direct.u);
  }
  SUBCASE("order and thread count do not matter") {
    const std::vector<double> fwd{1.0, 10.0, 100.0}, rev{100.0, 10.0, 1.0};
    const auto a = sweep_alpha(setup, fwd, 1);
    const auto b = sweep_alpha(setup, rev, 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a[i].alpha == fwd[i]);
      CHECK(a[i].trajectory.u == b[2 - i].trajectory.u);
      CHECK(a[i].metrics.final_error == b[2 - i].metrics.final_error);
    }
  }
  SUBCASE("divergence is recorded per row") {
    setup.options.dt = 0.01;
    const std::vector<double> alphas{1.0, 1e7};
    const auto rows = sweep_alpha(setup, alphas);
    CHECK(rows[0].ok);
    CHECK_FALSE(rows[1].ok);
    CHECK(rows[1].diverged);
    CHECK(rows[1].error.find("divergence") != std::string::npos);
    const std::string csv = sweep_summary_csv(rows);
    CHECK(csv.find("\n10000000,nan,nan,nan,nan,diverged\n") != std::string::npos);
  }
  SUBCASE("non-positive alpha is rejected") {
    const std::vector<double> alphas{1.0, -1.0};
    CHECK_THROWS_AS(sweep_alpha(setup, alphas), InputError);
  }
}

TEST_CASE("divergence names the time and segment") {
  const auto plant = test::linear_example();
  SimulationOptions opt;
  opt.dt = 0.01;
  const auto sched = DisturbanceSchedule::alternating({Vector{10}, Vector{-10}}, 5.0, 10.0);
  try {
    simulate(*plant, *linear_controller(1e7), sched, Vector{0, 0}, Vector{0}, 10.0, opt);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("segment 0") != std::string::npos);
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 5.0);
  }
}

TEST_CASE("trajectory CSV") {
  CHECK(trajectory_csv_header(2, 1, 1, 1) == "t,x1,x2,u1,y1,w1,V,ustar1");
  CHECK(trajectory_csv_header(3, 2, 1, 2) == "t,x1,x2,x3,u1,u2,y1,w1,w2,V,ustar1,ustar2");

  const auto plant = test::linear_example();
  SimulationOptions opt;
  opt.lyapunov = LyapunovSpec{1.0, Matrix::identity(2)};
  opt.record_dt = 0.5;
  const Trajectory tr = simulate(*plant, *linear_controller(10.0), DisturbanceSchedule::constant(Vector{10}),
                                 Vector{0, 0}, Vector{0}, 2.0, opt);
  const std::string csv = trajectory_csv(tr);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x1,x2,u1,y1,w1,V,ustar1");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
  }
  CHECK(rows == tr.size());
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.back() == '\n');
  CHECK(csv.find("\n0,0,0,0,0,10,") != std::string::npos);

  const std::string summary = sweep_summary_csv({});
  CHECK(summary == "alpha,settling_time,overshoot,final_error,max_violation,status\n");
}
