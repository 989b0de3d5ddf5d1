// Command-line front end. Links only the C interface.
//
// Exit codes: 0 ok, 2 input or I/O error, 3 not certified, 4 divergence.

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "ofo/ofo.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNotCertified = 3;
constexpr int kExitDivergence = 4;

struct ScenarioDeleter {
  void operator()(ofo_scenario* s) const { ofo_scenario_free(s); }
};
struct ReportDeleter {
  void operator()(ofo_report* r) const { ofo_report_free(r); }
};
struct TrajectoryDeleter {
  void operator()(ofo_trajectory* t) const { ofo_trajectory_free(t); }
};
using ScenarioPtr = std::unique_ptr<ofo_scenario, ScenarioDeleter>;
using ReportPtr = std::unique_ptr<ofo_report, ReportDeleter>;
using TrajectoryPtr = std::unique_ptr<ofo_trajectory, TrajectoryDeleter>;

int exit_code(ofo_status s) {
  switch (s) {
    case OFO_OK: return kExitOk;
    case OFO_NOT_CERTIFIED: return kExitNotCertified;
    case OFO_ERR_DIVERGENCE: return kExitDivergence;
    default: return kExitInput;
  }
}

int report_error(ofo_status s) {
  std::fprintf(stderr, "ofo: %s: %s\n", ofo_status_string(s), ofo_last_error());
  return exit_code(s);
}

// 12 significant digits, matching the library's CSV output.
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int load(const std::string& path, ScenarioPtr& out) {
  ofo_scenario* raw = nullptr;
  const ofo_status s = ofo_scenario_load(path.c_str(), &raw);
  out.reset(raw);
  return s == OFO_OK ? kExitOk : report_error(s);
}

int cmd_certify(const std::string& path) {
  ScenarioPtr sc;
  if (const int rc = load(path, sc)) return rc;
  ofo_report* raw = nullptr;
  const ofo_status s = ofo_certify(sc.get(), &raw);
  ReportPtr report(raw);
  if (!report) return report_error(s);
  std::fputs(ofo_report_text(report.get()), stdout);
  return exit_code(s);
}

int cmd_simulate(const std::string& path, const std::string& out, const std::vector<double>& alpha) {
  ScenarioPtr sc;
  if (const int rc = load(path, sc)) return rc;
  if (!alpha.empty()) {
    if (const ofo_status s = ofo_scenario_set_alpha(sc.get(), alpha.front()); s != OFO_OK) return report_error(s);
  }
  ofo_trajectory* raw = nullptr;
  ofo_status s = ofo_simulate(sc.get(), &raw);
  TrajectoryPtr traj(raw);
  if (s != OFO_OK) return report_error(s);
  for (size_t i = 0; const char* w = ofo_trajectory_warning(traj.get(), i); ++i) {
    std::fprintf(stderr, "ofo: warning: %s\n", w);
  }
  if ((s = ofo_trajectory_write_csv(traj.get(), out.c_str())) != OFO_OK) return report_error(s);
  ofo_run_summary sum{};
  if ((s = ofo_trajectory_summary(traj.get(), &sum)) != OFO_OK) return report_error(s);
  std::printf("final_error = %s\nsettling_time = %s\novershoot = %s\nmax_violation = %s\nsamples = %zu\n",
              num(sum.final_error).c_str(), num(sum.settling_time).c_str(), num(sum.overshoot).c_str(),
              num(sum.max_violation).c_str(), sum.samples);
  return kExitOk;
}

int cmd_sweep(const std::string& path, const std::vector<double>& alphas, const std::string& out) {
  ScenarioPtr sc;
  if (const int rc = load(path, sc)) return rc;
  // Rows stay unfilled (alpha = 0) when the sweep fails before running.
  std::vector<ofo_sweep_row> rows(alphas.size(), ofo_sweep_row{});
  const ofo_status s = ofo_sweep(sc.get(), alphas.data(), alphas.size(), out.c_str(), 0, rows.data());
  if (rows.empty() || rows.front().alpha == 0.0) return report_error(s);
  std::printf("alpha,settling_time,overshoot,final_error,max_violation,status\n");
  for (const auto& r : rows) {
    std::printf("%s,%s,%s,%s,%s,%s\n", num(r.alpha).c_str(), num(r.settling_time).c_str(),
                num(r.overshoot).c_str(), num(r.final_error).c_str(), num(r.max_violation).c_str(),
                ofo_status_string(static_cast<ofo_status>(r.status)));
  }
  if (s != OFO_OK) std::fprintf(stderr, "ofo: %s: %s\n", ofo_status_string(s), ofo_last_error());
  return exit_code(s);
}

int cmd_reproduce(const std::string& figure, const std::string& out) {
  const ofo_status s = ofo_reproduce(figure.c_str(), out.c_str(), 0);
  if (s != OFO_OK) return report_error(s);
  std::printf("wrote %s/scenario.yaml, certificate.txt, summary.csv and trajectory CSVs\n", out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online feedback optimization: certificates and closed-loop simulation"};
  app.require_subcommand(1);

  std::string scenario, out, figure;
  std::vector<double> alphas, alpha;

  auto* certify = app.add_subcommand("certify", "Check the gain-independent stability certificate");
  certify->add_option("scenario", scenario, "Scenario file")->required();

  auto* simulate = app.add_subcommand("simulate", "Simulate the closed loop and write a trajectory CSV");
  simulate->add_option("scenario", scenario, "Scenario file")->required();
  simulate->add_option("--out", out, "Output CSV path")->required();
  simulate->add_option("--alpha", alpha, "Override the controller gain")->expected(1);

  auto* sweep = app.add_subcommand("sweep", "Simulate once per gain and write CSVs plus summary.csv");
  sweep->add_option("scenario", scenario, "Scenario file")->required();
  sweep->add_option("--alphas", alphas, "Comma-separated gains")->required()->delimiter(',');
  sweep->add_option("--out", out, "Output directory")->required();

  auto* reproduce = app.add_subcommand("reproduce", "Run a bundled example (fig1 or fig2)");
  reproduce->add_option("figure", figure, "fig1 or fig2")->required();
  reproduce->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*certify) return cmd_certify(scenario);
    if (*simulate) return cmd_simulate(scenario, out, alpha);
    if (*sweep) return cmd_sweep(scenario, alphas, out);
    if (*reproduce) return cmd_reproduce(figure, out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ofo: %s\n", e.what());
  }
  return kExitInput;
}
