#pragma once

// Scenario files: a YAML document with the sections
//
//   name:        optional label
//   plant:       kind (linear | sine), A, B, B_w, C as {rows, cols, data}
//   cost:        kind (quadratic: q_u, q_y | sqrtplus: a), optional mu4
//   controller:  kind (gradient | projected), alpha, optional beta, box {lo, hi}
//   schedule:    list of [t_start, w1, ..., wq]
//   sim:         t_end, optional dt and record_dt, x0, u0
//   sweep:       optional alphas
//   certificate: optional overrides {ell_f, ..., L} and reference_rhs
//
// Every parse error is reported as "<source>:<line>:<column>: <field>: <what>".

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ofo/certificate.hpp"
#include "ofo/controller.hpp"
#include "ofo/cost.hpp"
#include "ofo/linalg.hpp"
#include "ofo/plant.hpp"
#include "ofo/simulation.hpp"

namespace ofo {

struct PlantSection {
  std::string kind;
  Matrix a, b, b_w, c;

  friend bool operator==(const PlantSection&, const PlantSection&) = default;
};

struct CostSection {
  std::string kind;
  double q_u = 0.0;
  double q_y = 0.0;
  double a = 0.0;
  std::optional<double> mu4;

  friend bool operator==(const CostSection&, const CostSection&) = default;
};

struct ControllerSection {
  std::string kind;
  double alpha = 0.0;
  std::optional<double> beta;
  std::optional<Vector> box_lo, box_hi;

  friend bool operator==(const ControllerSection&, const ControllerSection&) = default;
};

struct SimSection {
  double t_end = 0.0;
  std::optional<double> dt;
  std::optional<double> record_dt;
  Vector x0, u0;

  friend bool operator==(const SimSection&, const SimSection&) = default;
};

struct Scenario {
  std::string name;
  PlantSection plant;
  CostSection cost;
  ControllerSection controller;
  std::vector<DisturbanceSegment> schedule;
  SimSection sim;
  std::vector<double> sweep_alphas;
  ConstantOverrides overrides;
  std::optional<double> reference_rhs;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws InputError with a line-level diagnostic on any schema or
/// dimension problem.
Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>");
/// Throws IoError when the file cannot be read.
Scenario load_scenario(const std::filesystem::path& path);
/// Numbers are written in shortest round-trip form, so parsing the output
/// reproduces the scenario exactly.
std::string serialize_scenario(const Scenario& scenario);

struct BuiltScenario {
  std::shared_ptr<const LtiPlant> plant;  // carries the first segment's disturbance
  std::shared_ptr<const CostModel> cost;
  std::shared_ptr<const Controller> controller;
  DisturbanceSchedule schedule;
};

/// Throws InputError / NotHurwitzError for values the schema cannot catch.
BuiltScenario build_scenario(const Scenario& scenario);

/// Certificate at the scenario's alpha, with overrides applied on top of the
/// derived constants.
CertificateReport certify_scenario(const Scenario& scenario);

/// Simulation inputs, with the Lyapunov trace weighted by the certified xi
/// (or xi = 1 when no feasible xi exists).
SimulationSetup simulation_setup(const Scenario& scenario);

/// Bundled scenario documents: "fig1" (linear plant, unconstrained) and
/// "fig2" (sine plant, box constraint). Throws InputError otherwise.
std::string_view bundled_scenario_text(std::string_view figure);
Scenario bundled_scenario(std::string_view figure);

/// `requested` when positive; otherwise the hardware concurrency capped by
/// the OFO_THREADS environment variable.
unsigned resolve_threads(unsigned requested = 0);

std::string trajectory_file_name(double alpha);

/// Runs the sweep and writes one trajectory CSV per alpha plus summary.csv
/// into `out_dir` (created if missing).
std::vector<SweepRow> sweep_to_directory(const Scenario& scenario, std::span<const double> alphas,
                                         const std::filesystem::path& out_dir, unsigned threads);

struct ReproduceResult {
  CertificateReport certificate;
  std::vector<SweepRow> rows;
};

/// Writes scenario.yaml, certificate.txt, the trajectory CSVs and
/// summary.csv for a bundled figure.
ReproduceResult reproduce_figure(std::string_view figure, const std::filesystem::path& out_dir,
                                 unsigned threads);

}  // namespace ofo
