#include "ofo/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "ofo/errors.hpp"
#include "ofo/format.hpp"

namespace ofo {

namespace {

// ---------------------------------------------------------------- parsing

class Reader {
 public:
  explicit Reader(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& field,
                         const std::string& what) const {
    const YAML::Mark mark = at.Mark();
    std::ostringstream os;
    os << source_;
    if (!mark.is_null()) os << ':' << mark.line + 1 << ':' << mark.column + 1;
    os << ": " << field << ": " << what;
    throw InputError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& field) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
  }

  void check_keys(const YAML::Node& map, const std::string& field,
                  std::initializer_list<const char*> allowed) const {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, join(field, key), "unknown key");
    }
  }

  YAML::Node child(const YAML::Node& map, const char* key, const std::string& field) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, join(field, key), "missing required key");
    return n;
  }

  double number(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a number");
    const std::string& s = node.Scalar();
    if (s == ".inf" || s == ".Inf" || s == ".INF" || s == "+.inf") return HUGE_VAL;
    if (s == "-.inf" || s == "-.Inf" || s == "-.INF") return -HUGE_VAL;
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      fail(node, field, "expected a number, got '" + s + "'");
    }
    return v;
  }

  double finite(const YAML::Node& node, const std::string& field) const {
    const double v = number(node, field);
    if (!std::isfinite(v)) fail(node, field, "must be finite");
    return v;
  }

  double positive(const YAML::Node& node, const std::string& field) const {
    const double v = finite(node, field);
    if (!(v > 0.0)) fail(node, field, "must be positive");
    return v;
  }

  std::size_t count(const YAML::Node& node, const std::string& field) const {
    const double v = finite(node, field);
    if (v < 1.0 || v != std::floor(v) || v > 1e6) fail(node, field, "expected a positive integer");
    return static_cast<std::size_t>(v);
  }

  std::string text(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a string");
    return node.Scalar();
  }

  std::vector<double> list(const YAML::Node& node, const std::string& field,
                           bool allow_inf = false) const {
    if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
      const std::string f = field + "[" + std::to_string(i) + "]";
      out.push_back(allow_inf ? number(node[i], f) : finite(node[i], f));
      if (std::isnan(out.back())) fail(node[i], f, "must not be NaN");
    }
    return out;
  }

  Matrix matrix(const YAML::Node& node, const std::string& field) const {
    require_map(node, field);
    check_keys(node, field, {"rows", "cols", "data"});
    const std::size_t r = count(child(node, "rows", field), field + ".rows");
    const std::size_t c = count(child(node, "cols", field), field + ".cols");
    const YAML::Node data = child(node, "data", field);
    std::vector<double> v = list(data, field + ".data");
    if (v.size() != r * c) {
      fail(data, field + ".data",
           "expected " + std::to_string(r * c) + " entries for a " + std::to_string(r) + "x" +
               std::to_string(c) + " matrix, got " + std::to_string(v.size()));
    }
    return Matrix(r, c, std::move(v));
  }

  static std::string join(const std::string& field, const std::string& key) {
    return field.empty() ? key : field + "." + key;
  }

 private:
  std::string source_;
};

void parse_plant(const Reader& rd, const YAML::Node& node, PlantSection& out) {
  rd.require_map(node, "plant");
  rd.check_keys(node, "plant", {"kind", "A", "B", "B_w", "C"});
  const YAML::Node kind = rd.child(node, "kind", "plant");
  out.kind = rd.text(kind, "plant.kind");
  if (out.kind != "linear" && out.kind != "sine") {
    rd.fail(kind, "plant.kind", "expected 'linear' or 'sine', got '" + out.kind + "'");
  }
  const YAML::Node na = rd.child(node, "A", "plant");
  const YAML::Node nb = rd.child(node, "B", "plant");
  const YAML::Node nbw = rd.child(node, "B_w", "plant");
  const YAML::Node nc = rd.child(node, "C", "plant");
  out.a = rd.matrix(na, "plant.A");
  out.b = rd.matrix(nb, "plant.B");
  out.b_w = rd.matrix(nbw, "plant.B_w");
  out.c = rd.matrix(nc, "plant.C");
  const std::size_t n = out.a.rows();
  if (!out.a.square()) rd.fail(na, "plant.A", "must be square");
  if (out.b.rows() != n) rd.fail(nb, "plant.B", "must have " + std::to_string(n) + " rows");
  if (out.b_w.rows() != n) rd.fail(nbw, "plant.B_w", "must have " + std::to_string(n) + " rows");
  if (out.c.cols() != n) rd.fail(nc, "plant.C", "must have " + std::to_string(n) + " columns");
  if (out.kind == "sine" && out.b.cols() != 1) rd.fail(nb, "plant.B", "the sine plant takes a scalar input");
}

void parse_cost(const Reader& rd, const YAML::Node& node, CostSection& out, std::size_t m,
                std::size_t p) {
  rd.require_map(node, "cost");
  const YAML::Node kind = rd.child(node, "kind", "cost");
  out.kind = rd.text(kind, "cost.kind");
  if (out.kind == "quadratic") {
    rd.check_keys(node, "cost", {"kind", "q_u", "q_y", "mu4"});
    out.q_u = rd.positive(rd.child(node, "q_u", "cost"), "cost.q_u");
    const YAML::Node qy = rd.child(node, "q_y", "cost");
    out.q_y = rd.finite(qy, "cost.q_y");
    if (out.q_y < 0.0) rd.fail(qy, "cost.q_y", "must be nonnegative");
  } else if (out.kind == "sqrtplus") {
    rd.check_keys(node, "cost", {"kind", "a", "mu4"});
    out.a = rd.positive(rd.child(node, "a", "cost"), "cost.a");
    if (m != 1 || p != 1) rd.fail(kind, "cost.kind", "sqrtplus needs scalar input and output");
  } else {
    rd.fail(kind, "cost.kind", "expected 'quadratic' or 'sqrtplus', got '" + out.kind + "'");
  }
  if (const YAML::Node mu4 = node["mu4"]) {
    out.mu4 = rd.finite(mu4, "cost.mu4");
    if (*out.mu4 < 0.0) rd.fail(mu4, "cost.mu4", "must be nonnegative");
  }
}

void parse_controller(const Reader& rd, const YAML::Node& node, ControllerSection& out,
                      std::size_t m) {
  rd.require_map(node, "controller");
  rd.check_keys(node, "controller", {"kind", "alpha", "beta", "box"});
  const YAML::Node kind = rd.child(node, "kind", "controller");
  out.kind = rd.text(kind, "controller.kind");
  if (out.kind != "gradient" && out.kind != "projected") {
    rd.fail(kind, "controller.kind", "expected 'gradient' or 'projected', got '" + out.kind + "'");
  }
  out.alpha = rd.positive(rd.child(node, "alpha", "controller"), "controller.alpha");
  if (const YAML::Node beta = node["beta"]) {
    if (out.kind != "projected") rd.fail(beta, "controller.beta", "only the projected controller takes a stepsize");
    out.beta = rd.positive(beta, "controller.beta");
  }
  const YAML::Node box = node["box"];
  if (out.kind == "projected" && !box) rd.fail(node, "controller.box", "missing required key");
  if (!box) return;
  if (out.kind != "projected") rd.fail(box, "controller.box", "only the projected controller takes a box");
  rd.require_map(box, "controller.box");
  rd.check_keys(box, "controller.box", {"lo", "hi"});
  const YAML::Node nlo = rd.child(box, "lo", "controller.box");
  const YAML::Node nhi = rd.child(box, "hi", "controller.box");
  out.box_lo = Vector(rd.list(nlo, "controller.box.lo", true));
  out.box_hi = Vector(rd.list(nhi, "controller.box.hi", true));
  if (out.box_lo->size() != m) rd.fail(nlo, "controller.box.lo", "must have " + std::to_string(m) + " entries");
  if (out.box_hi->size() != m) rd.fail(nhi, "controller.box.hi", "must have " + std::to_string(m) + " entries");
  for (std::size_t i = 0; i < m; ++i) {
    if ((*out.box_lo)[i] > (*out.box_hi)[i]) {
      rd.fail(nlo, "controller.box.lo",
              "lo[" + std::to_string(i) + "] = " + format_number((*out.box_lo)[i]) + " exceeds hi[" +
                  std::to_string(i) + "] = " + format_number((*out.box_hi)[i]));
    }
  }
}

void parse_schedule(const Reader& rd, const YAML::Node& node, std::vector<DisturbanceSegment>& out,
                    std::size_t q) {
  if (!node.IsSequence() || node.size() == 0) rd.fail(node, "schedule", "expected a nonempty list of [t_start, w...]");
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string f = "schedule[" + std::to_string(i) + "]";
    const std::vector<double> row = rd.list(node[i], f);
    if (row.size() != q + 1) {
      rd.fail(node[i], f, "expected t_start followed by " + std::to_string(q) + " disturbance values");
    }
    if (i == 0 && row[0] != 0.0) rd.fail(node[i], f, "the first segment must start at t = 0");
    if (i > 0 && !(row[0] > out.back().t_start)) rd.fail(node[i], f, "start times must be strictly increasing");
    out.push_back({row[0], Vector(std::vector<double>(row.begin() + 1, row.end()))});
  }
}

void parse_sim(const Reader& rd, const YAML::Node& node, SimSection& out, std::size_t n,
               std::size_t m) {
  rd.require_map(node, "sim");
  rd.check_keys(node, "sim", {"t_end", "dt", "record_dt", "x0", "u0"});
  out.t_end = rd.positive(rd.child(node, "t_end", "sim"), "sim.t_end");
  if (const YAML::Node dt = node["dt"]) out.dt = rd.positive(dt, "sim.dt");
  if (const YAML::Node rdt = node["record_dt"]) out.record_dt = rd.positive(rdt, "sim.record_dt");
  const YAML::Node nx = rd.child(node, "x0", "sim");
  const YAML::Node nu = rd.child(node, "u0", "sim");
  out.x0 = Vector(rd.list(nx, "sim.x0"));
  out.u0 = Vector(rd.list(nu, "sim.u0"));
  if (out.x0.size() != n) rd.fail(nx, "sim.x0", "must have " + std::to_string(n) + " entries");
  if (out.u0.size() != m) rd.fail(nu, "sim.u0", "must have " + std::to_string(m) + " entries");
}

void parse_certificate(const Reader& rd, const YAML::Node& node, Scenario& out) {
  rd.require_map(node, "certificate");
  rd.check_keys(node, "certificate", {"overrides", "reference_rhs"});
  if (const YAML::Node ref = node["reference_rhs"]) out.reference_rhs = rd.finite(ref, "certificate.reference_rhs");
  const YAML::Node ov = node["overrides"];
  if (!ov) return;
  rd.require_map(ov, "certificate.overrides");
  rd.check_keys(ov, "certificate.overrides",
                {"ell_f", "ell_g", "c3", "d3", "mu3", "zeta3", "mu_Phi", "ell_Phi_u", "ell_Phi_y", "L"});
  auto get = [&](const char* key, std::optional<double>& slot) {
    if (const YAML::Node v = ov[key]) {
      const std::string f = std::string("certificate.overrides.") + key;
      slot = rd.finite(v, f);
      if (*slot < 0.0) rd.fail(v, f, "must be nonnegative");
    }
  };
  auto& o = out.overrides;
  get("ell_f", o.ell_f);
  get("ell_g", o.ell_g);
  get("c3", o.c3);
  get("d3", o.d3);
  get("mu3", o.mu3);
  get("zeta3", o.zeta3);
  get("mu_Phi", o.mu_Phi);
  get("ell_Phi_u", o.ell_Phi_u);
  get("ell_Phi_y", o.ell_Phi_y);
  get("L", o.L);
}

// ---------------------------------------------------------- serialization

std::string round_trip_number(double v) {
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void emit_list(YAML::Emitter& e, std::span<const double> v) {
  e << YAML::Flow << YAML::BeginSeq;
  for (double x : v) e << round_trip_number(x);
  e << YAML::EndSeq;
}

void emit_matrix(YAML::Emitter& e, const char* key, const Matrix& m) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "rows" << YAML::Value << m.rows();
  e << YAML::Key << "cols" << YAML::Value << m.cols();
  e << YAML::Key << "data" << YAML::Value;
  emit_list(e, m.entries());
  e << YAML::EndMap;
}

void emit_number(YAML::Emitter& e, const char* key, double v) {
  e << YAML::Key << key << YAML::Value << round_trip_number(v);
}

// ---------------------------------------------------------- bundled texts

constexpr std::string_view kFig1 = R"(# Linear plant without input constraints.
#   x' = A x + B u + B_w w,  y = C x,  Phi(u, y) = 0.01 u^2 + y^2
# driven by the gradient OFO controller. The disturbance is not measured.
name: fig1
plant:
  kind: linear
  A: {rows: 2, cols: 2, data: [-1, 10, -10, -1]}
  B: {rows: 2, cols: 1, data: [0, 1]}
  B_w: {rows: 2, cols: 1, data: [1, 1]}
  C: {rows: 1, cols: 2, data: [1, 0]}
cost:
  kind: quadratic
  q_u: 0.01
  q_y: 1
controller:
  kind: gradient
  alpha: 100
# w alternates between +10 and -10. Defaults chosen here: switching period
# 5 time units and a first value of +10.
schedule:
  - [0, 10]
  - [5, -10]
  - [10, 10]
  - [15, -10]
# Start at rest. dt defaults to 0.02 / max(1, ||A||, alpha L_k) clamped to
# [1e-6, 1e-2]; samples are written every max(dt, 0.01).
sim:
  t_end: 20
  x0: [0, 0]
  u0: [0]
# Gains for the sweep. Only alpha = 100 is named alongside the original
# figure; 1, 10 and 1000 bracket it by decades.
sweep:
  alphas: [1, 10, 100, 1000]
# Externally quoted value of the stability threshold for this example,
# printed next to the computed one for comparison. It is not used in the
# verdict.
certificate:
  reference_rhs: 0.0198
)";

constexpr std::string_view kFig2 = R"(# Nonlinear plant with a box-constrained input.
#   x' = A x + B (u + sin u) + B_w w,  y = C x,  Phi(u, y) = 11 u^2 + sqrt(y^2 + 1)
# driven by the projected OFO controller with |u| <= 5e-5. The stepsize
# beta defaults to 1/L.
name: fig2
plant:
  kind: sine
  A: {rows: 2, cols: 2, data: [0, -0.1, 0.1, -0.1]}
  B: {rows: 2, cols: 1, data: [0, 0.1]}
  B_w: {rows: 2, cols: 1, data: [0.1, 0.1]}
  C: {rows: 1, cols: 2, data: [1, 1]}
cost:
  kind: sqrtplus
  a: 11
controller:
  kind: projected
  alpha: 100
  box: {lo: [-5e-5], hi: [5e-5]}
# w alternates between +0.001 and -0.001. Defaults chosen here: switching
# period 50 time units (the plant settles slowly) and a first value of
# +0.001.
schedule:
  - [0, 0.001]
  - [50, -0.001]
  - [100, 0.001]
  - [150, -0.001]
# Start at rest, inside the box. dt and record_dt default as for fig1.
sim:
  t_end: 200
  x0: [0, 0]
  u0: [0]
sweep:
  alphas: [1, 10, 100]
)";

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view source) {
  const Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": syntax error: " << e.msg;
    throw InputError(os.str());
  }
  if (!root.IsMap()) rd.fail(root, "scenario", "expected a mapping with sections plant, cost, controller, schedule, sim");
  rd.check_keys(root, "", {"name", "plant", "cost", "controller", "schedule", "sim", "sweep", "certificate"});

  Scenario sc;
  try {
    if (const YAML::Node name = root["name"]) sc.name = rd.text(name, "name");
    parse_plant(rd, rd.child(root, "plant", ""), sc.plant);
    const std::size_t n = sc.plant.a.rows();
    const std::size_t m = sc.plant.b.cols();
    const std::size_t p = sc.plant.c.rows();
    const std::size_t q = sc.plant.b_w.cols();
    parse_cost(rd, rd.child(root, "cost", ""), sc.cost, m, p);
    parse_controller(rd, rd.child(root, "controller", ""), sc.controller, m);
    parse_schedule(rd, rd.child(root, "schedule", ""), sc.schedule, q);
    parse_sim(rd, rd.child(root, "sim", ""), sc.sim, n, m);
    if (const YAML::Node sweep = root["sweep"]) {
      rd.require_map(sweep, "sweep");
      rd.check_keys(sweep, "sweep", {"alphas"});
      const YAML::Node alphas = rd.child(sweep, "alphas", "sweep");
      sc.sweep_alphas = rd.list(alphas, "sweep.alphas");
      for (std::size_t i = 0; i < sc.sweep_alphas.size(); ++i) {
        if (!(sc.sweep_alphas[i] > 0.0)) rd.fail(alphas[i], "sweep.alphas[" + std::to_string(i) + "]", "must be positive");
      }
    }
    if (const YAML::Node cert = root["certificate"]) parse_certificate(rd, cert, sc);
  } catch (const YAML::Exception& e) {
    // Type conversions inside yaml-cpp (e.g. a key that is not a string).
    std::ostringstream os;
    os << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw InputError(os.str());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("cannot read scenario " + path.string());
  return parse_scenario(os.str(), path.string());
}

std::string serialize_scenario(const Scenario& sc) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  if (!sc.name.empty()) e << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << sc.name;

  e << YAML::Key << "plant" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << sc.plant.kind;
  emit_matrix(e, "A", sc.plant.a);
  emit_matrix(e, "B", sc.plant.b);
  emit_matrix(e, "B_w", sc.plant.b_w);
  emit_matrix(e, "C", sc.plant.c);
  e << YAML::EndMap;

  e << YAML::Key << "cost" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << sc.cost.kind;
  if (sc.cost.kind == "quadratic") {
    emit_number(e, "q_u", sc.cost.q_u);
    emit_number(e, "q_y", sc.cost.q_y);
  } else {
    emit_number(e, "a", sc.cost.a);
  }
  if (sc.cost.mu4) emit_number(e, "mu4", *sc.cost.mu4);
  e << YAML::EndMap;

  e << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << sc.controller.kind;
  emit_number(e, "alpha", sc.controller.alpha);
  if (sc.controller.beta) emit_number(e, "beta", *sc.controller.beta);
  if (sc.controller.box_lo && sc.controller.box_hi) {
    e << YAML::Key << "box" << YAML::Value << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "lo" << YAML::Value;
    emit_list(e, sc.controller.box_lo->span());
    e << YAML::Key << "hi" << YAML::Value;
    emit_list(e, sc.controller.box_hi->span());
    e << YAML::EndMap;
  }
  e << YAML::EndMap;

  e << YAML::Key << "schedule" << YAML::Value << YAML::BeginSeq;
  for (const auto& seg : sc.schedule) {
    std::vector<double> row{seg.t_start};
    row.insert(row.end(), seg.w.begin(), seg.w.end());
    emit_list(e, row);
  }
  e << YAML::EndSeq;

  e << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  emit_number(e, "t_end", sc.sim.t_end);
  if (sc.sim.dt) emit_number(e, "dt", *sc.sim.dt);
  if (sc.sim.record_dt) emit_number(e, "record_dt", *sc.sim.record_dt);
  e << YAML::Key << "x0" << YAML::Value;
  emit_list(e, sc.sim.x0.span());
  e << YAML::Key << "u0" << YAML::Value;
  emit_list(e, sc.sim.u0.span());
  e << YAML::EndMap;

  if (!sc.sweep_alphas.empty()) {
    e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap << YAML::Key << "alphas" << YAML::Value;
    emit_list(e, sc.sweep_alphas);
    e << YAML::EndMap;
  }

  if (!sc.overrides.empty() || sc.reference_rhs) {
    e << YAML::Key << "certificate" << YAML::Value << YAML::BeginMap;
    if (!sc.overrides.empty()) {
      e << YAML::Key << "overrides" << YAML::Value << YAML::BeginMap;
      const auto& o = sc.overrides;
      const std::pair<const char*, const std::optional<double>*> slots[] = {
          {"ell_f", &o.ell_f}, {"ell_g", &o.ell_g},   {"c3", &o.c3},
          {"d3", &o.d3},       {"mu3", &o.mu3},       {"zeta3", &o.zeta3},
          {"mu_Phi", &o.mu_Phi}, {"ell_Phi_u", &o.ell_Phi_u}, {"ell_Phi_y", &o.ell_Phi_y},
          {"L", &o.L}};
      for (const auto& [key, slot] : slots) {
        if (*slot) emit_number(e, key, **slot);
      }
      e << YAML::EndMap;
    }
    if (sc.reference_rhs) emit_number(e, "reference_rhs", *sc.reference_rhs);
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  if (!e.good()) throw InputError("serialize_scenario: " + e.GetLastError());
  return std::string(e.c_str()) + "\n";
}

BuiltScenario build_scenario(const Scenario& sc) {
  if (sc.schedule.empty()) throw InputError("schedule: needs at least one segment");
  BuiltScenario out;
  out.schedule = DisturbanceSchedule(sc.schedule);
  const Vector& w0 = sc.schedule.front().w;
  if (sc.plant.kind == "linear") {
    out.plant = std::make_shared<LinearPlant>(sc.plant.a, sc.plant.b, sc.plant.b_w, sc.plant.c, w0);
  } else if (sc.plant.kind == "sine") {
    out.plant = std::make_shared<SinePlant>(sc.plant.a, sc.plant.b, sc.plant.b_w, sc.plant.c, w0);
  } else {
    throw InputError("plant.kind: unknown kind '" + sc.plant.kind + "'");
  }

  std::shared_ptr<const CostModel> cost;
  if (sc.cost.kind == "quadratic") {
    cost = std::make_shared<QuadraticCost>(sc.cost.q_u, sc.cost.q_y);
  } else if (sc.cost.kind == "sqrtplus") {
    cost = std::make_shared<SqrtPlusCost>(sc.cost.a);
  } else {
    throw InputError("cost.kind: unknown kind '" + sc.cost.kind + "'");
  }
  if (sc.cost.mu4 && *sc.cost.mu4 > 0.0) cost = std::make_shared<RegularizedCost>(cost, *sc.cost.mu4);
  out.cost = cost;

  if (sc.controller.kind == "gradient") {
    out.controller = std::make_shared<GradientOfoController>(sc.controller.alpha, cost, out.plant);
  } else if (sc.controller.kind == "projected") {
    if (!sc.controller.box_lo || !sc.controller.box_hi) throw InputError("controller.box: missing");
    BoxSet box(*sc.controller.box_lo, *sc.controller.box_hi);
    out.controller = std::make_shared<ProjectedOfoController>(sc.controller.alpha, std::move(box), cost,
                                                              out.plant, sc.controller.beta);
  } else {
    throw InputError("controller.kind: unknown kind '" + sc.controller.kind + "'");
  }
  return out;
}

CertificateReport certify_scenario(const Scenario& sc) {
  const BuiltScenario b = build_scenario(sc);
  const PlantConstants pc = derive_plant_constants(*b.plant);
  const CostDescriptor cd = b.cost->descriptor(pc.ell_h, pc.ell_grad_h);
  const SimplifyingConstants k = sc.overrides.apply(combine_constants(pc, cd));
  return certify(k, b.controller->alpha(), b.controller->effective_gain(), sc.reference_rhs);
}

SimulationSetup simulation_setup(const Scenario& sc) {
  const BuiltScenario b = build_scenario(sc);
  SimulationSetup setup;
  setup.plant = b.plant;
  setup.controller = b.controller;
  setup.schedule = b.schedule;
  setup.x0 = sc.sim.x0;
  setup.u0 = sc.sim.u0;
  setup.t_end = sc.sim.t_end;
  setup.options.dt = sc.sim.dt;
  setup.options.record_dt = sc.sim.record_dt;
  // Unit weighting when no feasible xi exists or the constants are not
  // available for this plant/cost pair; the run itself does not need them.
  double xi = 1.0;
  try {
    const CertificateReport r = certify_scenario(sc);
    if (r.xi) xi = r.xi->chosen;
  } catch (const InputError&) {
  }
  setup.options.lyapunov = LyapunovSpec{xi, b.plant->lyapunov_weight()};
  return setup;
}

std::string_view bundled_scenario_text(std::string_view figure) {
  if (figure == "fig1") return kFig1;
  if (figure == "fig2") return kFig2;
  throw InputError("unknown figure '" + std::string(figure) + "' (expected fig1 or fig2)");
}

Scenario bundled_scenario(std::string_view figure) {
  return parse_scenario(bundled_scenario_text(figure), std::string(figure) + ".yaml");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OFO_THREADS")) {
    unsigned cap = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (res.ec == std::errc{} && res.ptr == s.data() + s.size() && cap > 0) n = std::min(n, cap);
  }
  return n;
}

std::string trajectory_file_name(double alpha) {
  return "trajectory_alpha_" + format_number(alpha) + ".csv";
}

std::vector<SweepRow> sweep_to_directory(const Scenario& sc, std::span<const double> alphas,
                                         const std::filesystem::path& out_dir, unsigned threads) {
  const SimulationSetup setup = simulation_setup(sc);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) throw IoError("cannot create directory " + out_dir.string());
  std::vector<SweepRow> rows = sweep_alpha(setup, alphas, resolve_threads(threads));
  for (const auto& r : rows) {
    if (r.ok) write_file_atomic(out_dir / trajectory_file_name(r.alpha), trajectory_csv(r.trajectory));
  }
  write_file_atomic(out_dir / "summary.csv", sweep_summary_csv(rows));
  return rows;
}

ReproduceResult reproduce_figure(std::string_view figure, const std::filesystem::path& out_dir,
                                 unsigned threads) {
  const Scenario sc = bundled_scenario(figure);
  ReproduceResult out;
  out.certificate = certify_scenario(sc);
  out.rows = sweep_to_directory(sc, sc.sweep_alphas, out_dir, threads);
  write_file_atomic(out_dir / "scenario.yaml", bundled_scenario_text(figure));
  write_file_atomic(out_dir / "certificate.txt", format_report(out.certificate));
  return out;
}

}  // namespace ofo
