#include "ofo/ofo.h"

#include <cmath>
#include <limits>
#include <new>
#include <string>

#include "ofo/errors.hpp"
#include "ofo/format.hpp"
#include "ofo/scenario.hpp"
#include "ofo/simulation.hpp"

struct ofo_scenario {
  ofo::Scenario value;
  mutable std::string text;  // last serialization
};

struct ofo_report {
  ofo::CertificateReport value;
  std::string text;
};

struct ofo_trajectory {
  ofo::Trajectory value;
  ofo::RunMetrics metrics;
  mutable std::string csv;
};

namespace {

thread_local std::string g_last_error;

ofo_status fail(ofo_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Maps the exception in flight to a status.
ofo_status translate() {
  try {
    throw;
  } catch (const ofo::DivergenceError& e) {
    return fail(OFO_ERR_DIVERGENCE, e.what());
  } catch (const ofo::IoError& e) {
    return fail(OFO_ERR_IO, e.what());
  } catch (const ofo::Error& e) {
    return fail(OFO_ERR_INPUT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(OFO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(OFO_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(OFO_ERR_INTERNAL, "unknown error");
  }
}

template <class F>
ofo_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (...) {
    return translate();
  }
}

ofo_status null_arg(const char* name) { return fail(OFO_ERR_INPUT, std::string(name) + " is null"); }

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

extern "C" {

const char* ofo_last_error(void) { return g_last_error.c_str(); }

const char* ofo_status_string(ofo_status status) {
  switch (status) {
    case OFO_OK: return "ok";
    case OFO_ERR_INPUT: return "input error";
    case OFO_NOT_CERTIFIED: return "not certified";
    case OFO_ERR_DIVERGENCE: return "divergence";
    case OFO_ERR_IO: return "i/o error";
    case OFO_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

ofo_status ofo_scenario_load(const char* path, ofo_scenario** out) {
  return guarded([&] {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    *out = nullptr;
    *out = new ofo_scenario{ofo::load_scenario(path), {}};
    return OFO_OK;
  });
}

ofo_status ofo_scenario_parse(const char* text, const char* source_name, ofo_scenario** out) {
  return guarded([&] {
    if (!text) return null_arg("text");
    if (!out) return null_arg("out");
    *out = nullptr;
    *out = new ofo_scenario{ofo::parse_scenario(text, source_name ? source_name : "<scenario>"), {}};
    return OFO_OK;
  });
}

ofo_status ofo_scenario_bundled(const char* figure, ofo_scenario** out) {
  return guarded([&] {
    if (!figure) return null_arg("figure");
    if (!out) return null_arg("out");
    *out = nullptr;
    *out = new ofo_scenario{ofo::bundled_scenario(figure), {}};
    return OFO_OK;
  });
}

ofo_status ofo_scenario_serialize(const ofo_scenario* scenario, const char** text) {
  return guarded([&] {
    if (!scenario) return null_arg("scenario");
    if (!text) return null_arg("text");
    scenario->text = ofo::serialize_scenario(scenario->value);
    *text = scenario->text.c_str();
    return OFO_OK;
  });
}

ofo_status ofo_scenario_save(const ofo_scenario* scenario, const char* path) {
  return guarded([&] {
    if (!scenario) return null_arg("scenario");
    if (!path) return null_arg("path");
    ofo::write_file_atomic(path, ofo::serialize_scenario(scenario->value));
    return OFO_OK;
  });
}

ofo_status ofo_scenario_set_alpha(ofo_scenario* scenario, double alpha) {
  return guarded([&] {
    if (!scenario) return null_arg("scenario");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      return fail(OFO_ERR_INPUT, "alpha must be positive, got " + ofo::format_number(alpha));
    }
    scenario->value.controller.alpha = alpha;
    return OFO_OK;
  });
}

size_t ofo_scenario_sweep_alphas(const ofo_scenario* scenario, const double** alphas) {
  if (!scenario) return 0;
  if (alphas) *alphas = scenario->value.sweep_alphas.data();
  return scenario->value.sweep_alphas.size();
}

int ofo_scenario_equal(const ofo_scenario* a, const ofo_scenario* b) {
  return a && b && a->value == b->value ? 1 : 0;
}

void ofo_scenario_free(ofo_scenario* scenario) { delete scenario; }

ofo_status ofo_certify(const ofo_scenario* scenario, ofo_report** out) {
  return guarded([&] {
    if (!scenario) return null_arg("scenario");
    if (!out) return null_arg("out");
    *out = nullptr;
    auto* r = new ofo_report{ofo::certify_scenario(scenario->value), {}};
    r->text = ofo::format_report(r->value);
    *out = r;
    return r->value.certified ? OFO_OK : OFO_NOT_CERTIFIED;
  });
}

int ofo_report_certified(const ofo_report* report) { return report && report->value.certified ? 1 : 0; }

const char* ofo_report_text(const ofo_report* report) { return report ? report->text.c_str() : ""; }

double ofo_report_tau(const ofo_report* report) {
  return report && report->value.tau ? *report->value.tau : kNan;
}

double ofo_report_tau_at_alpha(const ofo_report* report, double alpha) {
  if (!report || !(report->value.alpha > 0.0)) return kNan;
  // The gain scales with alpha (alpha * beta for the projected controller).
  const double gain = report->value.gain / report->value.alpha * alpha;
  const auto tau = report->value.tau_at_gain(gain);
  return tau ? *tau : kNan;
}

double ofo_report_mu_bound_rhs(const ofo_report* report) {
  return report ? report->value.mu_bound_rhs : kNan;
}

double ofo_report_required_mu4(const ofo_report* report) {
  return report ? report->value.required_mu4 : kNan;
}

void ofo_report_free(ofo_report* report) { delete report; }

ofo_status ofo_simulate(const ofo_scenario* scenario, ofo_trajectory** out) {
  return guarded([&] {
    if (!scenario) return null_arg("scenario");
    if (!out) return null_arg("out");
    *out = nullptr;
    auto* t = new ofo_trajectory{ofo::simulate(ofo::simulation_setup(scenario->value)), {}, {}};
    try {
      t->metrics = ofo::run_metrics(t->value);
    } catch (...) {
      delete t;
      throw;
    }
    *out = t;
    return OFO_OK;
  });
}

ofo_status ofo_trajectory_write_csv(const ofo_trajectory* traj, const char* path) {
  return guarded([&] {
    if (!traj) return null_arg("traj");
    if (!path) return null_arg("path");
    ofo::write_file_atomic(path, ofo::trajectory_csv(traj->value));
    return OFO_OK;
  });
}

ofo_status ofo_trajectory_csv(const ofo_trajectory* traj, const char** text) {
  return guarded([&] {
    if (!traj) return null_arg("traj");
    if (!text) return null_arg("text");
    traj->csv = ofo::trajectory_csv(traj->value);
    *text = traj->csv.c_str();
    return OFO_OK;
  });
}

ofo_status ofo_trajectory_summary(const ofo_trajectory* traj, ofo_run_summary* out) {
  return guarded([&] {
    if (!traj) return null_arg("traj");
    if (!out) return null_arg("out");
    out->final_error = traj->metrics.final_error;
    out->settling_time = traj->metrics.settling_time;
    out->overshoot = traj->metrics.overshoot;
    out->max_violation = traj->metrics.max_violation;
    out->samples = traj->value.size();
    out->warnings = traj->value.warnings.size();
    return OFO_OK;
  });
}

size_t ofo_trajectory_size(const ofo_trajectory* traj) { return traj ? traj->value.size() : 0; }

const char* ofo_trajectory_warning(const ofo_trajectory* traj, size_t index) {
  if (!traj || index >= traj->value.warnings.size()) return nullptr;
  return traj->value.warnings[index].c_str();
}

void ofo_trajectory_free(ofo_trajectory* traj) { delete traj; }

ofo_status ofo_sweep(const ofo_scenario* scenario, const double* alphas, size_t n,
                     const char* out_dir, unsigned threads, ofo_sweep_row* rows) {
  return guarded([&] {
    if (!scenario) return null_arg("scenario");
    if (!alphas && n > 0) return null_arg("alphas");
    if (n == 0) return fail(OFO_ERR_INPUT, "sweep: no alpha values");
    if (!out_dir) return null_arg("out_dir");
    const auto result =
        ofo::sweep_to_directory(scenario->value, std::span<const double>(alphas, n), out_dir, threads);
    ofo_status worst = OFO_OK;
    for (size_t i = 0; i < result.size(); ++i) {
      const auto& r = result[i];
      const int status = r.ok ? OFO_OK : (r.diverged ? OFO_ERR_DIVERGENCE : OFO_ERR_INPUT);
      if (rows) {
        rows[i] = {r.alpha, status, r.ok ? r.metrics.settling_time : kNan,
                   r.ok ? r.metrics.overshoot : kNan, r.ok ? r.metrics.final_error : kNan,
                   r.ok ? r.metrics.max_violation : kNan};
      }
      if (!r.ok && worst == OFO_OK) {
        worst = static_cast<ofo_status>(status);
        g_last_error = "alpha = " + ofo::format_number(r.alpha) + ": " + r.error;
      }
    }
    return worst;
  });
}

ofo_status ofo_reproduce(const char* figure, const char* out_dir, unsigned threads) {
  return guarded([&] {
    if (!figure) return null_arg("figure");
    if (!out_dir) return null_arg("out_dir");
    const auto result = ofo::reproduce_figure(figure, out_dir, threads);
    for (const auto& r : result.rows) {
      if (!r.ok) {
        g_last_error = "alpha = " + ofo::format_number(r.alpha) + ": " + r.error;
        return r.diverged ? OFO_ERR_DIVERGENCE : OFO_ERR_INPUT;
      }
    }
    return OFO_OK;
  });
}

}  // extern "C"
