#include "ofo/certificate.hpp"

#include <cmath>
#include <sstream>

#include "ofo/errors.hpp"
#include "ofo/format.hpp"

namespace ofo {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string("constant ") + name + " must be positive, got " + format_number(v));
  }
}

}  // namespace

void SimplifyingConstants::validate() const {
  require_positive(ell_f, "ell_f");
  require_positive(ell_g, "ell_g");
  require_positive(c3, "c3");
  require_positive(d3, "d3");
  require_positive(mu3, "mu3");
  require_positive(zeta3, "zeta3");
  require_positive(mu_Phi, "mu_Phi");
  require_positive(ell_Phi_y, "ell_Phi_y");
  require_positive(L, "L");
  if (!(ell_Phi_u >= 0.0) || !std::isfinite(ell_Phi_u)) throw InputError("constant ell_Phi_u must be nonnegative");
  if (c3 > d3) throw InputError("constants need c3 <= d3");
  if (L < mu_Phi) throw InputError("constants need L >= mu_Phi");
}

bool ConstantOverrides::empty() const {
  return !(ell_f || ell_g || c3 || d3 || mu3 || zeta3 || mu_Phi || ell_Phi_u || ell_Phi_y || L);
}

SimplifyingConstants ConstantOverrides::apply(SimplifyingConstants k) const {
  if (ell_f) k.ell_f = *ell_f;
  if (ell_g) k.ell_g = *ell_g;
  if (c3) k.c3 = *c3;
  if (d3) k.d3 = *d3;
  if (mu3) k.mu3 = *mu3;
  if (zeta3) k.zeta3 = *zeta3;
  if (mu_Phi) k.mu_Phi = *mu_Phi;
  if (ell_Phi_u) k.ell_Phi_u = *ell_Phi_u;
  if (ell_Phi_y) k.ell_Phi_y = *ell_Phi_y;
  if (L) k.L = *L;
  return k;
}

PlantConstants derive_plant_constants(const LtiPlant& plant) {
  PlantConstants k;
  try {
    k.weight = solve_lyapunov(plant.a().transpose(), Matrix::identity(plant.state_dim()));
  } catch (const NotHurwitzError& e) {
    throw NotHurwitzError(std::string("plant not certifiable (") + e.what() + ")");
  }
  const Vector ev = sym_eigenvalues(k.weight);
  k.c3 = ev[0];
  k.d3 = ev[ev.size() - 1];
  // grad W . f = 2 e^T P A e = -||e||^2 and ||grad W|| = 2 ||P e||.
  k.mu3 = 1.0;
  k.zeta3 = 2.0 * k.d3;
  k.ell_f = plant.ell_f();
  k.ell_g = plant.ell_g();
  k.ell_h = plant.ell_h();
  k.ell_grad_h = plant.ell_grad_h();
  return k;
}

SimplifyingConstants combine_constants(const PlantConstants& plant, const CostDescriptor& cost) {
  return {.ell_f = plant.ell_f,
          .ell_g = plant.ell_g,
          .c3 = plant.c3,
          .d3 = plant.d3,
          .mu3 = plant.mu3,
          .zeta3 = plant.zeta3,
          .mu_Phi = cost.mu_Phi,
          .ell_Phi_u = cost.ell_Phi_u,
          .ell_Phi_y = cost.ell_Phi_y,
          .L = cost.L};
}

DominanceParams derive_dominance_params(const SimplifyingConstants& k) {
  const double margin = k.mu_Phi - k.ell_Phi_u;
  if (!(margin > 0.0)) {
    throw CertificateError("strong convexity must dominate the sensitivity coupling: mu_Phi = " +
                           format_number(k.mu_Phi) + " <= ell_Phi_u = " + format_number(k.ell_Phi_u));
  }
  DominanceParams p;
  p.mu1 = k.mu3 / (2.0 * k.d3);
  p.theta1 = k.ell_f * k.ell_f * k.zeta3 * k.zeta3 / (2.0 * k.mu3);
  p.mu2 = margin / 2.0;
  p.theta2 = k.ell_g * k.ell_g * k.ell_Phi_y * k.ell_Phi_y / (2.0 * margin * k.c3);
  p.c1 = k.c3;
  p.d1 = k.d3;
  return p;
}

std::optional<XiInterval> feasible_xi(const DominanceParams& p) {
  if (!(p.theta1 * p.theta2 < p.mu1 * p.mu2)) return std::nullopt;
  XiInterval xi;
  xi.lo = p.theta2 / p.mu2;
  xi.hi = p.mu1 / p.theta1;
  if (!(xi.lo < xi.hi)) return std::nullopt;
  xi.chosen = std::sqrt(xi.lo * xi.hi);
  return xi;
}

MuBound check_mu_bound(const SimplifyingConstants& k) {
  const double radicand = k.ell_g * k.ell_g * k.ell_Phi_y * k.ell_Phi_y * k.d3 * k.zeta3 *
                          k.zeta3 * k.ell_f * k.ell_f / (k.c3 * k.mu3 * k.mu3);
  MuBound b;
  b.rhs = k.ell_Phi_u + std::sqrt(radicand);
  b.certified = k.mu_Phi > b.rhs;
  return b;
}

double decay_rate(const DominanceParams& p, double xi, double gain) {
  if (!(gain > 0.0)) throw CertificateError("decay rate needs a positive gain");
  const double plant_margin = p.mu1 - xi * p.theta1;
  const double algo_margin = p.mu2 - p.theta2 / xi;
  if (!(xi > 0.0) || !(plant_margin > 0.0) || !(algo_margin > 0.0)) {
    throw CertificateError("dominance violated at this xi = " + format_number(xi));
  }
  return std::min(plant_margin, gain * algo_margin);
}

double required_regularization(const SimplifyingConstants& k, double margin) {
  if (!(margin > 0.0)) throw InputError("regularization margin must be positive");
  const MuBound b = check_mu_bound(k);
  if (b.certified) return 0.0;
  double mu4 = std::max(0.0, b.rhs - k.mu_Phi + margin);
  // An absolute margin can vanish in rounding when rhs is large.
  while (!(k.mu_Phi + mu4 > b.rhs)) mu4 = std::nextafter(mu4 + (b.rhs - (k.mu_Phi + mu4)), INFINITY);
  return mu4;
}

std::optional<double> CertificateReport::tau_at_gain(double g) const {
  if (!certified || !params || !xi) return std::nullopt;
  return decay_rate(*params, xi->chosen, g);
}

CertificateReport certify(const SimplifyingConstants& k, double alpha, double gain,
                          std::optional<double> reference_rhs) {
  k.validate();
  CertificateReport r;
  r.constants = k;
  r.alpha = alpha;
  r.gain = gain;
  r.reference_rhs = reference_rhs;
  const MuBound b = check_mu_bound(k);
  r.mu_bound_rhs = b.rhs;
  r.required_mu4 = required_regularization(k);
  if (k.mu_Phi > k.ell_Phi_u) {
    r.params = derive_dominance_params(k);
    r.xi = feasible_xi(*r.params);
  }
  r.certified = b.certified && r.xi.has_value();
  if (r.certified && gain > 0.0) r.tau = decay_rate(*r.params, r.xi->chosen, gain);
  return r;
}

std::string format_report(const CertificateReport& r) {
  std::ostringstream os;
  auto line = [&](const char* name, double v) { os << name << " = " << format_number(v) << '\n'; };
  const auto& k = r.constants;
  line("ell_f", k.ell_f);
  line("ell_g", k.ell_g);
  line("c3", k.c3);
  line("d3", k.d3);
  line("mu3", k.mu3);
  line("zeta3", k.zeta3);
  line("mu_Phi", k.mu_Phi);
  line("ell_Phi_u", k.ell_Phi_u);
  line("ell_Phi_y", k.ell_Phi_y);
  line("L", k.L);
  if (r.params) {
    line("mu1", r.params->mu1);
    line("theta1", r.params->theta1);
    line("mu2", r.params->mu2);
    line("theta2", r.params->theta2);
    line("c1", r.params->c1);
    line("d1", r.params->d1);
    line("c2", r.params->c2);
    line("d2", r.params->d2);
  } else {
    os << "params = unavailable (mu_Phi <= ell_Phi_u)\n";
  }
  if (r.xi) {
    line("xi_lo", r.xi->lo);
    line("xi_hi", r.xi->hi);
    line("xi_chosen", r.xi->chosen);
  } else {
    os << "xi_interval = infeasible\n";
  }
  line("mu_bound_rhs", r.mu_bound_rhs);
  if (r.reference_rhs) line("reference_rhs", *r.reference_rhs);
  os << "certified = " << (r.certified ? "true" : "false") << '\n';
  line("required_mu4", r.required_mu4);
  line("alpha", r.alpha);
  line("gain", r.gain);
  if (r.tau) {
    line("tau", *r.tau);
  } else {
    os << "tau = n/a\n";
  }
  return os.str();
}

}  // namespace ofo
