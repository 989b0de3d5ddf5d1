#pragma once

// Gain-independent exponential stability certificate for OFO loops.
//
// The plant is summarized by a quadratic Lyapunov function W with sandwich
// constants c3 <= d3, decay mu3 and gradient bound zeta3, plus the Lipschitz
// moduli ell_f (f in u) and ell_g (g). The cost contributes mu_Phi, ell_Phi_u,
// ell_Phi_y and L. From these the coupled decay inequalities
//
//   Vx' <= -mu1 Vx + theta1 Vu,     Vu' <= gain * (theta2 Vx - mu2 Vu)
//
// follow, and V = max{xi Vx, Vu} decays at rate tau for every xi in
// (theta2/mu2, mu1/theta1), whatever the controller gain.

#include <optional>
#include <string>

#include "ofo/cost.hpp"
#include "ofo/linalg.hpp"
#include "ofo/plant.hpp"

namespace ofo {

struct PlantConstants {
  double ell_f = 0.0;
  double ell_g = 0.0;
  double c3 = 0.0;
  double d3 = 0.0;
  double mu3 = 0.0;
  double zeta3 = 0.0;
  double ell_h = 0.0;
  double ell_grad_h = 0.0;
  Matrix weight;  // P in W = e^T P e
};

struct SimplifyingConstants {
  double ell_f = 0.0;
  double ell_g = 0.0;
  double c3 = 0.0;
  double d3 = 0.0;
  double mu3 = 0.0;
  double zeta3 = 0.0;
  double mu_Phi = 0.0;
  double ell_Phi_u = 0.0;
  double ell_Phi_y = 0.0;
  double L = 0.0;

  /// Throws InputError unless every constant is positive (ell_Phi_u may be 0),
  /// c3 <= d3 and L >= mu_Phi.
  void validate() const;

  friend bool operator==(const SimplifyingConstants&, const SimplifyingConstants&) = default;
};

/// Optional replacements for derived constants.
struct ConstantOverrides {
  std::optional<double> ell_f, ell_g, c3, d3, mu3, zeta3, mu_Phi, ell_Phi_u, ell_Phi_y, L;

  bool empty() const;
  SimplifyingConstants apply(SimplifyingConstants k) const;

  friend bool operator==(const ConstantOverrides&, const ConstantOverrides&) = default;
};

struct DominanceParams {
  double mu1 = 0.0;
  double theta1 = 0.0;
  double mu2 = 0.0;
  double theta2 = 0.0;
  // Sandwich constants of Vx = W(., u*) and Vu = 0.5 ||u - u*||^2.
  double c1 = 0.0;
  double d1 = 0.0;
  double c2 = 0.5;
  double d2 = 0.5;
};

struct XiInterval {
  double lo = 0.0;
  double hi = 0.0;
  double chosen = 0.0;  // geometric mean of lo and hi
};

struct MuBound {
  bool certified = false;
  double rhs = 0.0;
};

/// Uses P from A^T P + P A = -I: c3 = lambda_min(P), d3 = lambda_max(P),
/// mu3 = 1, zeta3 = 2 lambda_max(P). Throws NotHurwitzError as
/// "plant not certifiable" if the Lyapunov solve fails.
PlantConstants derive_plant_constants(const LtiPlant& plant);

SimplifyingConstants combine_constants(const PlantConstants& plant, const CostDescriptor& cost);

/// Throws CertificateError when mu_Phi <= ell_Phi_u.
DominanceParams derive_dominance_params(const SimplifyingConstants& k);

/// Empty unless theta1 * theta2 < mu1 * mu2.
std::optional<XiInterval> feasible_xi(const DominanceParams& p);

/// Strict comparison mu_Phi > rhs with zero slack.
MuBound check_mu_bound(const SimplifyingConstants& k);

/// min{mu1 - xi theta1, gain (mu2 - theta2 / xi)}. Throws CertificateError if
/// xi is outside the feasible interval or gain <= 0.
double decay_rate(const DominanceParams& p, double xi, double gain);

/// Smallest extra strong convexity (plus margin) that makes the bound hold;
/// 0 when it already holds.
double required_regularization(const SimplifyingConstants& k, double margin = 1e-6);

struct CertificateReport {
  SimplifyingConstants constants;
  std::optional<DominanceParams> params;  // absent when mu_Phi <= ell_Phi_u
  std::optional<XiInterval> xi;
  bool certified = false;
  double mu_bound_rhs = 0.0;
  double required_mu4 = 0.0;
  double alpha = 0.0;
  double gain = 0.0;  // alpha, or alpha * beta for the projected controller
  std::optional<double> tau;
  /// Externally published threshold to print next to mu_bound_rhs.
  std::optional<double> reference_rhs;

  /// tau for another gain; nullopt when not certified.
  std::optional<double> tau_at_gain(double gain) const;
};

CertificateReport certify(const SimplifyingConstants& k, double alpha, double gain,
                          std::optional<double> reference_rhs = std::nullopt);

/// Flat `name = value` lines, numbers with 12 significant digits.
std::string format_report(const CertificateReport& report);

}  // namespace ofo
