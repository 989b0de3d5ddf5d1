#include "ofo/plant.hpp"

#include <cmath>
#include <string>

#include "ofo/errors.hpp"

namespace ofo {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void Plant::check_state(std::size_t n) const {
  if (n != state_dim()) {
    throw InputError("state has dimension " + std::to_string(n) + ", plant expects " +
                     std::to_string(state_dim()));
  }
}

void Plant::check_input(std::size_t m) const {
  if (m != input_dim()) {
    throw InputError("input has dimension " + std::to_string(m) + ", plant expects " +
                     std::to_string(input_dim()));
  }
}

Vector Plant::dynamics(const Vector& x, const Vector& u) const {
  check_state(x.size());
  check_input(u.size());
  Vector dx(state_dim());
  dynamics(x.span(), u.span(), dx.span());
  return dx;
}

Vector Plant::output(const Vector& x) const {
  check_state(x.size());
  Vector y(output_dim());
  output(x.span(), y.span());
  return y;
}

Vector Plant::steady_state(const Vector& u) const {
  check_input(u.size());
  return steady_state(u.span());
}

Vector Plant::steady_output(const Vector& u) const { return output(steady_state(u)); }

Matrix Plant::sensitivity(const Vector& u) const {
  check_input(u.size());
  std::vector<double> out(output_dim() * input_dim());
  sensitivity(u.span(), out);
  return Matrix(output_dim(), input_dim(), std::move(out));
}

LtiPlant::LtiPlant(Matrix a, Matrix b, Matrix b_w, Matrix c, Vector w)
    : a_(std::move(a)), b_(std::move(b)), bw_(std::move(b_w)), c_(std::move(c)), w_(std::move(w)) {
  const std::size_t n = a_.rows();
  if (n == 0 || !a_.square()) throw InputError("A must be square and nonempty, got " + shape(a_));
  if (b_.rows() != n || b_.cols() == 0) throw InputError("B must be " + std::to_string(n) + "xm, got " + shape(b_));
  if (bw_.rows() != n) throw InputError("B_w must have " + std::to_string(n) + " rows, got " + shape(bw_));
  if (c_.cols() != n || c_.rows() == 0) throw InputError("C must be px" + std::to_string(n) + ", got " + shape(c_));
  if (w_.size() != bw_.cols()) {
    throw InputError("disturbance has dimension " + std::to_string(w_.size()) + ", B_w has " +
                     std::to_string(bw_.cols()) + " columns");
  }
  if (!w_.all_finite()) throw InputError("disturbance must be finite");

  // W(x,u) = e^T P e with e = x - s(u) needs A^T P + P A = -I.
  p_ = solve_lyapunov(a_.transpose(), Matrix::identity(n));
  try {
    a_inv_ = inverse(a_);
  } catch (const SingularMatrixError&) {
    throw NotHurwitzError("A is singular");
  }
  neg_ainv_b_ = -1.0 * (a_inv_ * b_);
  gain_ = c_ * neg_ainv_b_;
  offset_ = bw_ * w_;
  steady_offset_ = -1.0 * (a_inv_ * offset_);
}

void LtiPlant::dynamics(std::span<const double> x, std::span<const double> u,
                        std::span<double> dxdt) const {
  const std::size_t n = a_.rows();
  const std::size_t m = b_.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double s = offset_[i];
    for (std::size_t j = 0; j < n; ++j) s += a_(i, j) * x[j];
    for (std::size_t j = 0; j < m; ++j) s += b_(i, j) * phi(u[j]);
    dxdt[i] = s;
  }
}

void LtiPlant::output(std::span<const double> x, std::span<double> y) const {
  multiply_into(c_, x, y);
}

Vector LtiPlant::steady_state(std::span<const double> u) const {
  Vector s = steady_offset_;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < u.size(); ++j) s[i] += neg_ainv_b_(i, j) * phi(u[j]);
  }
  return s;
}

void LtiPlant::sensitivity(std::span<const double> u, std::span<double> out) const {
  const std::size_t p = gain_.rows();
  const std::size_t m = gain_.cols();
  for (std::size_t j = 0; j < m; ++j) {
    const double slope = phi_slope(u[j]);
    for (std::size_t i = 0; i < p; ++i) out[i * m + j] = gain_(i, j) * slope;
  }
}

double LtiPlant::ell_f() const { return input_slope_bound() * spectral_norm(b_); }
double LtiPlant::ell_g() const { return spectral_norm(c_); }
double LtiPlant::ell_h() const { return input_slope_bound() * spectral_norm(gain_); }
double LtiPlant::ell_grad_h() const { return input_curvature_bound() * spectral_norm(gain_); }
double LtiPlant::state_matrix_norm() const { return spectral_norm(a_); }

LinearPlant::LinearPlant(Matrix a, Matrix b, Matrix b_w, Matrix c, Vector w)
    : LtiPlant(std::move(a), std::move(b), std::move(b_w), std::move(c), std::move(w)) {}

std::unique_ptr<Plant> LinearPlant::with_disturbance(const Vector& w) const {
  return std::make_unique<LinearPlant>(a(), b(), b_w(), c(), w);
}

double LinearPlant::phi(double u) const { return u; }
double LinearPlant::phi_slope(double) const { return 1.0; }

SinePlant::SinePlant(Matrix a, Matrix b, Matrix b_w, Matrix c, Vector w)
    : LtiPlant(std::move(a), std::move(b), std::move(b_w), std::move(c), std::move(w)) {
  if (input_dim() != 1) throw InputError("sine plant takes a scalar input (B must be nx1)");
}

std::unique_ptr<Plant> SinePlant::with_disturbance(const Vector& w) const {
  return std::make_unique<SinePlant>(a(), b(), b_w(), c(), w);
}

double SinePlant::phi(double u) const { return u + std::sin(u); }
double SinePlant::phi_slope(double u) const { return 1.0 + std::cos(u); }

FunctionPlant::FunctionPlant(std::size_t n, std::size_t m, std::size_t p, PlantFunctions fns,
                             Vector w)
    : n_(n), m_(m), p_(p), fns_(std::move(fns)), w_(std::move(w)) {
  if (n_ == 0 || m_ == 0 || p_ == 0) throw InputError("function plant dimensions must be positive");
  if (!fns_.f || !fns_.g || !fns_.s || !fns_.grad_h) {
    throw InputError("function plant needs f, g, s and grad_h");
  }
}

void FunctionPlant::dynamics(std::span<const double> x, std::span<const double> u,
                             std::span<double> dxdt) const {
  const Vector r = fns_.f(Vector(x), Vector(u), w_);
  if (r.size() != n_) throw InputError("function plant f returned wrong dimension");
  std::copy(r.begin(), r.end(), dxdt.begin());
}

void FunctionPlant::output(std::span<const double> x, std::span<double> y) const {
  const Vector r = fns_.g(Vector(x));
  if (r.size() != p_) throw InputError("function plant g returned wrong dimension");
  std::copy(r.begin(), r.end(), y.begin());
}

Vector FunctionPlant::steady_state(std::span<const double> u) const {
  Vector r = fns_.s(Vector(u), w_);
  if (r.size() != n_) throw InputError("function plant s returned wrong dimension");
  return r;
}

void FunctionPlant::sensitivity(std::span<const double> u, std::span<double> out) const {
  const Matrix r = fns_.grad_h(Vector(u), w_);
  if (r.rows() != p_ || r.cols() != m_) throw InputError("function plant grad_h has wrong shape");
  std::copy(r.entries().begin(), r.entries().end(), out.begin());
}

std::unique_ptr<Plant> FunctionPlant::with_disturbance(const Vector& w) const {
  return std::make_unique<FunctionPlant>(n_, m_, p_, fns_, w);
}

}  // namespace ofo
