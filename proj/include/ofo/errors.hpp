#pragma once

#include <stdexcept>
#include <string>

namespace ofo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: dimensions, signs, schema violations.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError() : Error("singular plant matrix") {}
};

/// The state matrix has no positive-definite Lyapunov solution.
class NotHurwitzError : public Error {
 public:
  explicit NotHurwitzError(const std::string& detail = {})
      : Error(detail.empty() ? "plant not pre-stabilized"
                             : "plant not pre-stabilized: " + detail) {}
};

/// A certificate precondition does not hold (e.g. mu_Phi <= ell_Phi_u).
class CertificateError : public Error {
 public:
  using Error::Error;
};

/// Non-finite state encountered while integrating.
class DivergenceError : public Error {
 public:
  DivergenceError(double time, const std::string& where)
      : Error("divergence detected at t = " + std::to_string(time) +
              (where.empty() ? std::string{} : " (" + where + ")")),
        time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace ofo
