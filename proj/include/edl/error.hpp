#pragma once

#include <stdexcept>
#include <string>

namespace edl {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what) : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Precondition on an argument violated (t <= 0, radius >= pi, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain_error", what) {}
};

/// An iterative method (Picard, Newton, bracketing) did not converge.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error("convergence_error", what) {}
};

/// The integrated range contains no sign change of U.
class NoZeroFound : public Error {
 public:
  NoZeroFound(double rho_max, double u, double du)
      : Error("no_zero_found", "no zero found up to rho=" + std::to_string(rho_max) + " (U=" + std::to_string(u) +
                                   ", U'=" + std::to_string(du) + ")"),
        rho_max(rho_max), u(u), du(du)
  {
  }
  double rho_max, u, du;
};

/// Hypothesis (H) fails: f(x) > 0 and f(x) >= x f'(x) on the sampled interval.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(const std::string& what, double x, double margin)
      : Error("hypothesis_violation", what), x(x), margin(margin)
  {
  }
  double x, margin;
};

/// Query outside the region covered by a family atlas.
class OutsideRegion : public Error {
 public:
  OutsideRegion(const std::string& what, double x, double y) : Error("outside_region", what), x(x), y(y) {}
  double x, y;
};

/// The Jacobian H U'' - U' H' changes sign or vanishes: the atlas is not a
/// diffeomorphism there.
class JacobianFailure : public Error {
 public:
  JacobianFailure(const std::string& what, double t, double rho) : Error("jacobian_failure", what), t(t), rho(rho) {}
  double t, rho;
};

}  // namespace edl
