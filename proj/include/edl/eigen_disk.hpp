#pragma once

// Linear case f(x) = lambda x: lambda is the first Dirichlet eigenvalue of
// the geodesic disk of radius R_lambda, with eigenfunction U(0) = 1 and
// boundary slope alpha = U'(R) < 0.

#include <cmath>
#include <numbers>

#include "edl/error.hpp"
#include "edl/format.hpp"
#include "edl/hermite.hpp"
#include "edl/radial_ode.hpp"

namespace edl {

struct EigenPair {
  double lambda = 0;
  double R = 0;
  double alpha = 0;
};

/// Throws NoZeroFound when the eigenfunction does not vanish before
/// pi - clearance (lambda too small to resolve).
inline EigenPair radius_for_lambda(double lambda, const SolverOptions& opts = {})
{
  if (!(lambda > 0)) throw DomainError("lambda must be positive, got " + format_roundtrip(lambda));
  auto p = solve_profile(linear(lambda), 1.0, opts);
  if (!p.r_t) throw NoZeroFound(p.rho_max(), p.U.back(), p.Uprime.back());
  // first eigenfunction: positive inside
  for (std::size_t i = 1; i < p.rho.size() && p.rho[i] < *p.r_t; ++i)
    if (!(p.U[i] > 0)) throw ConvergenceError("eigenfunction changes sign before its first zero");
  return {lambda, *p.r_t, *p.slope_at_zero};
}

namespace detail {

// R as a function of log(lambda), pi when no zero is resolved.
inline double radius_or_pi(double log_lambda, const SolverOptions& opts)
{
  try {
    return radius_for_lambda(std::exp(log_lambda), opts).R;
  } catch (const NoZeroFound&) {
    return std::numbers::pi;
  }
}

}  // namespace detail

/// Inverse of radius_for_lambda: decade scan over [1e-6, 1e6], then
/// Illinois/bisection in log(lambda) down to |R_lambda - R| <= r_tol.
inline EigenPair lambda_for_radius(double R, const SolverOptions& opts = {}, double r_tol = 1e-12)
{
  if (!(R > 0 && R < std::numbers::pi))
    throw DomainError("radius must lie in (0, pi), got " + format_roundtrip(R));
  if (R >= std::numbers::pi - opts.pi_clearance)
    throw ConvergenceError("no lambda bracket for R=" + format_roundtrip(R) + ": beyond the resolved range pi - " +
                           format_roundtrip(opts.pi_clearance));
  double lo = std::log(1e-6), glo = detail::radius_or_pi(lo, opts) - R;
  if (!(glo > 0)) throw ConvergenceError("no lambda bracket for R=" + format_roundtrip(R) + " in [1e-6, 1e6]");
  for (int k = -5; k <= 6; ++k) {
    const double hi = std::log(10.0) * k;
    const double ghi = detail::radius_or_pi(hi, opts) - R;
    if (ghi <= 0) {
      if (ghi == 0) return radius_for_lambda(std::exp(hi), opts);
      // secant steps on a near-affine map converge fast; bisection guard for the pi plateau
      double a = lo, b = hi, ga = glo, gb = ghi;
      int side = 0;
      for (int it = 0; it < 200; ++it) {
        double c = (a * gb - b * ga) / (gb - ga);
        if (!(c > a && c < b) || it % 6 == 5) c = 0.5 * (a + b);
        const double gc = detail::radius_or_pi(c, opts) - R;
        if (std::abs(gc) <= r_tol || b - a < 1e-15) return radius_for_lambda(std::exp(c), opts);
        if (gc > 0) {
          a = c;
          ga = gc;
          if (side == -1) gb *= 0.5;
          side = -1;
        } else {
          b = c;
          gb = gc;
          if (side == 1) ga *= 0.5;
          side = 1;
        }
      }
      throw ConvergenceError("lambda_for_radius did not converge for R=" + format_roundtrip(R));
    }
    lo = hi;
    glo = ghi;
  }
  throw ConvergenceError("no lambda bracket for R=" + format_roundtrip(R) + " in [1e-6, 1e6]");
}

}  // namespace edl
