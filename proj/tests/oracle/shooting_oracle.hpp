#pragma once

// Brute-force shooting reference for U'' + cot(rho) U' + f(U) = 0, U(0) = t.
//
// Deliberately independent of the library: a fixed-step classical RK4 with
// step h (default 1e-6) started from a fourth-order Taylor expansion at a
// small radius. Used to produce frozen reference values for the tests, never
// called from the library itself.

#include <cmath>
#include <functional>
#include <optional>
#include <utility>

namespace edl_oracle {

struct OracleResult {
  std::optional<double> first_zero;
  double slope_at_zero = 0.0;
};

// f'(t) is only needed for the rho^4 Taylor coefficient.
inline OracleResult shoot(const std::function<double(double)>& f,
                          const std::function<double(double)>& fprime,
                          double t, double h = 1e-6, double rho_stop = 3.1405926535897932)
{
  const double a = -f(t) / 4.0;
  const double b = a * (2.0 / 3.0 - fprime(t)) / 16.0;
  const double rho0 = 1e-4;
  double rho = rho0;
  long step = 0;
  double u = t + a * rho0 * rho0 + b * std::pow(rho0, 4);
  double du = 2 * a * rho0 + 4 * b * rho0 * rho0 * rho0;

  auto acc = [&](double r, double uu, double dd) { return -std::cos(r) / std::sin(r) * dd - f(uu); };

  OracleResult out;
  while (rho < rho_stop) {
    const double k1u = du, k1d = acc(rho, u, du);
    const double k2u = du + 0.5 * h * k1d, k2d = acc(rho + 0.5 * h, u + 0.5 * h * k1u, du + 0.5 * h * k1d);
    const double k3u = du + 0.5 * h * k2d, k3d = acc(rho + 0.5 * h, u + 0.5 * h * k2u, du + 0.5 * h * k2d);
    const double k4u = du + h * k3d, k4d = acc(rho + h, u + h * k3u, du + h * k3d);
    const double un = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    const double dn = du + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
    if (u > 0 && un <= 0) {
      // cubic Hermite on the step, bisection for its root
      auto herm = [&](double s) {
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * u + (s3 - 2 * s2 + s) * h * du + (-2 * s3 + 3 * s2) * un +
               (s3 - s2) * h * dn;
      };
      double lo = 0, hi = 1;
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (herm(mid) > 0 ? lo : hi) = mid;
      }
      const double s = 0.5 * (lo + hi);
      out.first_zero = rho + s * h;
      out.slope_at_zero = du + s * (dn - du);
      return out;
    }
    u = un;
    du = dn;
    ++step;
    rho = rho0 + static_cast<double>(step) * h;
  }
  return out;
}

// (U, U') at rho_at by the same scheme; the final step is shortened to land on it.
inline std::pair<double, double> sample(const std::function<double(double)>& f,
                                        const std::function<double(double)>& fprime, double t, double rho_at,
                                        double h = 1e-6)
{
  const double a = -f(t) / 4.0;
  const double b = a * (2.0 / 3.0 - fprime(t)) / 16.0;
  const double rho0 = 1e-4;
  double u = t + a * rho0 * rho0 + b * std::pow(rho0, 4);
  double du = 2 * a * rho0 + 4 * b * rho0 * rho0 * rho0;
  auto acc = [&](double r, double uu, double dd) { return -std::cos(r) / std::sin(r) * dd - f(uu); };
  const long n = static_cast<long>(std::ceil((rho_at - rho0) / h));
  const double hh = (rho_at - rho0) / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const double rho = rho0 + static_cast<double>(i) * hh;
    const double k1u = du, k1d = acc(rho, u, du);
    const double k2u = du + 0.5 * hh * k1d, k2d = acc(rho + 0.5 * hh, u + 0.5 * hh * k1u, du + 0.5 * hh * k1d);
    const double k3u = du + 0.5 * hh * k2d, k3d = acc(rho + 0.5 * hh, u + 0.5 * hh * k2u, du + 0.5 * hh * k2d);
    const double k4u = du + hh * k3d, k4d = acc(rho + hh, u + hh * k3u, du + hh * k3d);
    u += hh / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    du += hh / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
  }
  return {u, du};
}

}  // namespace edl_oracle
