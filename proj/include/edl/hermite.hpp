#pragma once

#include <cmath>
#include <functional>

namespace edl::detail {

/// Cubic Hermite on [x0, x0 + h] through (y0, d0), (y1, d1), evaluated at x0 + s h.
inline double hermite(double s, double h, double y0, double d0, double y1, double d1)
{
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

/// d/dx of the same cubic.
inline double hermite_slope(double s, double h, double y0, double d0, double y1, double d1)
{
  const double s2 = s * s;
  return (6 * s2 - 6 * s) / h * y0 + (3 * s2 - 4 * s + 1) * d0 + (-6 * s2 + 6 * s) / h * y1 + (3 * s2 - 2 * s) * d1;
}

/// Root of g on [a, b] with g(a) > 0 >= g(b): Illinois-modified regula falsi
/// falling back to bisection when the secant point stalls.
inline double bracketed_root(const std::function<double(double)>& g, double a, double b, double ga, double gb,
                             double tol = 1e-15, int max_iter = 200)
{
  int side = 0;
  for (int it = 0; it < max_iter && b - a > tol * (1 + std::abs(a)); ++it) {
    double c = (a * gb - b * ga) / (gb - ga);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double gc = g(c);
    if (gc == 0) return c;
    if ((gc > 0) == (ga > 0)) {
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
    if (it % 8 == 7) {  // guarantee progress on stubborn brackets
      const double m = 0.5 * (a + b), gm = g(m);
      if ((gm > 0) == (ga > 0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
        gb = gm;
      }
    }
  }
  return std::abs(ga) < std::abs(gb) ? a : b;
}

}  // namespace edl::detail
