#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "edl/error.hpp"
#include "edl/format.hpp"

namespace edl {

/// The right-hand side f of Delta u + f(u) = 0 together with its derivative.
/// Hypothesis (H) is not assumed; see check_hypothesis_H.
struct Nonlinearity {
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  std::string label;

  double operator()(double x) const { return f(x); }
  double derivative(double x) const { return fprime(x); }
};

inline Nonlinearity linear(double lambda)
{
  return {[lambda](double x) { return lambda * x; }, [lambda](double) { return lambda; },
          "linear:" + format_roundtrip(lambda)};
}

/// f(x) = a x + b. With a = 2 the profile is U_t = -b/2 + (t + b/2) cos(rho).
inline Nonlinearity affine(double a, double b)
{
  return {[a, b](double x) { return a * x + b; }, [a](double) { return a; },
          "affine:" + format_roundtrip(a) + "," + format_roundtrip(b)};
}

inline Nonlinearity allen_cahn()
{
  return {[](double x) { return x - x * x * x; }, [](double x) { return 1.0 - 3.0 * x * x; }, "allen-cahn"};
}

/// f = 1, the torsion / Serrin problem.
inline Nonlinearity serrin()
{
  return {[](double) { return 1.0; }, [](double) { return 0.0; }, "serrin:f=1"};
}

/// f = e^x; violates f >= x f' for x > 1.
inline Nonlinearity exponential()
{
  return {[](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }, "exp"};
}

namespace detail {

// Fritsch-Carlson monotone cubic through (xs, ys).
struct MonotoneCubic {
  std::vector<double> xs, ys, ms;

  MonotoneCubic(std::vector<double> x, std::vector<double> y) : xs(std::move(x)), ys(std::move(y))
  {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw DomainError("table nonlinearity needs at least two (x, f) rows");
    for (std::size_t i = 1; i < n; ++i)
      if (!(xs[i] > xs[i - 1])) throw DomainError("table abscissae must be strictly increasing");
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    ms.resize(n);
    ms[0] = d[0];
    ms[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) ms[i] = (d[i - 1] * d[i] <= 0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) {
        ms[i] = ms[i + 1] = 0.0;
        continue;
      }
      const double a = ms[i] / d[i], b = ms[i + 1] / d[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        ms[i] = tau * a * d[i];
        ms[i + 1] = tau * b * d[i];
      }
    }
  }

  std::size_t locate(double x) const
  {
    if (x < xs.front() || x > xs.back())
      throw DomainError("table nonlinearity evaluated outside [" + format_roundtrip(xs.front()) + ", " +
                        format_roundtrip(xs.back()) + "] at x=" + format_roundtrip(x));
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(std::distance(xs.begin(), it));
    return std::min(i == 0 ? 0 : i - 1, xs.size() - 2);
  }

  double value(double x) const
  {
    const std::size_t i = locate(x);
    const double h = xs[i + 1] - xs[i], s = (x - xs[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * ys[i] + (s3 - 2 * s2 + s) * h * ms[i] + (-2 * s3 + 3 * s2) * ys[i + 1] +
           (s3 - s2) * h * ms[i + 1];
  }

  double slope(double x) const
  {
    const std::size_t i = locate(x);
    const double h = xs[i + 1] - xs[i], s = (x - xs[i]) / h;
    const double s2 = s * s;
    return (6 * s2 - 6 * s) / h * ys[i] + (3 * s2 - 4 * s + 1) * ms[i] + (-6 * s2 + 6 * s) / h * ys[i + 1] +
           (3 * s2 - 2 * s) * ms[i + 1];
  }
};

}  // namespace detail

/// Nonlinearity given by samples, evaluated with a monotone cubic. Evaluation
/// outside the sampled range throws DomainError.
inline Nonlinearity tabulated(std::vector<double> xs, std::vector<double> ys, std::string label)
{
  auto spline = std::make_shared<const detail::MonotoneCubic>(std::move(xs), std::move(ys));
  return {[spline](double x) { return spline->value(x); }, [spline](double x) { return spline->slope(x); },
          std::move(label)};
}

/// Reads a two-column CSV (x,f) with an optional header line.
inline Nonlinearity tabulated_from_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open nonlinearity table '" + path + "'");
  std::vector<double> xs, ys;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0, y = 0;
    if (!(row >> x >> y)) continue;  // header or comment
    xs.push_back(x);
    ys.push_back(y);
  }
  return tabulated(std::move(xs), std::move(ys), "table:" + path);
}

/// Parses "linear:<lambda>", "affine:<a>,<b>", "allen-cahn", "serrin",
/// "serrin:f=1", "exp" and "table:<csv path>".
inline Nonlinearity parse_nonlinearity(std::string_view spec)
{
  auto number = [&](std::string_view s) {
    std::string str(s);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != str.size() || str.empty()) throw DomainError("bad number '" + str + "' in nonlinearity '" +
                                                             std::string(spec) + "'");
    return v;
  };
  if (spec == "allen-cahn") return allen_cahn();
  if (spec == "serrin" || spec == "serrin:f=1") return serrin();
  if (spec == "exp") return exponential();
  if (spec.starts_with("linear:")) return linear(number(spec.substr(7)));
  if (spec.starts_with("affine:")) {
    auto rest = spec.substr(7);
    auto comma = rest.find(',');
    if (comma == std::string_view::npos) throw DomainError("affine nonlinearity needs 'affine:a,b'");
    return affine(number(rest.substr(0, comma)), number(rest.substr(comma + 1)));
  }
  if (spec.starts_with("table:")) return tabulated_from_csv(std::string(spec.substr(6)));
  throw DomainError("unknown nonlinearity '" + std::string(spec) + "'");
}

struct HypothesisReport {
  bool holds = true;
  double min_f = std::numeric_limits<double>::infinity();  ///< min f(x)
  double x_min_f = 0;
  double min_margin = std::numeric_limits<double>::infinity();  ///< min f(x) - x f'(x)
  double x_min_margin = 0;
  double worst_margin = 0;  ///< the smaller of the two minima
  double worst_x = 0;
};

/// Samples f > 0 and f - x f' >= 0 at n points of [a, b]. The second
/// inequality is non-strict and is allowed a rounding slack relative to |f|.
inline HypothesisReport check_hypothesis_H(const Nonlinearity& nl, double a, double b, int n)
{
  if (!(a > 0) || !(b > a) || n < 2) throw DomainError("check_hypothesis_H needs 0 < a < b and n >= 2");
  HypothesisReport rep;
  bool margin_ok = true;
  for (int i = 0; i < n; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / (n - 1);
    const double fx = nl.f(x), dfx = nl.fprime(x);
    const double margin = fx - x * dfx;
    if (fx < rep.min_f) {
      rep.min_f = fx;
      rep.x_min_f = x;
    }
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.x_min_margin = x;
    }
    if (margin < -1e-13 * (std::abs(fx) + std::abs(x * dfx))) margin_ok = false;
  }
  rep.holds = rep.min_f > 0 && margin_ok;
  if (rep.min_f <= rep.min_margin) {
    rep.worst_margin = rep.min_f;
    rep.worst_x = rep.x_min_f;
  } else {
    rep.worst_margin = rep.min_margin;
    rep.worst_x = rep.x_min_margin;
  }
  return rep;
}

}  // namespace edl
