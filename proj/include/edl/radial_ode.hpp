#pragma once

// Even solutions of U'' + cot(rho) U' + f(U) = 0 on [0, pi) with U(0) = t,
// and of the linearised equation H'' + cot(rho) H' + f'(U) H = 0, H(0) = 1.
//
// The singular point rho = 0 is handled by Picard iteration of
// U = t + A(f(U)) on a small interval [0, eps], where
//   A(g)(rho) = -int_0^rho (1/sin s) int_0^s sin(x) g(x) dx ds
// is evaluated by Chebyshev-Lobatto cumulative quadrature. Past eps the ODE is
// regular and is integrated by the adaptive Dormand-Prince pair.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edl/dopri5.hpp"
#include "edl/error.hpp"
#include "edl/format.hpp"
#include "edl/hermite.hpp"
#include "edl/nonlinearity.hpp"

namespace edl {

namespace detail {

/// Chebyshev-Lobatto nodes mapped onto [0, eps], ascending.
class LobattoGrid {
 public:
  LobattoGrid(double eps, int n) : eps_(eps), n_(n), rho_(static_cast<std::size_t>(n))
  {
    for (int j = 0; j < n; ++j) rho_[j] = 0.5 * eps * (1.0 - std::cos(std::numbers::pi * j / (n - 1)));
    rho_.back() = eps;
  }

  double eps() const { return eps_; }
  int size() const { return n_; }
  const std::vector<double>& nodes() const { return rho_; }

  /// int_0^{rho_j} g for every node, spectrally accurate for smooth g.
  std::vector<double> cumulative(std::span<const double> g) const
  {
    const int n = n_, m = n - 1;
    std::vector<double> c(static_cast<std::size_t>(n + 2), 0.0);
    for (int k = 0; k < n; ++k) {
      double s = 0;
      for (int j = 0; j < n; ++j) {
        const double w = (j == 0 || j == m) ? 0.5 : 1.0;
        s += w * g[j] * std::cos(std::numbers::pi * j * k / m);
      }
      c[k] = 2.0 * s / m;
    }
    c[m] *= 0.5;  // series is sum' c_k T_k from here on
    std::vector<double> b(static_cast<std::size_t>(n + 1), 0.0);
    for (int k = 1; k <= n; ++k) b[k] = (c[k - 1] - c[k + 1]) / (2.0 * k);
    std::vector<double> out(static_cast<std::size_t>(n));
    double g_at_one = 0;
    for (int k = 1; k <= n; ++k) g_at_one += b[k];
    for (int j = 0; j < n; ++j) {
      double gx = 0;
      for (int k = 1; k <= n; ++k) gx += b[k] * std::cos(std::numbers::pi * static_cast<double>(j) * k / m);
      out[j] = 0.5 * eps_ * (g_at_one - gx);
    }
    out[0] = 0.0;
    return out;
  }

  /// Barycentric interpolation of node values at r in [0, eps].
  double interpolate(std::span<const double> values, double r) const
  {
    double num = 0, den = 0;
    for (int j = 0; j < n_; ++j) {
      const double d = r - rho_[j];
      if (d == 0) return values[j];
      double w = (j % 2 == 0) ? 1.0 : -1.0;
      if (j == 0 || j == n_ - 1) w *= 0.5;
      num += w / d * values[j];
      den += w / d;
    }
    return num / den;
  }

 private:
  double eps_;
  int n_;
  std::vector<double> rho_;
};

inline int lobatto_size_for(double eps) { return eps <= 0.5 ? 33 : (eps <= 2.0 ? 65 : 129); }

struct ANodes {
  std::vector<double> value, slope;
};

/// A(g) and A(g)' at the nodes, from g sampled at the nodes.
inline ANodes apply_A_nodes(const LobattoGrid& grid, std::span<const double> g)
{
  const auto& r = grid.nodes();
  const std::size_t n = r.size();
  std::vector<double> sg(n), h(n);
  for (std::size_t j = 0; j < n; ++j) sg[j] = std::sin(r[j]) * g[j];
  auto inner = grid.cumulative(sg);
  for (std::size_t j = 0; j < n; ++j) h[j] = j == 0 ? 0.0 : inner[j] / std::sin(r[j]);
  auto outer = grid.cumulative(h);
  ANodes out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.value[j] = -outer[j];
    out.slope[j] = -h[j];
  }
  return out;
}

}  // namespace detail

/// A(g) and its first derivative sampled on a grid.
struct SampledA {
  std::vector<double> value;
  std::vector<double> slope;
};

/// Evaluates A(g)(rho) = -int_0^rho (1/sin s) int_0^s sin(x) g(x) dx ds on the
/// given grid of points in [0, eps], eps = max(grid) < pi.
inline SampledA apply_A(const std::function<double(double)>& g, std::span<const double> grid)
{
  if (grid.empty()) return {};
  const double eps = *std::max_element(grid.begin(), grid.end());
  if (!(eps < std::numbers::pi)) throw DomainError("apply_A: interval end must be < pi, got " + format_roundtrip(eps));
  if (*std::min_element(grid.begin(), grid.end()) < 0) throw DomainError("apply_A: grid must lie in [0, eps]");
  if (eps == 0) return {std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
  detail::LobattoGrid lg(eps, detail::lobatto_size_for(eps));
  std::vector<double> gv(lg.nodes().size());
  for (std::size_t j = 0; j < gv.size(); ++j) gv[j] = g(lg.nodes()[j]);
  auto a = detail::apply_A_nodes(lg, gv);
  SampledA out;
  for (double r : grid) {
    out.value.push_back(lg.interpolate(a.value, r));
    out.slope.push_back(lg.interpolate(a.slope, r));
  }
  return out;
}

struct SolverOptions {
  double startup_radius = 0.05;  ///< requested eps0; shrunk until the contraction bound holds
  double picard_tol = 1e-12;     ///< sup-norm change, relative to max(1, |t|)
  int picard_max_iter = 50;
  StepControl step{};
  double zero_margin = 0.02;     ///< integrate to r_t + margin
  double pi_clearance = 1e-3;    ///< never integrate past pi - clearance
  int dense_points = 2048;
  double extend_to = 0.0;        ///< if > 0, integrate exactly to this rho (clipped) whatever r_t is
};

struct ProfileSample {
  double U, Uprime, Usecond;
};

/// Sampled U_t. The dense uniform grid `rho` is what downstream code consumes;
/// the Chebyshev startup nodes and adaptive step points are kept for
/// diagnostics and resampling.
struct RadialProfile {
  Nonlinearity nl;
  double t = 0;
  SolverOptions opts;

  double startup_radius = 0;
  int picard_iterations = 0;
  double contraction_bound = 0;
  std::vector<double> startup_rho, startup_U, startup_Uprime;
  std::vector<double> step_rho, step_U, step_Uprime;

  std::vector<double> rho, U, Uprime, Usecond;
  std::optional<double> r_t;
  std::optional<double> slope_at_zero;

  double rho_max() const { return rho.back(); }
  double spacing() const { return rho[1] - rho[0]; }

  /// Second derivative from the equation itself; the limit -f(U)/2 at rho = 0.
  double second_derivative(double r, double u, double du) const
  {
    if (std::abs(r) < 1e-12) return -0.5 * nl.f(u);
    return -std::cos(r) / std::sin(r) * du - nl.f(u);
  }

  /// Hermite interpolation on the dense grid with even extension to rho < 0.
  ProfileSample eval(double r) const
  {
    const double a = std::abs(r);
    if (a > rho_max() * (1 + 1e-14)) throw DomainError("profile evaluated at rho=" + format_roundtrip(r) +
                                                      " beyond rho_max=" + format_roundtrip(rho_max()));
    const double h = spacing();
    const std::size_t n = rho.size();
    std::size_t i = std::min(static_cast<std::size_t>(a / h), n - 2);
    const double s = std::clamp((a - rho[i]) / h, 0.0, 1.0);
    const double u = detail::hermite(s, h, U[i], Uprime[i], U[i + 1], Uprime[i + 1]);
    double du = detail::hermite(s, h, Uprime[i], Usecond[i], Uprime[i + 1], Usecond[i + 1]);
    const double d2 = second_derivative(a, u, du);
    if (r < 0) du = -du;
    return {u, du, d2};
  }
};

namespace detail {

struct Startup {
  LobattoGrid grid;
  std::vector<double> value, slope;
  int iterations;
  double contraction;
};

// Sup of |f'| over the ball [center - 1, center + 1]; samples where f' is not
// evaluable are skipped.
inline double sup_abs_derivative(const Nonlinearity& nl, double center)
{
  double sup = 0;
  bool any = false;
  for (int i = 0; i <= 100; ++i) {
    const double x = center - 1.0 + 2.0 * i / 100;
    try {
      sup = std::max(sup, std::abs(nl.fprime(x)));
      any = true;
    } catch (const DomainError&) {
    }
  }
  if (!any) throw DomainError("f' is not evaluable near U=" + format_roundtrip(center));
  return sup;
}

inline double contraction_bound(double eps, double lip) { return 2.0 * std::abs(std::log(std::cos(eps / 2))) * lip; }

inline double choose_startup_radius(double requested, double lip)
{
  double eps = std::min(requested, 1.0);
  while (contraction_bound(eps, lip) >= 0.5) {
    eps *= 0.5;
    if (eps < 1e-9) throw ConvergenceError("Picard startup: no radius gives a contraction (sup|f'| = " +
                                           format_roundtrip(lip) + ")");
  }
  return eps;
}

// Fixed point of v = base + A(g(v)) on the Lobatto nodes.
template <class G>
Startup picard(const LobattoGrid& grid, double base, G&& g_of, const SolverOptions& opts, double contraction)
{
  const std::size_t n = grid.nodes().size();
  std::vector<double> v(n, base), gv(n);
  double prev_change = 0, change = 0;
  const double tol = opts.picard_tol * std::max(1.0, std::abs(base));
  ANodes a;
  for (int it = 1; it <= opts.picard_max_iter; ++it) {
    for (std::size_t j = 0; j < n; ++j) gv[j] = g_of(j, v[j]);
    a = apply_A_nodes(grid, gv);
    change = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double nv = base + a.value[j];
      change = std::max(change, std::abs(nv - v[j]));
      v[j] = nv;
    }
    if (!std::isfinite(change)) break;
    if (change <= tol) return {grid, v, a.slope, it, contraction};
    prev_change = change;
  }
  const double estimate = prev_change > 0 ? change / prev_change : NAN;
  throw ConvergenceError("Picard iteration failed to contract on [0, " + format_roundtrip(grid.eps()) +
                         "]: last change " + format_roundtrip(change) + ", observed contraction " +
                         format_roundtrip(estimate) + ", bound " + format_roundtrip(contraction));
}

inline Startup startup_profile(const Nonlinearity& nl, double t, const SolverOptions& opts)
{
  const double lip = sup_abs_derivative(nl, t);
  const double eps = choose_startup_radius(opts.startup_radius, lip);
  LobattoGrid grid(eps, lobatto_size_for(eps));
  return picard(grid, t, [&](std::size_t, double u) { return nl.f(u); }, opts, contraction_bound(eps, lip));
}

struct StepTrace {
  std::vector<double> rho, y, dy;  // one component and its derivative
};

inline void check_finite(double rho, double u, double du)
{
  if (!std::isfinite(u) || !std::isfinite(du))
    throw DomainError("non-finite profile value at rho=" + format_roundtrip(rho));
}

}  // namespace detail

/// First positive zero of U, refined on the dense interpolant. Throws
/// NoZeroFound when U keeps its sign over the integrated range.
inline double first_zero(const RadialProfile& p)
{
  const std::size_t n = p.rho.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (p.U[i] > 0 && p.U[i + 1] <= 0) {
      if (p.U[i + 1] == 0) return p.rho[i + 1];
      auto g = [&](double r) { return p.eval(r).U; };
      return detail::bracketed_root(g, p.rho[i], p.rho[i + 1], p.U[i], p.U[i + 1], 1e-16);
    }
  }
  throw NoZeroFound(p.rho_max(), p.U.back(), p.Uprime.back());
}

/// Solves for U_t: Picard startup on [0, eps0] then adaptive continuation to
/// min(r_t + margin, pi - clearance), or to pi - clearance when U has no zero.
inline RadialProfile solve_profile(const Nonlinearity& nl, double t, const SolverOptions& opts = {})
{
  if (!(t > 0)) throw DomainError("t must be positive, got " + format_roundtrip(t));
  const double pi = std::numbers::pi;
  const double hard_end = pi - opts.pi_clearance;

  auto st = detail::startup_profile(nl, t, opts);
  RadialProfile p;
  p.nl = nl;
  p.t = t;
  p.opts = opts;
  p.startup_radius = st.grid.eps();
  p.picard_iterations = st.iterations;
  p.contraction_bound = st.contraction;
  p.startup_rho = st.grid.nodes();
  p.startup_U = st.value;
  p.startup_Uprime = st.slope;

  auto accel = [&](double r, double u, double du) { return -std::cos(r) / std::sin(r) * du - nl.f(u); };

  double limit = hard_end;
  if (opts.extend_to > 0) limit = std::min(std::max(opts.extend_to, 0.0), hard_end);
  bool crossed = false;
  auto note_crossing = [&](double r0, double u0, double d0, double r1, double u1, double d1) {
    const double h = r1 - r0;
    auto herm = [&](double r) { return detail::hermite((r - r0) / h, h, u0, d0, u1, d1); };
    const double r = detail::bracketed_root(herm, r0, r1, u0, u1, 1e-14);
    crossed = true;
    if (opts.extend_to <= 0) limit = std::min(r + opts.zero_margin, hard_end);
  };

  // zero inside the startup interval
  for (std::size_t j = 0; j + 1 < st.value.size() && !crossed; ++j)
    if (st.value[j] > 0 && st.value[j + 1] <= 0)
      note_crossing(p.startup_rho[j], st.value[j], st.slope[j], p.startup_rho[j + 1], st.value[j + 1],
                    st.slope[j + 1]);

  using Stepper = Dopri5<2>;
  Stepper rk([&](double r, const Stepper::State& y) { return Stepper::State{y[1], accel(r, y[0], y[1])}; },
             p.startup_radius, {st.value.back(), st.slope.back()}, opts.step);
  p.step_rho.push_back(rk.x());
  p.step_U.push_back(rk.y()[0]);
  p.step_Uprime.push_back(rk.y()[1]);
  while (rk.x() < limit) {
    const double r0 = rk.x(), u0 = rk.y()[0], d0 = rk.y()[1];
    rk.step(limit);
    detail::check_finite(rk.x(), rk.y()[0], rk.y()[1]);
    p.step_rho.push_back(rk.x());
    p.step_U.push_back(rk.y()[0]);
    p.step_Uprime.push_back(rk.y()[1]);
    if (!crossed && u0 > 0 && rk.y()[0] <= 0) note_crossing(r0, u0, d0, rk.x(), rk.y()[0], rk.y()[1]);
  }
  const double rho_end = std::max(rk.x(), p.startup_radius);

  // dense uniform resampling
  const int n = std::max(opts.dense_points, 16);
  std::vector<double> step_d2(p.step_rho.size());
  for (std::size_t i = 0; i < p.step_rho.size(); ++i) step_d2[i] = accel(p.step_rho[i], p.step_U[i], p.step_Uprime[i]);
  p.rho.resize(n);
  p.U.resize(n);
  p.Uprime.resize(n);
  p.Usecond.resize(n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    const double r = (i == n - 1) ? rho_end : rho_end * i / (n - 1);
    p.rho[i] = r;
    if (r <= p.startup_radius) {
      p.U[i] = st.grid.interpolate(st.value, r);
      p.Uprime[i] = st.grid.interpolate(st.slope, r);
    } else {
      while (k + 2 < p.step_rho.size() && p.step_rho[k + 1] < r) ++k;
      const double h = p.step_rho[k + 1] - p.step_rho[k];
      const double s = std::clamp((r - p.step_rho[k]) / h, 0.0, 1.0);
      p.U[i] = detail::hermite(s, h, p.step_U[k], p.step_Uprime[k], p.step_U[k + 1], p.step_Uprime[k + 1]);
      p.Uprime[i] = detail::hermite(s, h, p.step_Uprime[k], step_d2[k], p.step_Uprime[k + 1], step_d2[k + 1]);
    }
    p.Usecond[i] = p.second_derivative(r, p.U[i], p.Uprime[i]);
  }
  p.Uprime[0] = 0.0;

  if (crossed) {
    p.r_t = first_zero(p);
    p.slope_at_zero = p.eval(*p.r_t).Uprime;
  }
  return p;
}

/// Sampled H_t = dU_t/dt on the parent's dense grid.
struct VariationProfile {
  std::shared_ptr<const RadialProfile> parent;
  std::vector<double> H, Hprime, Hsecond;
  int picard_iterations = 0;

  double second_derivative(double r, double u, double h, double dh) const
  {
    if (std::abs(r) < 1e-12) return -0.5 * parent->nl.fprime(u) * h;
    return -std::cos(r) / std::sin(r) * dh - parent->nl.fprime(u) * h;
  }

  /// (H, H', H'') at r, even extension.
  ProfileSample eval(double r) const
  {
    const auto& p = *parent;
    const double a = std::abs(r);
    if (a > p.rho_max() * (1 + 1e-14)) throw DomainError("variation evaluated beyond rho_max");
    const double h = p.spacing();
    std::size_t i = std::min(static_cast<std::size_t>(a / h), p.rho.size() - 2);
    const double s = std::clamp((a - p.rho[i]) / h, 0.0, 1.0);
    const double v = detail::hermite(s, h, H[i], Hprime[i], H[i + 1], Hprime[i + 1]);
    double dv = detail::hermite(s, h, Hprime[i], Hsecond[i], Hprime[i + 1], Hsecond[i + 1]);
    const double d2 = second_derivative(a, p.eval(a).U, v, dv);
    if (r < 0) dv = -dv;
    return {v, dv, d2};
  }
};

/// Solves the linearised equation along U_t with the same startup and
/// continuation scheme (g = f'(U_t) H inside A).
inline VariationProfile solve_variation(const Nonlinearity& nl, const RadialProfile& p)
{
  if (p.rho.size() < 2) throw DomainError("solve_variation: empty profile");
  VariationProfile v;
  v.parent = std::make_shared<const RadialProfile>(p);
  const auto& opts = p.opts;

  detail::LobattoGrid grid(p.startup_radius, static_cast<int>(p.startup_rho.size()));
  double lip = 0;
  for (double u : p.startup_U) lip = std::max(lip, std::abs(nl.fprime(u)));
  const double bound = detail::contraction_bound(grid.eps(), lip);
  auto st = detail::picard(grid, 1.0, [&](std::size_t j, double h) { return nl.fprime(p.startup_U[j]) * h; }, opts,
                           bound);
  v.picard_iterations = st.iterations;

  using Stepper = Dopri5<4>;
  auto rhs = [&](double r, const Stepper::State& y) {
    const double c = std::cos(r) / std::sin(r);
    return Stepper::State{y[1], -c * y[1] - nl.f(y[0]), y[3], -c * y[3] - nl.fprime(y[0]) * y[2]};
  };
  Stepper rk(rhs, grid.eps(), {p.startup_U.back(), p.startup_Uprime.back(), st.value.back(), st.slope.back()},
             opts.step);
  std::vector<double> sr{rk.x()}, sh{st.value.back()}, sdh{st.slope.back()}, sd2h;
  const double end = p.rho_max();
  while (rk.x() < end) {
    rk.step(end);
    detail::check_finite(rk.x(), rk.y()[2], rk.y()[3]);
    sr.push_back(rk.x());
    sh.push_back(rk.y()[2]);
    sdh.push_back(rk.y()[3]);
  }
  for (std::size_t i = 0; i < sr.size(); ++i) {
    const double u = i == 0 ? p.startup_U.back() : p.eval(sr[i]).U;
    sd2h.push_back(-std::cos(sr[i]) / std::sin(sr[i]) * sdh[i] - nl.fprime(u) * sh[i]);
  }

  const std::size_t n = p.rho.size();
  v.H.resize(n);
  v.Hprime.resize(n);
  v.Hsecond.resize(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = p.rho[i];
    if (r <= grid.eps()) {
      v.H[i] = grid.interpolate(st.value, r);
      v.Hprime[i] = grid.interpolate(st.slope, r);
    } else {
      while (k + 2 < sr.size() && sr[k + 1] < r) ++k;
      const double h = sr[k + 1] - sr[k];
      const double s = std::clamp((r - sr[k]) / h, 0.0, 1.0);
      v.H[i] = detail::hermite(s, h, sh[k], sdh[k], sh[k + 1], sdh[k + 1]);
      v.Hprime[i] = detail::hermite(s, h, sdh[k], sd2h[k], sdh[k + 1], sd2h[k + 1]);
    }
    v.Hsecond[i] = v.second_derivative(r, p.U[i], v.H[i], v.Hprime[i]);
  }
  v.Hprime[0] = 0.0;
  return v;
}

// ---------------------------------------------------------------------------
// Diagnostics

/// max |U'' + cot(rho) U' + f(U)| over interior dense samples, with U''
/// taken as a fourth-order central difference of the stored U'. Samples
/// within `edge` of pi are skipped.
inline double ode_residual(const RadialProfile& p)
{
  const std::size_t n = p.rho.size();
  const double h = p.spacing();
  double worst = 0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double r = p.rho[i];
    const double d2 =
        (-p.Uprime[i + 2] + 8 * p.Uprime[i + 1] - 8 * p.Uprime[i - 1] + p.Uprime[i - 2]) / (12 * h);
    const double res = d2 + std::cos(r) / std::sin(r) * p.Uprime[i] + p.nl.f(p.U[i]);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

/// Same check for H'' + cot(rho) H' + f'(U) H.
inline double ode_residual(const VariationProfile& v)
{
  const auto& p = *v.parent;
  const std::size_t n = p.rho.size();
  const double h = p.spacing();
  double worst = 0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double r = p.rho[i];
    const double d2 = (-v.Hprime[i + 2] + 8 * v.Hprime[i + 1] - 8 * v.Hprime[i - 1] + v.Hprime[i - 2]) / (12 * h);
    const double res = d2 + std::cos(r) / std::sin(r) * v.Hprime[i] + p.nl.fprime(p.U[i]) * v.H[i];
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

/// Restarts the adaptive integrator from the Picard solution at eps0/2 and
/// returns max(|dU|, |dU'|) against the Picard values at eps0.
inline double startup_consistency(const RadialProfile& p)
{
  detail::LobattoGrid grid(p.startup_radius, static_cast<int>(p.startup_rho.size()));
  const double half = 0.5 * p.startup_radius;
  using Stepper = Dopri5<2>;
  const auto& nl = p.nl;
  Stepper rk([&](double r, const Stepper::State& y) {
    return Stepper::State{y[1], -std::cos(r) / std::sin(r) * y[1] - nl.f(y[0])};
  }, half, {grid.interpolate(p.startup_U, half), grid.interpolate(p.startup_Uprime, half)}, p.opts.step);
  while (rk.x() < p.startup_radius) rk.step(p.startup_radius);
  return std::max(std::abs(rk.y()[0] - p.startup_U.back()), std::abs(rk.y()[1] - p.startup_Uprime.back()));
}

struct JacobianReport {
  std::vector<double> rho, W;
  double max_W = -INFINITY;
  double min_abs_W = INFINITY;
  double rho_at_max = 0;
  bool negative = true;
};

/// W = H U'' - U' H' on [0, r_t] (dense samples plus r_t itself).
inline JacobianReport jacobian_W(const RadialProfile& p, const VariationProfile& v)
{
  const auto& q = *v.parent;
  if (q.rho.size() != p.rho.size() || q.t != p.t || q.rho.back() != p.rho.back())
    throw DomainError("jacobian_W: profile and variation are on different grids");
  if (!p.r_t) throw NoZeroFound(p.rho_max(), p.U.back(), p.Uprime.back());
  const double r_t = *p.r_t;
  JacobianReport rep;
  auto add = [&](double r, double w) {
    rep.rho.push_back(r);
    rep.W.push_back(w);
    if (w > rep.max_W) {
      rep.max_W = w;
      rep.rho_at_max = r;
    }
    rep.min_abs_W = std::min(rep.min_abs_W, std::abs(w));
    if (!(w < 0)) rep.negative = false;
  };
  for (std::size_t i = 0; i < p.rho.size() && p.rho[i] < r_t; ++i)
    add(p.rho[i], v.H[i] * p.Usecond[i] - p.Uprime[i] * v.Hprime[i]);
  const auto u = p.eval(r_t);
  const auto h = v.eval(r_t);
  add(r_t, h.U * u.Usecond - u.Uprime * h.Uprime);
  return rep;
}

struct LogConcavityReport {
  std::vector<double> rho, value;
  double max_value = -INFINITY;
  double rho_at_max = 0;
  double at_zero = 0;  ///< value at rho = r_t
  double extended_to = 0;
};

/// U'' U - U'^2 on the whole integrated range, which must extend past r_t.
inline LogConcavityReport log_concavity(const RadialProfile& p)
{
  if (!p.r_t || !(p.rho_max() > *p.r_t)) throw DomainError("log_concavity: profile is not extended past r_t");
  LogConcavityReport rep;
  for (std::size_t i = 0; i < p.rho.size(); ++i) {
    const double val = p.Usecond[i] * p.U[i] - p.Uprime[i] * p.Uprime[i];
    rep.rho.push_back(p.rho[i]);
    rep.value.push_back(val);
    if (val > rep.max_value) {
      rep.max_value = val;
      rep.rho_at_max = p.rho[i];
    }
  }
  const auto z = p.eval(*p.r_t);
  rep.at_zero = z.Usecond * z.U - z.Uprime * z.Uprime;
  rep.extended_to = p.rho_max();
  return rep;
}

/// min over [0, r_t] of U^2 + U'^2.
inline double min_phase_energy(const RadialProfile& p)
{
  if (!p.r_t) throw NoZeroFound(p.rho_max(), p.U.back(), p.Uprime.back());
  double m = INFINITY;
  for (std::size_t i = 0; i < p.rho.size() && p.rho[i] <= *p.r_t; ++i)
    m = std::min(m, p.U[i] * p.U[i] + p.Uprime[i] * p.Uprime[i]);
  const auto z = p.eval(*p.r_t);
  return std::min(m, z.U * z.U + z.Uprime * z.Uprime);
}

}  // namespace edl
