#pragma once

// The candidate family: profiles U_t on a log-spaced t grid, the map
// F(t, rho) = (U_t(rho), U_t'(rho)) with its inverse (T, R), and the radial
// candidates v built from them on the sphere.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "edl/error.hpp"
#include "edl/format.hpp"
#include "edl/hermite.hpp"
#include "edl/nonlinearity.hpp"
#include "edl/parallel.hpp"
#include "edl/radial_ode.hpp"
#include "edl/sphere.hpp"

namespace edl {

struct AtlasOptions {
  SolverOptions solver{};
  double extension = 0.02;         ///< every profile reaches max r_t + extension (clipped)
  double region_margin = -1;       ///< rho beyond r_t admitted into S; < 0 picks it from the W check
  double hypothesis_floor = 1e-3;  ///< (H) is sampled on [floor * t_min, t_max]
  int hypothesis_samples = 2000;
  int boundary_side_samples = 256;
  int boundary_per_interval = 16;
  int seed_samples = 64;           ///< rho samples per knot in the Newton seed table
};

/// U and its partial derivatives at one (t, rho).
struct FamilySample {
  double U = 0, Uprime = 0;
  double Usecond = 0;  ///< from the equation: -cot(rho) U' - f(U)
  double Urr = 0;      ///< rho-derivative of the interpolated U'
  double Ut = 0, Uprime_t = 0;
};

struct InverseResult {
  double t = 0, rho = 0;
  int iterations = 0;
  double residual = 0;
};

class FamilyAtlas {
 public:
  Nonlinearity nl;
  AtlasOptions opts;
  std::vector<double> t_grid;
  std::vector<std::shared_ptr<const RadialProfile>> profiles;
  std::vector<std::shared_ptr<const VariationProfile>> variations;
  std::vector<double> r_knot;      ///< r_t at the knots
  std::vector<double> dr_knot;     ///< dr/dt = -H(r_t) / U'(r_t)
  std::vector<double> ext_knot;    ///< largest rho with W < 0 on the extension
  std::vector<JacobianReport> jacobians;
  double rho_ext = 0;              ///< common end of every stored profile
  double margin_S = 0;
  std::vector<std::array<double, 2>> boundary;  ///< closed polyline of S in the (x, y) plane
  double boundary_band = 1e-8;
  double max_sagitta = 0;

  double t_min() const { return t_grid.front(); }
  double t_max() const { return t_grid.back(); }

  /// Full jet at (t, rho); t may lie slightly outside the grid (cubic
  /// extrapolation on the end interval), |rho| <= rho_ext.
  FamilySample sample(double t, double rho) const
  {
    const double a = std::abs(rho);
    if (!(a <= rho_ext * (1 + 1e-14)))
      throw DomainError("rho=" + format_roundtrip(rho) + " beyond the atlas range " + format_roundtrip(rho_ext));
    if (!(t > 0)) throw DomainError("t must be positive, got " + format_roundtrip(t));
    const std::size_t k = interval(t);
    const double ht = t_grid[k + 1] - t_grid[k], s = (t - t_grid[k]) / ht;
    const auto& p0 = *profiles[k];
    const double h = p0.spacing();
    const std::size_t n = p0.rho.size();
    const std::size_t i = std::min(static_cast<std::size_t>(a / h), n - 2);
    const double sr = std::clamp((a - p0.rho[i]) / h, 0.0, 1.0);
    struct Knot {
      double u, up, dup, hh, hp, dhp;
    };
    auto knot = [&](std::size_t j) {
      const auto& p = *profiles[j];
      const auto& v = *variations[j];
      return Knot{detail::hermite(sr, h, p.U[i], p.Uprime[i], p.U[i + 1], p.Uprime[i + 1]),
                  detail::hermite(sr, h, p.Uprime[i], p.Usecond[i], p.Uprime[i + 1], p.Usecond[i + 1]),
                  detail::hermite_slope(sr, h, p.Uprime[i], p.Usecond[i], p.Uprime[i + 1], p.Usecond[i + 1]),
                  detail::hermite(sr, h, v.H[i], v.Hprime[i], v.H[i + 1], v.Hprime[i + 1]),
                  detail::hermite(sr, h, v.Hprime[i], v.Hsecond[i], v.Hprime[i + 1], v.Hsecond[i + 1]),
                  detail::hermite_slope(sr, h, v.Hprime[i], v.Hsecond[i], v.Hprime[i + 1], v.Hsecond[i + 1])};
    };
    const Knot k0 = knot(k), k1 = knot(k + 1);
    FamilySample out;
    out.U = detail::hermite(s, ht, k0.u, k0.hh, k1.u, k1.hh);
    out.Ut = detail::hermite_slope(s, ht, k0.u, k0.hh, k1.u, k1.hh);
    out.Uprime = detail::hermite(s, ht, k0.up, k0.hp, k1.up, k1.hp);
    out.Uprime_t = detail::hermite_slope(s, ht, k0.up, k0.hp, k1.up, k1.hp);
    out.Urr = detail::hermite(s, ht, k0.dup, k0.dhp, k1.dup, k1.dhp);
    out.Usecond = a < 1e-6 ? -0.5 * nl.f(out.U) : -std::cos(a) / std::sin(a) * out.Uprime - nl.f(out.U);
    if (rho < 0) {
      out.Uprime = -out.Uprime;
      out.Uprime_t = -out.Uprime_t;
    }
    return out;
  }

  /// First zero r(t) of the interpolated family.
  double r(double t) const
  {
    const std::size_t k = interval(t);
    const double ht = t_grid[k + 1] - t_grid[k], s = (t - t_grid[k]) / ht;
    if (s == 0) return r_knot[k];
    if (s == 1) return r_knot[k + 1];
    double rho = detail::hermite(s, ht, r_knot[k], dr_knot[k], r_knot[k + 1], dr_knot[k + 1]);
    for (int it = 0; it < 8; ++it) {
      rho = std::min(rho, rho_ext);
      const auto f = sample(t, rho);
      const double step = f.U / f.Uprime;
      rho -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return std::min(rho, rho_ext);
  }

  /// Largest |rho| admitted into S at parameter t.
  double rho_S(double t) const { return std::min(r(t) + margin_S, rho_ext); }

  /// (x, y) = F(t, rho) for t in [t_min, t_max], |rho| <= rho_S(t).
  std::array<double, 2> forward_F(double t, double rho) const
  {
    if (!(t >= t_min() && t <= t_max()))
      throw DomainError("t=" + format_roundtrip(t) + " outside the atlas range [" + format_roundtrip(t_min()) + ", " +
                        format_roundtrip(t_max()) + "]");
    if (!(std::abs(rho) <= rho_S(t) + 1e-12))
      throw DomainError("|rho|=" + format_roundtrip(std::abs(rho)) + " exceeds the family domain " +
                        format_roundtrip(rho_S(t)) + " at t=" + format_roundtrip(t));
    const auto f = sample(t, rho);
    return {f.U, f.Uprime};
  }

  enum class Membership { inside, band, outside };

  Membership classify(double x, double y) const
  {
    const double d = boundary_distance(x, y);
    if (d <= boundary_band) return Membership::band;
    return winding(x, y) != 0 ? Membership::inside : Membership::outside;
  }

  double boundary_distance(double x, double y) const
  {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < boundary.size(); ++i) {
      const auto& a = boundary[i];
      const auto& b = boundary[i + 1];
      const double dx = b[0] - a[0], dy = b[1] - a[1];
      const double len2 = dx * dx + dy * dy;
      double s = len2 > 0 ? ((x - a[0]) * dx + (y - a[1]) * dy) / len2 : 0;
      s = std::clamp(s, 0.0, 1.0);
      best = std::min(best, std::hypot(x - a[0] - s * dx, y - a[1] - s * dy));
    }
    return best;
  }

  /// (T, R) with F(T, R) = (x, y).
  InverseResult invert_F(double x, double y) const
  {
    const bool flip = y > 0;
    const double yy = flip ? -y : y;
    const auto where = classify(x, yy);
    if (where == Membership::outside)
      throw OutsideRegion("(x, y) = (" + format_roundtrip(x) + ", " + format_roundtrip(y) + ") lies outside S", x, y);

    std::vector<std::array<double, 2>> seeds;
    const double fx = x > 0 ? nl.f(x) : 0;
    if (std::abs(yy) <= 1e-2 * std::max(1.0, std::abs(x)) && x >= t_min() && x <= t_max() && fx > 0)
      seeds.push_back({x, -2 * yy / fx});
    seeds.push_back(nearest_seed(x, yy));

    std::string trace;
    for (const auto& seed : seeds) {
      auto res = newton(x, yy, seed[0], seed[1], trace);
      if (!res) continue;
      const double tol_t = 1e-12 * t_max();
      if (res->t < t_min() - tol_t || res->t > t_max() + tol_t) continue;
      res->t = std::clamp(res->t, t_min(), t_max());
      if (std::abs(res->rho) > rho_S(res->t) + 1e-10) continue;
      if (flip) res->rho = -res->rho;
      return *res;
    }
    if (where == Membership::inside)
      throw ConvergenceError("Newton inversion of F failed at (" + format_roundtrip(x) + ", " + format_roundtrip(y) +
                             "): " + trace);
    throw OutsideRegion("(x, y) = (" + format_roundtrip(x) + ", " + format_roundtrip(y) + ") lies outside S", x, y);
  }

  std::size_t interval(double t) const
  {
    auto it = std::upper_bound(t_grid.begin(), t_grid.end(), t);
    std::size_t k = it == t_grid.begin() ? 0 : static_cast<std::size_t>(it - t_grid.begin()) - 1;
    return std::min(k, t_grid.size() - 2);
  }

  struct SeedPoint {
    double x, y, t, rho;
  };
  std::vector<SeedPoint> seed_table;

 private:
  int winding(double x, double y) const
  {
    int wn = 0;
    for (std::size_t i = 0; i + 1 < boundary.size(); ++i) {
      const auto& a = boundary[i];
      const auto& b = boundary[i + 1];
      const double cross = (b[0] - a[0]) * (y - a[1]) - (x - a[0]) * (b[1] - a[1]);
      if (a[1] <= y) {
        if (b[1] > y && cross > 0) ++wn;
      } else if (b[1] <= y && cross < 0) {
        --wn;
      }
    }
    return wn;
  }

  std::array<double, 2> nearest_seed(double x, double y) const
  {
    double best = std::numeric_limits<double>::infinity();
    std::array<double, 2> out{t_min(), 0};
    for (const auto& s : seed_table) {
      const double d = (s.x - x) * (s.x - x) + (s.y - y) * (s.y - y);
      if (d < best) {
        best = d;
        out = {s.t, s.rho};
      }
    }
    return out;
  }

  std::optional<InverseResult> newton(double x, double y, double t, double rho, std::string& trace) const
  {
    const double tol = 1e-11 * std::max(1.0, std::abs(x) + std::abs(y));
    const double t_lo = t_grid[0] - 0.5 * (t_grid[1] - t_grid[0]);
    const double t_hi = t_max() + 0.5 * (t_max() - t_grid[t_grid.size() - 2]);
    auto clamp = [&](double& tt, double& rr) {
      tt = std::clamp(tt, std::max(t_lo, 0.5 * t_min()), t_hi);
      rr = std::clamp(rr, -rho_ext, rho_ext);
    };
    clamp(t, rho);
    auto f = sample(t, rho);
    double fx = f.U - x, fy = f.Uprime - y;
    double norm = std::hypot(fx, fy);
    for (int it = 0; it <= 60; ++it) {
      if (norm <= tol) return InverseResult{t, rho, it, norm};
      const double det = f.Ut * f.Urr - f.Uprime * f.Uprime_t;
      if (det == 0 || !std::isfinite(det)) break;
      const double dt = (f.Urr * fx - f.Uprime * fy) / det;
      const double dr = (-f.Uprime_t * fx + f.Ut * fy) / det;
      double lam = 1;
      bool moved = false;
      while (lam > 1e-6) {
        double nt = t - lam * dt, nr = rho - lam * dr;
        clamp(nt, nr);
        const auto g = sample(nt, nr);
        const double gx = g.U - x, gy = g.Uprime - y, gn = std::hypot(gx, gy);
        if (gn < norm) {
          t = nt;
          rho = nr;
          f = g;
          fx = gx;
          fy = gy;
          norm = gn;
          moved = true;
          break;
        }
        lam *= 0.5;
      }
      if (!moved) break;
    }
    trace += "[seed stalled at t=" + format_roundtrip(t) + " rho=" + format_roundtrip(rho) +
             " residual=" + format_roundtrip(norm) + "]";
    return std::nullopt;
  }
};

/// Log-spaced t grid with exact endpoints.
inline std::vector<double> log_grid(double a, double b, int n)
{
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  g.front() = a;
  g.back() = b;
  return g;
}

/// Solves every profile and variation, checks (H) and the Jacobian sign, and
/// records the region S.
inline std::shared_ptr<const FamilyAtlas> build_atlas(const Nonlinearity& nl, double t_min, double t_max, int n_t,
                                                      const AtlasOptions& opts = {})
{
  if (!(t_min > 0) || !(t_max > t_min)) throw DomainError("atlas needs 0 < t_min < t_max");
  if (n_t < 2) throw DomainError("atlas needs at least two t samples");
  const auto hyp = check_hypothesis_H(nl, opts.hypothesis_floor * t_min, t_max, opts.hypothesis_samples);
  if (!hyp.holds)
    throw HypothesisViolation("hypothesis (H) fails for " + nl.label + " at x=" + format_roundtrip(hyp.worst_x) +
                                  " (margin " + format_roundtrip(hyp.worst_margin) + ")",
                              hyp.worst_x, hyp.worst_margin);

  auto atlas = std::make_shared<FamilyAtlas>();
  atlas->nl = nl;
  atlas->opts = opts;
  atlas->t_grid = log_grid(t_min, t_max, n_t);
  const std::size_t n = atlas->t_grid.size();

  // first pass: radii only
  std::vector<double> r0(n);
  parallel_for(n, [&](std::size_t i) {
    auto p = solve_profile(nl, atlas->t_grid[i], opts.solver);
    if (!p.r_t) throw NoZeroFound(p.rho_max(), p.U.back(), p.Uprime.back());
    r0[i] = *p.r_t;
  });
  const double hard_end = std::numbers::pi - opts.solver.pi_clearance;
  atlas->rho_ext = std::min(*std::max_element(r0.begin(), r0.end()) + opts.extension, hard_end);

  SolverOptions so = opts.solver;
  so.extend_to = atlas->rho_ext;
  atlas->profiles.resize(n);
  atlas->variations.resize(n);
  atlas->r_knot.resize(n);
  atlas->dr_knot.resize(n);
  atlas->ext_knot.resize(n);
  atlas->jacobians.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const double t = atlas->t_grid[i];
    auto p = std::make_shared<RadialProfile>(solve_profile(nl, t, so));
    auto v = std::make_shared<VariationProfile>(solve_variation(nl, *p));
    auto w = jacobian_W(*p, *v);
    if (!w.negative)
      throw JacobianFailure("Jacobian H U'' - U' H' is not negative at t=" + format_roundtrip(t) +
                                ", rho=" + format_roundtrip(w.rho_at_max) + " (value " + format_roundtrip(w.max_W) + ")",
                            t, w.rho_at_max);
    const double r = *p->r_t;
    double ext = p->rho_max();
    for (std::size_t j = 0; j < p->rho.size(); ++j) {
      if (p->rho[j] <= r) continue;
      const double wj = v->H[j] * p->Usecond[j] - p->Uprime[j] * v->Hprime[j];
      if (!(wj < 0) || !(p->Uprime[j] < 0)) {
        ext = p->rho[j - 1];
        break;
      }
    }
    const auto hz = v->eval(r);
    atlas->r_knot[i] = r;
    atlas->dr_knot[i] = -hz.U / *p->slope_at_zero;
    atlas->ext_knot[i] = ext;
    atlas->jacobians[i] = std::move(w);
    atlas->profiles[i] = std::move(p);
    atlas->variations[i] = std::move(v);
  });
  for (std::size_t i = 1; i < n; ++i)
    if (atlas->profiles[i]->rho != atlas->profiles[0]->rho) throw DomainError("atlas profiles are on different grids");

  double room = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) room = std::min(room, atlas->ext_knot[i] - atlas->r_knot[i]);
  atlas->margin_S = opts.region_margin >= 0 ? std::min(opts.region_margin, room) : 0.9 * std::max(room, 0.0);

  // boundary of S: image of the parameter rectangle edge, counter-clockwise in (t, rho)
  const FamilyAtlas& A = *atlas;
  std::vector<std::array<double, 2>> params;
  const int ns = opts.boundary_side_samples;
  const int per = opts.boundary_per_interval;
  std::vector<double> tpath;
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (int j = 0; j < per; ++j) tpath.push_back(A.t_grid[k] + (A.t_grid[k + 1] - A.t_grid[k]) * j / per);
  tpath.push_back(A.t_max());
  std::vector<double> rs(tpath.size());
  for (std::size_t j = 0; j < tpath.size(); ++j) rs[j] = A.rho_S(tpath[j]);
  for (std::size_t j = 0; j < tpath.size(); ++j) params.push_back({tpath[j], -rs[j]});
  for (int j = 1; j <= ns; ++j) params.push_back({A.t_max(), -rs.back() + 2 * rs.back() * j / ns});
  for (std::size_t j = tpath.size() - 1; j-- > 0;) params.push_back({tpath[j], rs[j]});
  for (int j = 1; j <= ns; ++j) params.push_back({A.t_min(), rs.front() - 2 * rs.front() * j / ns});
  for (const auto& q : params) {
    const auto f = A.sample(q[0], q[1]);
    atlas->boundary.push_back({f.U, f.Uprime});
  }
  double sag = 0;
  for (std::size_t j = 0; j + 1 < params.size(); ++j) {
    const double tm = 0.5 * (params[j][0] + params[j + 1][0]);
    double rm = 0.5 * (params[j][1] + params[j + 1][1]);
    if (params[j][0] != params[j + 1][0]) rm = std::copysign(A.rho_S(tm), rm);
    const auto f = A.sample(tm, rm);
    const auto& a = atlas->boundary[j];
    const auto& b = atlas->boundary[j + 1];
    sag = std::max(sag, std::hypot(f.U - 0.5 * (a[0] + b[0]), f.Uprime - 0.5 * (a[1] + b[1])));
  }
  atlas->max_sagitta = sag;
  atlas->boundary_band = std::max(1e-8, 2 * sag);

  for (std::size_t i = 0; i < n; ++i) {
    const double rmax = A.rho_S(A.t_grid[i]);
    for (int j = 0; j <= opts.seed_samples; ++j) {
      const double rho = rmax * j / opts.seed_samples;
      const auto f = A.sample(A.t_grid[i], rho);
      atlas->seed_table.push_back({f.U, f.Uprime, A.t_grid[i], rho});
    }
  }
  return atlas;
}

// ---------------------------------------------------------------------------
// Candidates on the sphere

struct CandidateSolution {
  std::shared_ptr<const FamilyAtlas> atlas;
  Vec3 p = Vec3::UnitZ();
  double t = 0;
  double r = 0;       ///< disk radius r_t
  double rho_S = 0;   ///< radius of the extended disk
  bool allow_extension = false;
};

struct CandidateJet {
  double value = 0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();  ///< ambient matrix of the Riemannian Hessian on T_x S^2
  double rho = 0;
};

/// Candidate centred at p with parameter t.
inline CandidateSolution make_candidate(std::shared_ptr<const FamilyAtlas> atlas, const Vec3& p, double t,
                                        bool allow_extension = false)
{
  require_point(p);
  if (!(t >= atlas->t_min() && t <= atlas->t_max()))
    throw OutsideRegion("t=" + format_roundtrip(t) + " outside the atlas range", t, 0);
  CandidateSolution c{atlas, p, t, atlas->r(t), atlas->rho_S(t), allow_extension};
  return c;
}

/// v_{q,w,a}: the family member with v(q) = a and grad v(q) = w.
inline CandidateSolution candidate_at(std::shared_ptr<const FamilyAtlas> atlas, const Vec3& q, const Vec3& w, double a)
{
  require_point(q);
  require_tangent(q, w);
  const double nw = w.norm();
  if (nw == 0) {
    if (a == 0) throw DomainError("(q, 0, 0) is excluded from the parameter space");
    if (!(a >= atlas->t_min() && a <= atlas->t_max()))
      throw OutsideRegion("(a, |w|) = (" + format_roundtrip(a) + ", 0) lies outside S", a, 0);
    return make_candidate(atlas, q, a);
  }
  const auto inv = atlas->invert_F(a, -nw);
  auto c = make_candidate(atlas, exp_map(q, (inv.rho / nw) * w), inv.t);
  c.allow_extension = inv.rho > c.r + 1e-12;
  return c;
}

inline CandidateJet evaluate_candidate(const CandidateSolution& c, const Vec3& x)
{
  const double rho = distance(c.p, x);
  const double limit = c.allow_extension ? c.rho_S : c.r;
  if (rho > limit + 1e-12)
    throw OutsideRegion("point at distance " + format_roundtrip(rho) + " outside the candidate disk of radius " +
                            format_roundtrip(limit),
                        rho, limit);
  const auto f = c.atlas->sample(c.t, rho);
  CandidateJet out;
  out.rho = rho;
  out.value = f.U;
  const Mat3 P = Mat3::Identity() - x * x.transpose();
  if (rho < 1e-6) {
    // removable singularity: both eigenvalues tend to U''(0)
    out.hessian = f.Usecond * P;
    out.gradient = f.Uprime * radial_unit(c.p, x);
    return out;
  }
  const Vec3 er = radial_unit(c.p, x);
  const Vec3 et = x.cross(er);
  out.gradient = f.Uprime * er;
  out.hessian = f.Usecond * er * er.transpose() + (std::cos(rho) / std::sin(rho) * f.Uprime) * et * et.transpose();
  return out;
}

}  // namespace edl
