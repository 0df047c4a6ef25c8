#pragma once

// The traceless form Q_x = Hess u(x) - Hess v(x), v the family member with
// the same 1-jet as u at x, its complex component P, zeroes and indices of
// the null-direction line field.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "edl/error.hpp"
#include "edl/family_map.hpp"
#include "edl/fields.hpp"
#include "edl/format.hpp"
#include "edl/parallel.hpp"
#include "edl/sphere.hpp"

namespace edl {

using cplx = std::complex<double>;

/// Trace-free symmetric form in the orthonormal frame (e1, e2) at x:
/// [[q11, q12], [q12, -q11]].
struct TracelessForm {
  Vec3 x = Vec3::UnitZ();
  Vec3 e1 = Vec3::UnitX(), e2 = Vec3::UnitY();
  double q11 = 0, q12 = 0;

  double norm() const { return std::hypot(q11, q12); }
  double operator()(const Vec3& a, const Vec3& b) const
  {
    const double a1 = a.dot(e1), a2 = a.dot(e2), b1 = b.dot(e1), b2 = b.dot(e2);
    return q11 * (a1 * b1 - a2 * b2) + q12 * (a1 * b2 + a2 * b1);
  }
};

/// P = q11 - i q12 in the form's own frame.
inline cplx hopf_component(const TracelessForm& q) { return {q.q11, -q.q12}; }

/// Same form expressed in the frame turned by +theta about x
/// (e1' = cos e1 + sin e2). P picks up e^{+2 i theta}.
inline TracelessForm rotate_frame(const TracelessForm& q, double theta)
{
  TracelessForm r = q;
  r.e1 = std::cos(theta) * q.e1 + std::sin(theta) * q.e2;
  r.e2 = -std::sin(theta) * q.e1 + std::cos(theta) * q.e2;
  r.q11 = q(r.e1, r.e1);
  r.q12 = q(r.e1, r.e2);
  return r;
}

/// The form turned by +theta about x, read in the unchanged frame.
/// P picks up e^{-2 i theta}.
inline TracelessForm rotate_form(const TracelessForm& q, double theta)
{
  auto r = rotate_frame(q, -theta);
  r.e1 = q.e1;
  r.e2 = q.e2;
  return r;
}

/// The form re-expressed in the frame (a, x cross a).
inline TracelessForm in_frame(const TracelessForm& q, const Vec3& a)
{
  return rotate_frame(q, std::atan2(a.dot(q.e2), a.dot(q.e1)));
}

/// Trace-free part of a tangential ambient matrix in the frame (e1, x cross e1).
inline TracelessForm traceless_part(const Vec3& x, const Vec3& e1, const Mat3& D, double* trace = nullptr)
{
  TracelessForm q;
  q.x = x;
  q.e1 = e1;
  q.e2 = x.cross(e1);
  const double d11 = e1.dot(D * e1), d22 = q.e2.dot(D * q.e2), d12 = 0.5 * (e1.dot(D * q.e2) + q.e2.dot(D * e1));
  q.q11 = 0.5 * (d11 - d22);
  q.q12 = d12;
  if (trace) *trace = d11 + d22;
  return q;
}

struct QPoint {
  TracelessForm form;
  double pde_residual = 0;  ///< trace of the raw difference = Laplacian(u) + f(u)
  double t = 0, rho = 0;    ///< parameters of the matched member
};

/// Q at x for the field u. Frame: e1 = grad u / |grad u| when |grad u| > 1e-10,
/// else the fixed frame at x.
inline QPoint qform_at(const std::shared_ptr<const FamilyAtlas>& atlas, const ScalarField& u, const Vec3& x)
{
  const auto ju = u.jet(x);
  CandidateSolution c;
  try {
    c = candidate_at(atlas, x, ju.gradient, ju.value);
  } catch (const OutsideRegion&) {
    throw OutsideRegion("1-jet (a, |w|) = (" + format_roundtrip(ju.value) + ", " +
                            format_roundtrip(ju.gradient.norm()) + ") leaves the family region S",
                        ju.value, ju.gradient.norm());
  }
  const auto jv = evaluate_candidate(c, x);
  const double gn = ju.gradient.norm();
  const Vec3 e1 = gn > 1e-10 ? Vec3(ju.gradient / gn) : fixed_frame(x).first;
  QPoint out;
  out.form = traceless_part(x, e1, ju.hessian - jv.hessian, &out.pde_residual);
  out.t = c.t;
  out.rho = distance(c.p, x);
  return out;
}

// ---------------------------------------------------------------------------
// Index of the null-direction line field

/// n/2 stored as n.
struct HalfInteger {
  int twice = 0;
  double value() const { return 0.5 * twice; }
  std::string str() const { return twice % 2 == 0 ? std::to_string(twice / 2) : std::to_string(twice) + "/2"; }
  bool operator==(const HalfInteger&) const = default;
};

struct IndexResult {
  HalfInteger index;
  int winding = 0;
  int samples = 0;
  double min_abs_P = 0;
  bool negative = false;  ///< false flags a violation of the expected negative index
};

/// index = -(winding of P around the circle)/2. The circle is refined until
/// no argument increment exceeds pi/2. Throws when |P| on the circle falls
/// to rel_floor * max|P| or below.
inline IndexResult null_direction_index(const std::function<cplx(cplx)>& P, cplx center, double radius,
                                        int n_samples = 720, double rel_floor = 1e-9)
{
  if (!(radius > 0) || n_samples < 8) throw DomainError("index circle needs radius > 0 and >= 8 samples");
  for (int n = n_samples; n <= n_samples * 64; n *= 2) {
    std::vector<cplx> v(static_cast<std::size_t>(n));
    double lo = INFINITY, hi = 0;
    for (int k = 0; k < n; ++k) {
      v[k] = P(center + std::polar(radius, 2 * std::numbers::pi * k / n));
      lo = std::min(lo, std::abs(v[k]));
      hi = std::max(hi, std::abs(v[k]));
    }
    if (!(lo > rel_floor * hi) || !(lo > 0))
      throw DomainError("zero not isolated at this radius: min|P| = " + format_roundtrip(lo) + ", max|P| = " +
                        format_roundtrip(hi));
    double total = 0, worst = 0;
    for (int k = 0; k < n; ++k) {
      const double d = std::arg(v[(k + 1) % n] / v[k]);
      worst = std::max(worst, std::abs(d));
      total += d;
    }
    if (worst <= std::numbers::pi / 2) {
      IndexResult r;
      r.winding = static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
      r.index.twice = -r.winding;
      r.samples = n;
      r.min_abs_P = lo;
      r.negative = r.index.twice < 0;
      return r;
    }
  }
  throw ConvergenceError("argument of P varies too fast on the index circle");
}

// ---------------------------------------------------------------------------
// Field sampling

/// Any map x -> Q_x on a disk. qform_field uses qform_at; tests inject P
/// directly.
using FormSource = std::function<QPoint(const Vec3&)>;

inline FormSource field_source(std::shared_ptr<const FamilyAtlas> atlas, std::shared_ptr<const ScalarField> u)
{
  return [atlas = std::move(atlas), u = std::move(u)](const Vec3& x) { return qform_at(atlas, *u, x); };
}

/// Source whose chart component is exactly P(z): q = P / cos^4(rho/2) in the chart frame.
inline FormSource synthetic_source(const DiskDomain& dom, std::function<cplx(cplx)> P)
{
  return [dom, P = std::move(P)](const Vec3& x) {
    const cplx z = dom.to_chart(x);
    const auto [E1, E2] = dom.chart_frame(x);
    const cplx q = P(z) / dom.chart_metric(x);
    QPoint out;
    out.form.x = x;
    out.form.e1 = E1;
    out.form.e2 = x.cross(E1);
    out.form.q11 = q.real();
    out.form.q12 = -q.imag();
    return out;
  };
}

/// Chart component P = cos^4(rho/2) (q11 - i q12) with q read in the chart frame.
inline cplx chart_P(const DiskDomain& dom, const TracelessForm& q)
{
  return dom.chart_metric(q.x) * hopf_component(in_frame(q, dom.chart_frame(q.x).first));
}

struct MeshOptions {
  int n_rho = 128;
  int n_theta = 256;
  double zero_rel = 1e-9;        ///< node zero candidates: |Q| < zero_rel * max|Q|
  double identically_zero = 1e-7;
  int confirm_cells = 4;         ///< index circle radius in mesh cells
  int index_samples = 720;
};

struct QNode {
  int i = 0, j = 0;
  double rho = 0, theta = 0;
  Vec3 x = Vec3::UnitZ();
  TracelessForm form;
  double abs_Q = 0;
  double pde_residual = 0;
  cplx P{};  ///< chart component
};

struct QZero {
  cplx z{};
  Vec3 x = Vec3::UnitZ();
  double rho = 0, theta = 0;
  double abs_P = 0;
  double circle_radius = 0;  ///< chart radius of the confirming circle
  std::optional<IndexResult> index;
  std::string note;
};

struct QFieldReport {
  std::string label;
  DiskDomain domain;
  MeshOptions mesh;
  std::vector<QNode> nodes;  ///< ring-major: index i * n_theta + j
  double max_abs_Q = 0;
  double max_abs_residual = 0;
  bool identically_zero = false;
  std::vector<QZero> zeros;

  const QNode& node(int i, int j) const { return nodes[static_cast<std::size_t>(i) * mesh.n_theta + j]; }
  bool all_indices_negative() const
  {
    for (const auto& z : zeros)
      if (!z.index || !z.index->negative) return false;
    return true;
  }
};

namespace detail {

inline int cell_winding(const std::array<cplx, 4>& c)
{
  double total = 0;
  for (int k = 0; k < 4; ++k) total += std::arg(c[(k + 1) % 4] / c[k]);
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

// Newton on P(X, Y) = 0 in the chart with a finite-difference Jacobian.
inline std::optional<cplx> refine_zero(const std::function<cplx(cplx)>& P, cplx z, double h, double zmax,
                                       double tol)
{
  for (int it = 0; it < 30; ++it) {
    const cplx p = P(z);
    if (std::abs(p) <= tol) return z;
    const cplx px = (P(z + h) - P(z - h)) / (2 * h);
    const cplx py = (P(z + cplx(0, h)) - P(z - cplx(0, h))) / (2 * h);
    const double a = px.real(), b = py.real(), c = px.imag(), d = py.imag();
    const double det = a * d - b * c;
    if (det == 0 || !std::isfinite(det)) return std::nullopt;
    const double dx = (d * p.real() - b * p.imag()) / det, dy = (-c * p.real() + a * p.imag()) / det;
    const cplx step(dx, dy);
    z -= step;
    if (std::abs(z) > zmax) return std::nullopt;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) return z;
  }
  return std::nullopt;
}

}  // namespace detail

/// Samples Q on a geodesic polar mesh of the domain, then locates zeroes and
/// their indices.
inline QFieldReport qform_field(const FormSource& source, const DiskDomain& dom, const MeshOptions& mesh = {},
                                std::string label = "")
{
  if (mesh.n_rho < 3 || mesh.n_theta < 8) throw DomainError("mesh needs n_rho >= 3 and n_theta >= 8");
  QFieldReport rep;
  rep.label = std::move(label);
  rep.domain = dom;
  rep.mesh = mesh;
  const int nr = mesh.n_rho, nt = mesh.n_theta;
  rep.nodes.resize(static_cast<std::size_t>(nr) * nt);
  const double dr = dom.radius / (nr - 1);

  parallel_for(static_cast<std::size_t>(nr), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    std::optional<QPoint> centre;
    for (int j = 0; j < nt; ++j) {
      QNode& n = rep.nodes[ii * nt + j];
      n.i = i;
      n.j = j;
      n.rho = i == nr - 1 ? dom.radius : dr * i;
      n.theta = 2 * std::numbers::pi * j / nt;
      n.x = dom.point(n.rho, n.theta);
      QPoint q;
      if (i == 0) {
        if (!centre) centre = source(dom.center);
        q = *centre;
        n.x = dom.center;
      } else {
        q = source(n.x);
      }
      n.form = q.form;
      n.abs_Q = q.form.norm();
      n.pde_residual = q.pde_residual;
      n.P = chart_P(dom, q.form);
    }
  });
  for (const auto& n : rep.nodes) {
    rep.max_abs_Q = std::max(rep.max_abs_Q, n.abs_Q);
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(n.pde_residual));
  }
  rep.identically_zero = rep.max_abs_Q <= mesh.identically_zero;
  if (rep.identically_zero) return rep;

  auto P = [&](cplx z) {
    const Vec3 x = dom.from_chart(z);
    return chart_P(dom, source(x).form);
  };
  double maxP = 0;
  for (const auto& n : rep.nodes) maxP = std::max(maxP, std::abs(n.P));

  // candidates: tiny local minima of |Q| at nodes, and cells around which P winds
  std::vector<cplx> cand;
  auto at = [&](int i, int j) -> const QNode& { return rep.node(i, ((j % nt) + nt) % nt); };
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < (i == 0 ? 1 : nt); ++j) {
      const auto& n = at(i, j);
      if (!(n.abs_Q < mesh.zero_rel * rep.max_abs_Q)) continue;
      bool minimum = true;
      for (int di = -1; di <= 1 && minimum; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int k = i + di;
          if (k < 0 || k >= nr || (di == 0 && dj == 0)) continue;
          if (at(k, j + dj).abs_Q < n.abs_Q) minimum = false;
        }
      if (minimum) cand.push_back(dom.to_chart(n.x));
    }
  }
  for (int i = 0; i + 1 < nr; ++i)
    for (int j = 0; j < nt; ++j) {
      std::array<cplx, 4> c{at(i, j).P, at(i + 1, j).P, at(i + 1, j + 1).P, at(i, j + 1).P};
      bool ok = true;
      for (const auto& v : c) ok = ok && std::abs(v) > 0;
      if (i == 0) c[3] = c[0];
      if (!ok || detail::cell_winding(c) == 0) continue;
      const double rm = dr * (i + 0.5), tm = 2 * std::numbers::pi * (j + 0.5) / nt;
      cand.push_back(std::polar(2 * std::tan(rm / 2), tm));
    }

  const double zR = dom.chart_radius();
  const double cell = 2 * std::tan(dr / 2);
  std::vector<cplx> found;
  for (const auto& z0 : cand) {
    auto z = detail::refine_zero(P, z0, 1e-3 * cell, zR, 1e-12 * maxP);
    cplx zz = z ? *z : z0;
    if (std::abs(zz - z0) > 2 * cell) zz = z0;
    bool dup = false;
    for (const auto& f : found)
      if (std::abs(f - zz) < mesh.confirm_cells * cell) dup = true;
    if (!dup) found.push_back(zz);
  }
  std::sort(found.begin(), found.end(), [](cplx a, cplx b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : std::arg(a) < std::arg(b);
  });

  for (const auto& z : found) {
    QZero q;
    q.z = z;
    q.x = dom.from_chart(z);
    std::tie(q.rho, q.theta) = dom.polar(q.x);
    q.abs_P = std::abs(P(z));
    double rad = mesh.confirm_cells * cell;
    const double room = zR - std::abs(z);
    if (room < rad) {
      rad = 0.9 * room;
      q.note = "near boundary";
    }
    q.circle_radius = rad;
    if (rad > 1e-3 * cell) {
      try {
        q.index = null_direction_index(P, z, rad, mesh.index_samples);
      } catch (const Error& e) {
        q.note = e.what();
      }
    } else {
      q.note = "on boundary";
    }
    rep.zeros.push_back(q);
  }
  return rep;
}

inline QFieldReport qform_field(std::shared_ptr<const FamilyAtlas> atlas, std::shared_ptr<const ScalarField> u,
                                const MeshOptions& mesh = {})
{
  const DiskDomain dom = u->domain();
  auto label = u->label();
  return qform_field(field_source(std::move(atlas), std::move(u)), dom, mesh, label);
}

/// max |Q(tau, eta)| along the boundary circle, tau tangent and eta the
/// outward normal.
inline double boundary_line_check(const std::shared_ptr<const FamilyAtlas>& atlas, const ScalarField& u,
                                  int n_samples = 256)
{
  const auto& dom = u.domain();
  double worst = 0;
  for (int k = 0; k < n_samples; ++k) {
    const double th = 2 * std::numbers::pi * k / n_samples;
    const Vec3 x = dom.boundary_point(th);
    const auto [eta, tau] = dom.polar_frame(dom.radius, th);
    worst = std::max(worst, std::abs(qform_at(atlas, u, x).form(tau, eta)));
  }
  return worst;
}

struct SimilarityReport {
  int testable_nodes = 0;
  double max_ratio = 0;       ///< max |dP/dzbar| / |P| at spacing h
  double max_ratio_half = 0;  ///< same at h/2
  double spacing = 0;
  bool resolved = true;       ///< the two spacings agree within 10%
  std::string note;
};

/// Finite-difference check of |dP/dzbar| <= C |P| on a Cartesian chart patch
/// inside 0.8 of the chart radius.
inline SimilarityReport similarity_check(const FormSource& source, const DiskDomain& dom, int n = 40,
                                         double rel_keep = 1e-2, double abs_floor = 1e-9, double fd_floor = 1e-5)
{
  auto P = [&](cplx z) { return chart_P(dom, source(dom.from_chart(z)).form); };
  const double L = 0.8 * dom.chart_radius() / std::sqrt(2.0);
  auto run = [&](double h, int& kept) {
    const int m = static_cast<int>(std::lround(2 * L / h));
    std::vector<cplx> vals(static_cast<std::size_t>((m + 1) * (m + 1)));
    std::vector<cplx> grid(vals.size());
    for (int a = 0; a <= m; ++a)
      for (int b = 0; b <= m; ++b) {
        grid[a * (m + 1) + b] = cplx(-L + a * h, -L + b * h);
        vals[a * (m + 1) + b] = P(grid[a * (m + 1) + b]);
      }
    double maxP = 0;
    for (const auto& v : vals) maxP = std::max(maxP, std::abs(v));
    const double keep = std::max(abs_floor, rel_keep * maxP);
    double worst = 0;
    kept = 0;
    auto V = [&](int a, int b) { return vals[a * (m + 1) + b]; };
    for (int a = 2; a + 2 <= m; ++a)
      for (int b = 2; b + 2 <= m; ++b) {
        const cplx v = V(a, b);
        if (!(std::abs(v) > keep)) continue;
        const cplx px = (-V(a + 2, b) + 8. * V(a + 1, b) - 8. * V(a - 1, b) + V(a - 2, b)) / (12 * h);
        const cplx py = (-V(a, b + 2) + 8. * V(a, b + 1) - 8. * V(a, b - 1) + V(a, b - 2)) / (12 * h);
        const cplx dbar = 0.5 * (px + cplx(0, 1) * py);
        worst = std::max(worst, std::abs(dbar) / std::abs(v));
        ++kept;
      }
    return worst;
  };
  SimilarityReport rep;
  rep.spacing = 2 * L / n;
  int kept_half = 0;
  rep.max_ratio = run(rep.spacing, rep.testable_nodes);
  rep.max_ratio_half = run(0.5 * rep.spacing, kept_half);
  if (rep.testable_nodes == 0) {
    rep.note = "no testable nodes";
    return rep;
  }
  // differences below fd_floor are finite-difference noise
  rep.resolved = std::abs(rep.max_ratio - rep.max_ratio_half) <= 0.1 * std::max(rep.max_ratio, rep.max_ratio_half) + fd_floor;
  if (!rep.resolved) rep.note = "patch too coarse: ratio changes under halving";
  return rep;
}

inline SimilarityReport similarity_check(std::shared_ptr<const FamilyAtlas> atlas,
                                         std::shared_ptr<const ScalarField> u, int n = 40)
{
  const DiskDomain dom = u->domain();
  return similarity_check(field_source(std::move(atlas), std::move(u)), dom, n);
}

}  // namespace edl
