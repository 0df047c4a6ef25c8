#pragma once

// Unit sphere as a subset of R^3. Points are unit vectors, tangent vectors at
// q are 3-vectors orthogonal to q.

#include <Eigen/Dense>
#include <cmath>

#include "edl/error.hpp"
#include "edl/format.hpp"

namespace edl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline void require_point(const Vec3& q, double tol = 1e-12)
{
  if (!(std::abs(q.norm() - 1.0) <= tol)) throw DomainError("not a unit vector: |q|=" + format_roundtrip(q.norm()));
}

inline void require_tangent(const Vec3& q, const Vec3& w, double tol = 1e-12)
{
  if (!(std::abs(q.dot(w)) <= tol * std::max(1.0, w.norm())))
    throw DomainError("vector is not tangent: <q,w>=" + format_roundtrip(q.dot(w)));
}

/// Projection of v onto the tangent plane at q.
inline Vec3 tangent_part(const Vec3& q, const Vec3& v) { return v - q.dot(v) * q; }

/// exp_q(v) = cos|v| q + sin|v| v/|v|.
inline Vec3 exp_map(const Vec3& q, const Vec3& v)
{
  const double n = v.norm();
  if (n == 0) return q;
  Vec3 x = std::cos(n) * q + (std::sin(n) / n) * v;
  return x / x.norm();
}

/// Geodesic distance, accurate for nearby and nearly antipodal points.
inline double distance(const Vec3& p, const Vec3& x) { return std::atan2(p.cross(x).norm(), p.dot(x)); }

/// Inverse of exp_p away from the antipode.
inline Vec3 log_map(const Vec3& p, const Vec3& x)
{
  const Vec3 d = tangent_part(p, x);
  const double n = d.norm();
  if (n == 0) return Vec3::Zero();
  return distance(p, x) / n * d;
}

/// Unit vector at x pointing away from p along the geodesic; zero at x = p.
inline Vec3 radial_unit(const Vec3& p, const Vec3& x)
{
  Vec3 d = p.dot(x) * x - p;
  const double n = d.norm();
  return n == 0 ? Vec3::Zero() : Vec3(d / n);
}

/// A fixed orthonormal tangent frame at q (e1, e2 = q x e1).
inline std::pair<Vec3, Vec3> fixed_frame(const Vec3& q)
{
  Vec3 a = std::abs(q.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  Vec3 e1 = tangent_part(q, a).normalized();
  return {e1, q.cross(e1)};
}

/// Rotates v by angle about the unit axis (right-handed).
inline Vec3 rotate(const Vec3& axis, double angle, const Vec3& v)
{
  return Eigen::AngleAxisd(angle, axis) * v;
}

}  // namespace edl
