#pragma once

// Scalar fields on geodesic disks: family members, and members plus a
// perturbation. Every field returns its value, Riemannian gradient and
// Hessian (as ambient 3x3 matrices acting on the tangent plane).

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "edl/dopri5.hpp"
#include "edl/family_map.hpp"
#include "edl/hermite.hpp"
#include "edl/sphere.hpp"

namespace edl {

struct FieldJet {
  double value = 0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();
};

/// Geodesic disk with polar coordinates (rho, theta) about its centre and the
/// conformal chart z = 2 tan(rho/2) e^{i theta}.
struct DiskDomain {
  Vec3 center = Vec3::UnitZ();
  double radius = 1;
  Vec3 f1 = Vec3::UnitX(), f2 = Vec3::UnitY();

  DiskDomain() = default;
  DiskDomain(const Vec3& c, double r) : center(c), radius(r)
  {
    require_point(c);
    if (!(r > 0 && r < std::numbers::pi)) throw DomainError("disk radius must lie in (0, pi)");
    std::tie(f1, f2) = fixed_frame(c);
  }

  Vec3 point(double rho, double theta) const
  {
    return exp_map(center, rho * (std::cos(theta) * f1 + std::sin(theta) * f2));
  }
  Vec3 boundary_point(double theta) const { return point(radius, theta); }
  bool contains(const Vec3& x, double slack = 1e-12) const { return distance(center, x) <= radius + slack; }

  /// (rho, theta) of x; theta = 0 at the centre.
  std::pair<double, double> polar(const Vec3& x) const
  {
    const double rho = distance(center, x);
    const Vec3 d = tangent_part(center, x);
    const double th = d.norm() == 0 ? 0.0 : std::atan2(d.dot(f2), d.dot(f1));
    return {rho, th};
  }

  /// Unit radial and angular vectors at (rho, theta), smooth through rho = 0.
  std::pair<Vec3, Vec3> polar_frame(double rho, double theta) const
  {
    const Vec3 u = std::cos(theta) * f1 + std::sin(theta) * f2;
    const Vec3 v = -std::sin(theta) * f1 + std::cos(theta) * f2;
    return {std::cos(rho) * u - std::sin(rho) * center, v};
  }

  double chart_radius() const { return 2 * std::tan(radius / 2); }
  std::complex<double> to_chart(const Vec3& x) const
  {
    auto [rho, th] = polar(x);
    return std::polar(2 * std::tan(rho / 2), th);
  }
  Vec3 from_chart(std::complex<double> z) const
  {
    const double m = std::abs(z);
    return point(2 * std::atan(m / 2), m == 0 ? 0.0 : std::arg(z));
  }
  /// Orthonormal frame along the chart axes d/dX, d/dY at x.
  std::pair<Vec3, Vec3> chart_frame(const Vec3& x) const
  {
    auto [rho, th] = polar(x);
    auto [er, et] = polar_frame(rho, th);
    return {std::cos(th) * er - std::sin(th) * et, std::sin(th) * er + std::cos(th) * et};
  }
  /// Metric factor: g = cos^4(rho/2) |dz|^2.
  double chart_metric(const Vec3& x) const
  {
    const double c = std::cos(distance(center, x) / 2);
    return c * c * c * c;
  }
};

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual FieldJet jet(const Vec3& x) const = 0;
  virtual const DiskDomain& domain() const = 0;
  virtual std::string label() const = 0;
};

/// A family member on its own disk.
class CandidateField : public ScalarField {
 public:
  explicit CandidateField(CandidateSolution c) : c_(std::move(c)), dom_(c_.p, c_.r) { c_.allow_extension = true; }

  FieldJet jet(const Vec3& x) const override
  {
    const auto j = evaluate_candidate(c_, x);
    return {j.value, j.gradient, j.hessian};
  }
  const DiskDomain& domain() const override { return dom_; }
  std::string label() const override { return "member"; }
  const CandidateSolution& candidate() const { return c_; }

 private:
  CandidateSolution c_;
  DiskDomain dom_;
};

/// A perturbation added to a field.
class Bump {
 public:
  virtual ~Bump() = default;
  virtual FieldJet jet(const Vec3& x, const FieldJet& base) const = 0;
  virtual std::string label() const = 0;
};

/// phi = sin^m(rho) g(rho) cos(m (theta - phase)) about the member's centre,
/// with g chosen so that phi solves the equation linearised at the member:
///   g'' + (2m+1) cot(rho) g' + (f'(U) - m(m+1)) g = 0,  g(0) = 1.
/// Scaled so that max |phi| on the disk is 1.
class ModeBump : public Bump {
 public:
  ModeBump(const CandidateSolution& c, int m, double phase, int samples = 4096)
      : c_(c), dom_(c.p, c.r), m_(m), phase_(phase)
  {
    if (m < 2) throw DomainError("mode bump needs m >= 2");
    const auto& nl = c.atlas->nl;
    const double mu = m * (m + 1.0), k = 2.0 * m + 1;
    auto fp = [&](double r) { return nl.fprime(c.atlas->sample(c.t, r).U); };
    const double c0 = fp(0), dr = 1e-2;
    const double c2 = (fp(dr) - c0) / (dr * dr);
    const double g2 = -(c0 - mu) / (2 * (k + 1));
    const double g4 = (2 * k * g2 / 3 - (c0 - mu) * g2 - c2) / (12 + 4 * k);
    const double r0 = 1e-3;
    end_ = std::min(c.rho_S, c.atlas->rho_ext);
    using Stepper = Dopri5<2>;
    auto rhs = [&](double r, const Stepper::State& y) {
      return Stepper::State{y[1], -k * std::cos(r) / std::sin(r) * y[1] - (fp(r) - mu) * y[0]};
    };
    Stepper rk(rhs, r0, {1 + g2 * r0 * r0 + g4 * std::pow(r0, 4), 2 * g2 * r0 + 4 * g4 * std::pow(r0, 3)}, {});
    std::vector<double> sr{rk.x()}, sg{rk.y()[0]}, sd{rk.y()[1]}, s2{rk.dy()[1]};
    while (rk.x() < end_) {
      rk.step(end_);
      sr.push_back(rk.x());
      sg.push_back(rk.y()[0]);
      sd.push_back(rk.y()[1]);
      s2.push_back(rk.dy()[1]);
    }
    h_ = end_ / (samples - 1);
    g_.resize(samples);
    gp_.resize(samples);
    gpp_.resize(samples);
    std::size_t j = 0;
    for (int i = 0; i < samples; ++i) {
      const double r = i == samples - 1 ? end_ : h_ * i;
      if (r <= r0) {
        g_[i] = 1 + g2 * r * r + g4 * r * r * r * r;
        gp_[i] = 2 * g2 * r + 4 * g4 * r * r * r;
        gpp_[i] = 2 * g2 + 12 * g4 * r * r;
        continue;
      }
      while (j + 2 < sr.size() && sr[j + 1] < r) ++j;
      const double hh = sr[j + 1] - sr[j], s = std::clamp((r - sr[j]) / hh, 0.0, 1.0);
      g_[i] = detail::hermite(s, hh, sg[j], sd[j], sg[j + 1], sd[j + 1]);
      gp_[i] = detail::hermite(s, hh, sd[j], s2[j], sd[j + 1], s2[j + 1]);
      gpp_[i] = -k * std::cos(r) / std::sin(r) * gp_[i] - (fp(r) - mu) * g_[i];
    }
    scale_ = 1;
    double mx = 0;
    for (int i = 0; i < samples && h_ * i <= c.r; ++i) mx = std::max(mx, std::abs(std::pow(std::sin(h_ * i), m) * g_[i]));
    scale_ = 1 / mx;
  }

  FieldJet jet(const Vec3& x, const FieldJet&) const override
  {
    auto [rho, th] = dom_.polar(x);
    FieldJet out;
    if (rho < 1e-12) return out;
    if (rho > end_ + 1e-12) throw OutsideRegion("mode bump evaluated outside its range", rho, end_);
    const std::size_t n = g_.size();
    const std::size_t i = std::min(static_cast<std::size_t>(rho / h_), n - 2);
    const double s = std::clamp((rho - h_ * i) / h_, 0.0, 1.0);
    const double g = detail::hermite(s, h_, g_[i], gp_[i], g_[i + 1], gp_[i + 1]);
    const double gp = detail::hermite(s, h_, gp_[i], gpp_[i], gp_[i + 1], gpp_[i + 1]);
    double gpp = detail::hermite_slope(s, h_, gp_[i], gpp_[i], gp_[i + 1], gpp_[i + 1]);
    if (rho > 1e-4) {
      const double fp = c_.atlas->nl.fprime(c_.atlas->sample(c_.t, rho).U);
      gpp = -(2 * m_ + 1) * std::cos(rho) / std::sin(rho) * gp - (fp - m_ * (m_ + 1.0)) * g;
    }
    const double sn = std::sin(rho), cs = std::cos(rho), m = m_;
    const double C = std::cos(m * (th - phase_)), S = std::sin(m * (th - phase_));
    const double sm2 = std::pow(sn, m - 2);
    const double R = sm2 * sn * sn * g;
    const double Rp = sm2 * sn * (m * cs * g + sn * gp);
    const double hrr = sm2 * (m * (m - 1) * cs * cs * g - m * sn * sn * g + 2 * m * sn * cs * gp + sn * sn * gpp) * C;
    const double htt = sm2 * (m * cs * cs * g + sn * cs * gp - m * m * g) * C;
    const double hrt = -m * sm2 * ((m - 1) * cs * g + sn * gp) * S;
    auto [er, et] = dom_.polar_frame(rho, th);
    out.value = scale_ * R * C;
    out.gradient = scale_ * (Rp * C * er - m * sm2 * sn * g * S * et);
    out.hessian = scale_ * (hrr * er * er.transpose() + htt * et * et.transpose() +
                            hrt * (er * et.transpose() + et * er.transpose()));
    return out;
  }
  std::string label() const override { return "mode:" + std::to_string(m_); }
  int m() const { return m_; }

 private:
  CandidateSolution c_;
  DiskDomain dom_;
  int m_;
  double phase_;
  double end_ = 0, h_ = 0, scale_ = 1;
  std::vector<double> g_, gp_, gpp_;
};

/// base^k * <x, e>. With k = 2 the Dirichlet and Neumann data of the base
/// are preserved on its zero set; k = 1 keeps u = 0 there but makes the
/// Neumann data vary.
class ProductBump : public Bump {
 public:
  ProductBump(int k, const Vec3& e) : k_(k), e_(e)
  {
    if (k < 1) throw DomainError("product bump needs k >= 1");
  }

  FieldJet jet(const Vec3& x, const FieldJet& b) const override
  {
    const double psi = x.dot(e_);
    const Vec3 dpsi = e_ - psi * x;
    const Mat3 P = Mat3::Identity() - x * x.transpose();
    const Mat3 hpsi = -psi * P;
    const double v = b.value, k = k_;
    const double vk = std::pow(v, k), vk1 = k_ >= 1 ? std::pow(v, k - 1) : 0.0;
    const double vk2 = k_ >= 2 ? std::pow(v, k - 2) : 0.0;
    FieldJet out;
    out.value = vk * psi;
    out.gradient = k * vk1 * psi * b.gradient + vk * dpsi;
    out.hessian = k * (k - 1) * vk2 * psi * b.gradient * b.gradient.transpose() +
                  k * vk1 * (b.gradient * dpsi.transpose() + dpsi * b.gradient.transpose()) +
                  k * vk1 * psi * b.hessian + vk * hpsi;
    return out;
  }
  std::string label() const override { return "product:" + std::to_string(k_); }

 private:
  int k_;
  Vec3 e_;
};

/// base + eps * bump on the base's domain.
class PerturbedField : public ScalarField {
 public:
  PerturbedField(std::shared_ptr<const ScalarField> base, std::shared_ptr<const Bump> bump, double eps)
      : base_(std::move(base)), bump_(std::move(bump)), eps_(eps)
  {
  }

  FieldJet jet(const Vec3& x) const override
  {
    const auto b = base_->jet(x);
    const auto p = bump_->jet(x, b);
    return {b.value + eps_ * p.value, b.gradient + eps_ * p.gradient, b.hessian + eps_ * p.hessian};
  }
  const DiskDomain& domain() const override { return base_->domain(); }
  std::string label() const override { return base_->label() + "+" + format_roundtrip(eps_) + "*" + bump_->label(); }
  double eps() const { return eps_; }

 private:
  std::shared_ptr<const ScalarField> base_;
  std::shared_ptr<const Bump> bump_;
  double eps_;
};

}  // namespace edl
