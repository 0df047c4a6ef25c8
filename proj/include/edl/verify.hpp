#pragma once

// Lemma suite over a t sweep: hypothesis (H), H_t > 0, W < 0, monotonicity
// of U_t and r_t in t, and log-concavity for linear f.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "edl/error.hpp"
#include "edl/nonlinearity.hpp"
#include "edl/parallel.hpp"
#include "edl/radial_ode.hpp"

namespace edl {

struct VerifyLine {
  std::string lemma;
  double t = 0;
  bool pass = false;
  double margin = 0;  ///< worst value of the checked quantity, signed so that > 0 passes
  double where = 0;   ///< rho (or x for hypothesis H) of the worst value
  std::string message;
};

struct VerifyReport {
  std::string f_label;
  std::vector<double> t;
  std::vector<VerifyLine> lines;

  bool all_pass() const
  {
    for (const auto& l : lines)
      if (!l.pass) return false;
    return true;
  }
  int failures() const
  {
    int n = 0;
    for (const auto& l : lines) n += !l.pass;
    return n;
  }
};

struct VerifyOptions {
  SolverOptions solver;
  double hypothesis_floor = 1e-3;  ///< (H) sampled on [floor * t, t]
  int hypothesis_samples = 2000;
  double monotone_slack = 1e-10;
};

namespace detail {

struct SweepItem {
  std::optional<RadialProfile> p;
  std::optional<VariationProfile> v;
  std::string error;
};

}  // namespace detail

/// Runs every lemma at every t. Solver failures become failing lines and the
/// sweep continues.
inline VerifyReport verify_lemmas(const Nonlinearity& nl, const std::vector<double>& ts, const VerifyOptions& o = {})
{
  if (ts.empty()) throw DomainError("verify needs at least one t");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0)) throw DomainError("t must be positive");
    if (i && !(ts[i] > ts[i - 1])) throw DomainError("t sweep must be strictly increasing");
  }
  const bool is_linear = nl.label.starts_with("linear:");
  std::vector<detail::SweepItem> items(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    try {
      auto p = std::make_shared<RadialProfile>(solve_profile(nl, ts[i], o.solver));
      if (!p->r_t) throw NoZeroFound(p->rho_max(), p->U.back(), p->Uprime.back());
      items[i].v = solve_variation(nl, *p);
      items[i].p = *p;
    } catch (const Error& e) {
      items[i].error = e.kind() + ": " + e.what();
    }
  });

  VerifyReport rep;
  rep.f_label = nl.label;
  rep.t = ts;
  auto add = [&](std::string lemma, double t, bool pass, double margin, double where, std::string msg = "") {
    rep.lines.push_back({std::move(lemma), t, pass, margin, where, std::move(msg)});
  };

  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    const auto h = check_hypothesis_H(nl, o.hypothesis_floor * t, t, o.hypothesis_samples);
    add("hypothesis_H", t, h.holds, h.worst_margin, h.worst_x);

    const auto& it = items[i];
    if (!it.p) {
      add("solver", t, false, NAN, NAN, it.error);
      continue;
    }
    const auto& p = *it.p;
    const auto& v = *it.v;
    const double r = *p.r_t;

    double minH = INFINITY, whereH = 0;
    for (std::size_t k = 0; k < p.rho.size() && p.rho[k] < r; ++k)
      if (v.H[k] < minH) {
        minH = v.H[k];
        whereH = p.rho[k];
      }
    add("H_positive", t, minH > 0, minH, whereH);

    const auto W = jacobian_W(p, v);
    add("W_negative", t, W.negative, -W.max_W, W.rho_at_max);

    if (r > std::numbers::pi / 2) {
      double worst = INFINITY, at = 0;
      for (std::size_t k = 0; k < p.rho.size() && p.rho[k] <= r; ++k)
        if (p.rho[k] >= std::numbers::pi / 2 && -p.Usecond[k] < worst) {
          worst = -p.Usecond[k];
          at = p.rho[k];
        }
      add("concave_past_half_pi", t, worst >= -o.monotone_slack, worst, at);
    }

    if (is_linear) {
      const auto lc = log_concavity(p);
      add("log_concavity", t, lc.max_value < 0, -lc.max_value, lc.rho_at_max);
    }

    if (i > 0 && items[i - 1].p) {
      const auto& q = *items[i - 1].p;
      const double common = std::min(r, *q.r_t);
      double worst = INFINITY, at = 0;
      for (std::size_t k = 0; k < p.rho.size() && p.rho[k] < common; ++k) {
        const double d = p.U[k] - q.eval(p.rho[k]).U;
        if (d < worst) {
          worst = d;
          at = p.rho[k];
        }
      }
      add("U_increasing_in_t", t, worst > -o.monotone_slack, worst, at);
      const double dr = r - *q.r_t;
      add("r_nondecreasing", t, dr >= -o.monotone_slack, dr, r);
    }
  }
  return rep;
}

}  // namespace edl
