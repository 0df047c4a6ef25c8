// One PASS/FAIL line per acceptance criterion, with the measured quantities
// and wall time. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "edl/edl.hpp"

using namespace edl;

namespace {

constexpr double pi = std::numbers::pi;
int failures = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) { return format_significant(v, 3); }

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body)
{
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string detail = o.detail;
  if (budget_s > 0) {
    detail += "; time " + format_significant(dt, 3) + " s (budget " + format_significant(budget_s, 3) + " s)";
    if (dt >= budget_s) o.pass = false;
  } else {
    detail += "; time " + format_significant(dt, 3) + " s";
  }
  failures += !o.pass;
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
}

Outcome hemisphere_anchor()
{
  const auto p = solve_profile(linear(2), 1.0);
  double err = 0;
  for (std::size_t i = 0; i < p.rho.size() && p.rho[i] <= pi / 2; ++i)
    err = std::max(err, std::abs(p.U[i] - std::cos(p.rho[i])));
  for (int k = 0; k <= 1000; ++k) {
    const double r = pi / 2 * k / 1000;
    err = std::max(err, std::abs(p.eval(r).U - std::cos(r)));
  }
  const double dr = std::abs(*p.r_t - pi / 2), da = std::abs(*p.slope_at_zero + 1);
  return {err <= 1e-8 && dr <= 1e-8 && da <= 1e-6,
          "sup|U-cos| " + fmt(err) + ", |r_t-pi/2| " + fmt(dr) + ", |alpha+1| " + fmt(da)};
}

Outcome eigen_roundtrip()
{
  double worst = 0;
  for (double l : {0.5, 1.0, 2.0, 5.0, 20.0}) {
    const double R = radius_for_lambda(l).R;
    worst = std::max(worst, std::abs(lambda_for_radius(R).lambda - l) / l);
  }
  const auto ls = log_grid(0.5, 50, 20);
  std::vector<double> R(ls.size());
  parallel_for(ls.size(), [&](std::size_t i) { R[i] = radius_for_lambda(ls[i]).R; });
  bool decreasing = true;
  double min_gap = INFINITY;
  for (std::size_t i = 1; i < R.size(); ++i) {
    decreasing = decreasing && R[i] < R[i - 1];
    min_gap = std::min(min_gap, R[i - 1] - R[i]);
  }
  return {worst <= 1e-7 && decreasing,
          "max rel roundtrip error " + fmt(worst) + ", R strictly decreasing on 20-point sweep (min step " +
              fmt(min_gap) + ")"};
}

Outcome lemma_suite()
{
  struct Case {
    Nonlinearity nl;
    double lo, hi;
  };
  const Case cases[] = {{linear(1), 0.25, 4}, {linear(2), 0.25, 4}, {allen_cahn(), 0.05, 0.95}, {serrin(), 0.25, 4}};
  int lines = 0, bad = 0;
  std::string first_bad;
  for (const auto& c : cases) {
    const auto rep = verify_lemmas(c.nl, log_grid(c.lo, c.hi, 16));
    lines += static_cast<int>(rep.lines.size());
    for (const auto& l : rep.lines)
      if (!l.pass) {
        if (!bad) first_bad = c.nl.label + " " + verify_line_text(l);
        ++bad;
      }
  }
  return {bad == 0, std::to_string(lines) + " checks over 4 nonlinearities x 16 t, " + std::to_string(bad) +
                        " failures" + (bad ? " (first: " + first_bad + ")" : "")};
}

Outcome family_inversion()
{
  const auto atlas = build_atlas(allen_cahn(), 0.1, 0.9, 24);
  const auto& a = *atlas;
  double worst = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double t = a.t_min() * std::pow(a.t_max() / a.t_min(), (i + 0.5) / 20);
      const double rho = a.r(t) * (-1 + (2.0 * j + 1) / 20);
      const auto f = a.forward_F(t, rho);
      const auto inv = a.invert_F(f[0], f[1]);
      worst = std::max({worst, std::abs(inv.t - t), std::abs(inv.rho - rho)});
    }
  double slope_err = 0;
  for (double x : {0.15, 0.3, 0.5, 0.7, 0.85})
    for (double y : {1e-4, -1e-4}) {
      const double expected = -2 / a.nl.f(x);
      const double R = a.invert_F(x, y).rho;
      const double slope = R / y;
      slope_err = std::max(slope_err, std::abs(slope - expected) / std::abs(expected));
    }
  return {worst <= 1e-9 && slope_err <= 0.01,
          "max roundtrip error " + fmt(worst) + " on 400 points, max rel slope error " + fmt(slope_err) +
              " at |y| = 1e-4"};
}

Outcome candidate_self_consistency()
{
  const auto atlas = build_atlas(allen_cahn(), 0.1, 0.9, 24);
  const Vec3 q0 = Vec3(0.1, 0.5, -0.8).normalized();
  auto [e1, e2] = fixed_frame(q0);
  const auto v0 = candidate_at(atlas, q0, -0.2 * e1 + 0.1 * e2, 0.45);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  auto [f1, f2] = fixed_frame(v0.p);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const double rho = v0.r * std::sqrt(u(rng)) * 0.98, th = 2 * pi * u(rng);
    const Vec3 x = exp_map(v0.p, rho * (std::cos(th) * f1 + std::sin(th) * f2));
    const auto jet = evaluate_candidate(v0, x);
    const auto c = candidate_at(atlas, x, jet.gradient, jet.value);
    worst = std::max({worst, (c.p - v0.p).norm(), std::abs(c.t - v0.t)});
  }
  return {worst <= 1e-7, "max |dp|, |dt| over 50 interior points " + fmt(worst)};
}

Outcome q_vanishing()
{
  const auto atlas = build_atlas(linear(2), 0.5, 2.0, 24);
  auto member = std::make_shared<CandidateField>(make_candidate(atlas, Vec3::UnitZ(), 1.0));
  const auto rep = qform_field(atlas, member, MeshOptions{});
  return {rep.max_abs_Q <= 1e-7 && rep.max_abs_residual <= 1e-7 && rep.nodes.size() == 128u * 256u,
          "max|Q| " + fmt(rep.max_abs_Q) + ", max|pde_residual| " + fmt(rep.max_abs_residual) + " on 128x256"};
}

Outcome index_engine()
{
  bool ok = true;
  std::string detail = "z^k:";
  for (int k = 1; k <= 4; ++k) {
    const auto r = null_direction_index([k](cplx z) { return std::pow(z, k); }, 0.0, 1.0);
    ok = ok && r.index.twice == -k && r.negative;
    detail += " " + r.index.str();
  }
  const cplx a(0.3, 0.1), b(-0.25, -0.2);
  auto P = [&](cplx z) { return (z - a) * (z - b); };
  const int ia = null_direction_index(P, a, 0.1).index.twice, ib = null_direction_index(P, b, 0.1).index.twice;
  const int big = null_direction_index(P, 0.0, 0.9).index.twice;
  ok = ok && ia + ib == big && big == -2;
  detail += "; two zeroes " + HalfInteger{ia}.str() + " + " + HalfInteger{ib}.str() + " = " + HalfInteger{big}.str();
  const auto zb = null_direction_index([](cplx z) { return std::conj(z); }, 0.0, 1.0);
  ok = ok && zb.index.twice == 1 && !zb.negative;
  detail += "; zbar " + zb.index.str() + (zb.negative ? "" : " flagged");
  return {ok, detail};
}

Outcome perturbation()
{
  const auto atlas = build_atlas(linear(1), 0.5, 2.0, 24);
  const auto c = make_candidate(atlas, Vec3::UnitZ(), 1.0);
  auto member = std::make_shared<CandidateField>(c);
  auto bump = std::make_shared<ModeBump>(c, 3, 0.3);
  double ratio[2];
  bool ok = true;
  std::string zeros;
  int k = 0;
  for (double eps : {1e-2, 5e-3}) {
    auto u = std::make_shared<PerturbedField>(member, bump, eps);
    const auto rep = qform_field(atlas, u, MeshOptions{});
    ratio[k++] = rep.max_abs_Q / eps;
    ok = ok && !rep.identically_zero && !rep.zeros.empty() && rep.zeros.size() <= 16 && rep.all_indices_negative();
    zeros += (zeros.empty() ? "" : ", ") + std::to_string(rep.zeros.size()) + " zero(s) [";
    for (std::size_t i = 0; i < rep.zeros.size(); ++i)
      zeros += (i ? " " : "") + (rep.zeros[i].index ? rep.zeros[i].index->index.str() : std::string("?"));
    zeros += "]";
  }
  const double rel = std::abs(ratio[0] - ratio[1]) / std::max(ratio[0], ratio[1]);
  ok = ok && rel <= 0.1;
  return {ok, "max|Q|/eps " + fmt(ratio[0]) + " vs " + fmt(ratio[1]) + " (rel diff " + fmt(rel) + "); " + zeros};
}

Outcome candidate_derivatives()
{
  const auto atlas = build_atlas(allen_cahn(), 0.1, 0.9, 24);
  const auto c = make_candidate(atlas, Vec3(1, 1, 1).normalized(), 0.57);
  auto [f1, f2] = fixed_frame(c.p);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  const double h = 1e-4;
  double gerr = 0, herr = 0;
  for (int i = 0; i < 100; ++i) {
    const double rho = (c.r - 2 * h) * std::sqrt(0.0004 + 0.9996 * u(rng)), th = 2 * pi * u(rng);
    const Vec3 x = exp_map(c.p, rho * (std::cos(th) * f1 + std::sin(th) * f2));
    const auto jet = evaluate_candidate(c, x);
    auto [g1, g2] = fixed_frame(x);
    auto along = [&](const Vec3& e) {
      const double vp = evaluate_candidate(c, exp_map(x, h * e)).value;
      const double vm = evaluate_candidate(c, exp_map(x, -h * e)).value;
      return std::pair{(vp - vm) / (2 * h), (vp - 2 * jet.value + vm) / (h * h)};
    };
    const auto [d1, s1] = along(g1);
    const auto [d2, s2] = along(g2);
    const auto [dd, sd] = along((g1 + g2).normalized());
    const double fd12 = sd - 0.5 * (s1 + s2);
    const double a11 = g1.dot(jet.hessian * g1), a22 = g2.dot(jet.hessian * g2), a12 = g1.dot(jet.hessian * g2);
    const double gn = std::hypot(jet.gradient.dot(g1), jet.gradient.dot(g2));
    const double hn = std::sqrt(a11 * a11 + a22 * a22 + 2 * a12 * a12);
    gerr = std::max(gerr, std::hypot(d1 - jet.gradient.dot(g1), d2 - jet.gradient.dot(g2)) / gn);
    herr = std::max(herr, std::sqrt(std::pow(s1 - a11, 2) + std::pow(s2 - a22, 2) + 2 * std::pow(fd12 - a12, 2)) / hn);
    (void)dd;
  }
  return {gerr <= 1e-5 && herr <= 1e-3,
          "max rel gradient error " + fmt(gerr) + ", max rel Hessian error " + fmt(herr) + " at 100 points"};
}

}  // namespace

int main()
{
  criterion(1, "hemisphere anchor", 1, hemisphere_anchor);
  criterion(2, "eigenvalue inverse roundtrip", 10, eigen_roundtrip);
  criterion(3, "lemma suite", 60, lemma_suite);
  criterion(4, "family-map inversion", 30, family_inversion);
  criterion(5, "candidate self-consistency", 0, candidate_self_consistency);
  criterion(6, "Q vanishing", 60, q_vanishing);
  criterion(7, "index engine", 0, index_engine);
  criterion(8, "perturbation behaviour", 0, perturbation);
  criterion(9, "candidate gradient/Hessian vs finite differences", 0, candidate_derivatives);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
