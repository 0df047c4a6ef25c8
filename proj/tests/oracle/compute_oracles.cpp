// Prints the reference values frozen into tests/oracle_values.hpp.
// Build target: edl_compute_oracles (not part of ctest).

#include <cmath>
#include <cstdio>

#include "shooting_oracle.hpp"

using edl_oracle::shoot;

namespace {

double radius_linear(double lambda)
{
  auto r = shoot([=](double x) { return lambda * x; }, [=](double) { return lambda; }, 1.0);
  return r.first_zero.value_or(NAN);
}

}  // namespace

int main()
{
  auto ac = [](double x) { return x - x * x * x; };
  auto acp = [](double x) { return 1 - 3 * x * x; };

  auto r = shoot(ac, acp, 0.5);
  std::printf("allen_cahn_t05_r       %.15f  slope %.15f\n", *r.first_zero, r.slope_at_zero);

  auto s = shoot([](double) { return 1.0; }, [](double) { return 0.0; }, 1.0);
  std::printf("serrin_t1_r            %.15f  closed form %.15f\n", *s.first_zero,
              2 * std::acos(std::exp(-0.5)));

  auto l1 = shoot([](double x) { return x; }, [](double) { return 1.0; }, 1.0);
  std::printf("linear1_R              %.15f  alpha %.15f\n", *l1.first_zero, l1.slope_at_zero);
  auto l2 = shoot([](double x) { return 2 * x; }, [](double) { return 2.0; }, 1.0);
  std::printf("linear2_R              %.15f  alpha %.15f (pi/2 = %.15f)\n", *l2.first_zero, l2.slope_at_zero,
              M_PI / 2);

  std::printf("R(0.1)                 %.15f\n", radius_linear(0.1));
  std::printf("R(100)                 %.15f\n", radius_linear(100.0));

  // lambda with R_lambda = 2.5 by bisection in log(lambda)
  double lo = std::log(0.1), hi = std::log(10.0);
  for (int i = 0; i < 45; ++i) {
    const double mid = 0.5 * (lo + hi);
    (radius_linear(std::exp(mid)) > 2.5 ? lo : hi) = mid;
  }
  std::printf("lambda_for_R2.5        %.15f\n", std::exp(0.5 * (lo + hi)));

  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    auto rr = shoot(ac, acp, t);
    std::printf("allen_cahn r(%.1f)      %.15f\n", t, *rr.first_zero);
  }

  // H_t(r_t / 2) for allen-cahn t = 0.5 by a central difference in t
  const double half = 0.5 * *r.first_zero, dt = 1e-4;
  const double up = edl_oracle::sample(ac, acp, 0.5 + dt, half).first;
  const double dn = edl_oracle::sample(ac, acp, 0.5 - dt, half).first;
  std::printf("allen_cahn H(r/2)      %.15f\n", (up - dn) / (2 * dt));
  // U at rho = 1 for allen-cahn t = 0.5
  std::printf("allen_cahn U(1)        %.15f\n", edl_oracle::sample(ac, acp, 0.5, 1.0).first);
  return 0;
}
