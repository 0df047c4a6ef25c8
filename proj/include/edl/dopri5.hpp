#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta stepper with FSAL and
// elementary step-size control.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "edl/error.hpp"

namespace edl {

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_max = 5e-3;
  double h_min = 1e-14;
};

template <std::size_t N>
class Dopri5 {
 public:
  using State = std::array<double, N>;
  using Rhs = std::function<State(double, const State&)>;

  Dopri5(Rhs rhs, double x0, const State& y0, StepControl ctl)
      : rhs_(std::move(rhs)), ctl_(ctl), x_(x0), y_(y0), h_(std::min(ctl.h_init, ctl.h_max))
  {
    k1_ = rhs_(x_, y_);
  }

  double x() const { return x_; }
  const State& y() const { return y_; }
  /// Derivative at the current point (FSAL stage).
  const State& dy() const { return k1_; }
  long accepted() const { return accepted_; }
  long rejected() const { return rejected_; }

  /// Takes one accepted step, never stepping past `x_limit`.
  void step(double x_limit)
  {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    for (;;) {
      double h = std::min(h_, ctl_.h_max);
      bool clipped = false;
      if (x_ + h >= x_limit) {
        h = x_limit - x_;
        clipped = true;
      }
      if (!(h > 0)) throw DomainError("Dopri5::step called at or beyond the limit");

      State tmp, k2, k3, k4, k5, k6, k7, ynew;
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * a21 * k1_[i];
      k2 = rhs_(x_ + c2 * h, tmp);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
      k3 = rhs_(x_ + c3 * h, tmp);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = rhs_(x_ + c4 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = rhs_(x_ + c5 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      k6 = rhs_(x_ + h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        ynew[i] = y_[i] + h * (b1 * k1_[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      const double xnew = clipped ? x_limit : x_ + h;
      k7 = rhs_(xnew, ynew);

      double err = 0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = ctl_.atol + ctl_.rtol * std::max(std::abs(y_[i]), std::abs(ynew[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / N);
      if (!std::isfinite(err)) err = 1e10;

      if (err <= 1.0) {
        const double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (!clipped) h_ = h * fac;
        else h_ = std::max(h_, h * fac);
        x_ = xnew;
        y_ = ynew;
        k1_ = k7;
        ++accepted_;
        return;
      }
      ++rejected_;
      h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h_ < ctl_.h_min)
        throw ConvergenceError("Dopri5 step size underflow at x=" + std::to_string(x_));
    }
  }

 private:
  Rhs rhs_;
  StepControl ctl_;
  double x_;
  State y_, k1_{};
  double h_;
  long accepted_ = 0, rejected_ = 0;
};

}  // namespace edl
