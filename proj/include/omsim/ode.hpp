#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "omsim/errors.hpp"

namespace omsim {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  // Any state component exceeding this magnitude aborts the integration:
  // exponential runaway must terminate cleanly so the sweep can blank the cell.
  double overflow_guard = 1e15;
  std::int64_t max_steps = 200'000'000;
};

// Embedded Dormand-Prince 5(4) adaptive step integrator. Vec is any Eigen
// fixed-size vector; f(t, y) returns dy/dt. Integrates y in place from t0 to
// t1, landing exactly on t1. atol_scale (same shape as y) multiplies the
// absolute tolerance per component; pass nullptr for uniform atol.
template <class Vec, class Rhs>
void integrate_to(Rhs&& f, double t0, double t1, Vec& y, const OdeOptions& opt,
                  const Vec* atol_scale = nullptr) {
  if (t1 <= t0) return;
  // Butcher tableau, Dormand & Prince RK5(4)7M.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // y5 - y4 error weights (b - b*).
  constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                   e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                   e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  double t = t0;
  Vec k1 = f(t, y);
  // Crude but robust initial step: limited by both span and |y'| scale.
  double h = (t1 - t0) * 1e-3;
  {
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = opt.atol * (atol_scale ? (*atol_scale)[i] : 1.0) +
                        opt.rtol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    if (d1 > 0.0) h = std::min(h, 0.01 * std::max(d0, 1.0) / d1);
    h = std::max(h, (t1 - t0) * 1e-14);
  }

  std::int64_t steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) {
      throw ConvergenceError("ODE integrator exceeded the step limit");
    }
    h = std::min(h, t1 - t);
    const Vec k2 = f(t + c2 * h, Vec(y + h * (a21 * k1)));
    const Vec k3 = f(t + c3 * h, Vec(y + h * (a31 * k1 + a32 * k2)));
    const Vec k4 = f(t + c4 * h, Vec(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vec k5 =
        f(t + c5 * h, Vec(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vec k6 = f(t + h, Vec(y + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                         a64 * k4 + a65 * k5)));
    const Vec ynew =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = f(t + h, ynew);  // FSAL
    const Vec err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = opt.atol * (atol_scale ? (*atol_scale)[i] : 1.0) +
                        opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double e = err[i] / sc;
      err_norm += e * e;
    }
    err_norm = std::sqrt(err_norm / y.size());

    if (err_norm <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;
      for (int i = 0; i < y.size(); ++i) {
        if (!(std::abs(y[i]) < opt.overflow_guard)) {
          throw InstabilityError("trajectory exceeded the overflow guard");
        }
      }
    }
    const double fac =
        err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
    h *= std::clamp(fac, 0.2, 5.0);
    if (!(t + h > t) && t < t1) {
      throw ConvergenceError("ODE step size underflow");
    }
  }
}

}  // namespace omsim
