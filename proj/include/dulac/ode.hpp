#pragma once

// Dormand-Prince 5(4) with complex state and adaptive step control, stepping
// in either direction of the real parameter.

#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include "dulac/errors.hpp"

namespace dulac::ode {

using cplx = std::complex<double>;

template <std::size_t M>
using State = std::array<cplx, M>;

struct Options {
  double rtol = 1e-10;
  double atol = 1e-13;
  double h0 = 1e-3;
  double hmin = 1e-14;
  double hmax = 0.25;
  long max_steps = 2000000;
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
  double last_error = 0;  // normalized local error of the last accepted step
};

/// Integrates y' = f(t, y) from t0 to t1.  After every accepted step
/// `observe(t, y)` is called; returning false stops the integration.
/// Returns the parameter value reached.
template <std::size_t M, class F, class Obs>
double integrate(F&& f, double t0, double t1, State<M>& y, const Options& opt, Obs&& observe, Stats* stats = nullptr) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double t = t0;
  double h = std::min(opt.h0, std::abs(t1 - t0));
  if (h == 0) return t;
  Stats local;
  Stats& st = stats ? *stats : local;

  State<M> k1 = f(t, y), k2, k3, k4, k5, k6, k7, tmp, ynew;
  for (long step = 0; step < opt.max_steps; ++step) {
    if (dir * (t1 - t) <= 0) break;
    h = std::min(h, std::abs(t1 - t));
    const double hs = dir * h;
    for (std::size_t i = 0; i < M; ++i) tmp[i] = y[i] + hs * (a21 * k1[i]);
    k2 = f(t + c2 * hs, tmp);
    for (std::size_t i = 0; i < M; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * hs, tmp);
    for (std::size_t i = 0; i < M; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * hs, tmp);
    for (std::size_t i = 0; i < M; ++i) tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * hs, tmp);
    for (std::size_t i = 0; i < M; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(t + hs, tmp);
    for (std::size_t i = 0; i < M; ++i)
      ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = f(t + hs, ynew);

    double err = 0;
    for (std::size_t i = 0; i < M; ++i) {
      cplx e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      t += hs;
      y = ynew;
      k1 = k7;  // first-same-as-last
      ++st.accepted;
      st.last_error = err;
      if (!observe(t, y)) return t;
      double fac = err == 0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
      h = std::min(h * fac, opt.hmax);
    } else {
      ++st.rejected;
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
      if (h < opt.hmin) throw Error("StepUnderflow", "adaptive step fell below the minimum step");
    }
  }
  return t;
}

}  // namespace dulac::ode
