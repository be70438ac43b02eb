#pragma once

// Adaptive Cash-Karp RK45 for small dense systems, with optional scalar
// event crossing (sign change of a functional of the state).

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace shocklab {

using Vec = Eigen::VectorXd;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h0 = 1e-3;
  double hmin = 1e-14;
  double hmax = 1.0;
  int max_steps = 200000;
};

struct OdeResult {
  double t = 0;
  Vec y;
  bool event = false;  // stopped on event crossing
  int steps = 0;
};

namespace detail {
inline void ck45(const std::function<Vec(double, const Vec&)>& f, double t,
                 const Vec& y, double h, Vec& y5, Vec& y4) {
  static const double a2 = 1. / 5, a3 = 3. / 10, a4 = 3. / 5, a5 = 1.,
                      a6 = 7. / 8;
  static const double b21 = 1. / 5;
  static const double b31 = 3. / 40, b32 = 9. / 40;
  static const double b41 = 3. / 10, b42 = -9. / 10, b43 = 6. / 5;
  static const double b51 = -11. / 54, b52 = 5. / 2, b53 = -70. / 27,
                      b54 = 35. / 27;
  static const double b61 = 1631. / 55296, b62 = 175. / 512, b63 = 575. / 13824,
                      b64 = 44275. / 110592, b65 = 253. / 4096;
  static const double c1 = 37. / 378, c3 = 250. / 621, c4 = 125. / 594,
                      c6 = 512. / 1771;
  static const double d1 = 2825. / 27648, d3 = 18575. / 48384,
                      d4 = 13525. / 55296, d5 = 277. / 14336, d6 = 1. / 4;
  Vec k1 = f(t, y);
  Vec k2 = f(t + a2 * h, y + h * b21 * k1);
  Vec k3 = f(t + a3 * h, y + h * (b31 * k1 + b32 * k2));
  Vec k4 = f(t + a4 * h, y + h * (b41 * k1 + b42 * k2 + b43 * k3));
  Vec k5 = f(t + a5 * h, y + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4));
  Vec k6 = f(t + a6 * h,
             y + h * (b61 * k1 + b62 * k2 + b63 * k3 + b64 * k4 + b65 * k5));
  y5 = y + h * (c1 * k1 + c3 * k3 + c4 * k4 + c6 * k6);
  y4 = y + h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);
}
}  // namespace detail

// Integrate y' = f(t, y) from t0 to t1 (t1 may be < t0). If `event` is given,
// stop where event(t, y) crosses zero (located by bisection on the step).
// `observer`, when set, is called after every accepted step.
inline OdeResult integrate_ode(
    const std::function<Vec(double, const Vec&)>& f, double t0, double t1,
    Vec y0, const OdeOptions& opt = {},
    const std::function<double(double, const Vec&)>& event = nullptr,
    const std::function<void(double, const Vec&)>& observer = nullptr) {
  OdeResult res;
  double dir = (t1 >= t0) ? 1.0 : -1.0;
  double t = t0;
  Vec y = std::move(y0);
  double h = std::min(opt.h0, std::abs(t1 - t0)) * dir;
  if (h == 0.0) {
    res.t = t;
    res.y = y;
    return res;
  }
  double ev_prev = event ? event(t, y) : 0.0;
  if (observer) observer(t, y);

  for (int step = 0; step < opt.max_steps; ++step) {
    if ((t - t1) * dir >= 0) break;
    if (std::abs(h) > std::abs(t1 - t)) h = t1 - t;
    Vec y5, y4;
    detail::ck45(f, t, y, h, y5, y4);
    double err = 0;
    for (int i = 0; i < y.size(); ++i) {
      double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(y5[i] - y4[i]) / sc);
    }
    if (err <= 1.0 || std::abs(h) <= opt.hmin * 1.0001) {
      // accepted
      double t_new = t + h;
      if (event) {
        double ev_new = event(t_new, y5);
        if (ev_prev != 0.0 && ev_new * ev_prev < 0.0) {
          // bisect in step size for the crossing
          double lo = 0.0, hi = h;
          Vec ylo = y, yhi = y5;
          for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            Vec ym, dummy;
            detail::ck45(f, t, y, mid, ym, dummy);
            double em = event(t + mid, ym);
            if (em * ev_prev < 0.0) {
              hi = mid;
              yhi = ym;
            } else {
              lo = mid;
              ylo = ym;
            }
            if (std::abs(hi - lo) < 1e-15 * std::max(1.0, std::abs(t))) break;
          }
          res.t = t + hi;
          res.y = yhi;
          res.event = true;
          res.steps = step + 1;
          if (observer) observer(res.t, res.y);
          return res;
        }
        ev_prev = ev_new;
      }
      t = t_new;
      y = y5;
      res.steps = step + 1;
      if (observer) observer(t, y);
    }
    // PI-free step control
    double fac = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    fac = std::clamp(fac, 0.2, 5.0);
    h *= fac;
    if (std::abs(h) > opt.hmax) h = opt.hmax * dir;
    if (std::abs(h) < opt.hmin) h = opt.hmin * dir;
  }
  res.t = t;
  res.y = y;
  return res;
}

}  // namespace shocklab
