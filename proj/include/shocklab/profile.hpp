#pragma once

// The exact self-similar Burgers profile: the odd decreasing root of
//   W^3 + W + y = 0,
// its derivatives, steady-equation residual and weighted bounds. This is
// the ground truth every frame diagnostic compares against.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace shocklab {

struct ProfileEval {
  double y = 0;
  double W = 0;
  double d1 = 0, d2 = 0, d3 = 0, d4 = 0;
  double eta = 1;  // 1 + y^2
};

struct BoundViolation : std::runtime_error {
  double location;
  BoundViolation(const std::string& what, double y)
      : std::runtime_error(what), location(y) {}
};

namespace profile_detail {

// Root of W^3 + W + y = 0 in extended precision. The closed form
//   W = (-y/2 + R)^{1/3} - (y/2 + R)^{1/3},  R = sqrt(1/27 + y^2/4),
// loses the small branch for large |y|; rationalize it instead:
//   -y/2 + R = (1/27) / (y/2 + R)   for y > 0.
// A Newton polish brings the root to the last ulp so the cubic residual
// stays at rounding level even when |y| ~ 1e6.
inline long double root(long double y) {
  if (y == 0.0L) return 0.0L;
  long double ay = y < 0 ? -y : y;
  const long double third = 1.0L / 27.0L;
  long double R = std::hypot(0.5L * ay, std::sqrt(third));
  long double big = 0.5L * ay + R;
  long double small = third / big;
  long double W = std::cbrt(small) - std::cbrt(big);  // value at +|y|
  for (int it = 0; it < 2; ++it) {
    long double D = 3.0L * W * W + 1.0L;
    W -= (W * W * W + W + ay) / D;
  }
  return y > 0 ? W : -W;
}

// Taylor coefficients of W about y, orders 0..K, from W' = -1/(1+3W^2).
inline void series(long double y, int K, long double* c) {
  c[0] = root(y);
  std::vector<long double> D(K + 1, 0.0L), R(K + 1, 0.0L);
  for (int k = 0; k + 1 <= K; ++k) {
    // D = 1 + 3 W^2 up to order k
    for (int j = 0; j <= k; ++j) {
      long double s = 0;
      for (int i = 0; i <= j; ++i) s += c[i] * c[j - i];
      D[j] = 3.0L * s + (j == 0 ? 1.0L : 0.0L);
    }
    // R = -1/D up to order k
    R[0] = -1.0L / D[0];
    for (int j = 1; j <= k; ++j) {
      long double s = 0;
      for (int i = 0; i < j; ++i) s += R[i] * D[j - i];
      R[j] = -s / D[0];
    }
    c[k + 1] = R[k] / (k + 1);
  }
}

}  // namespace profile_detail

// Profile value and derivatives 0..K (K <= 8) as raw derivatives.
inline std::vector<double> profile_derivs(double y, int K) {
  long double c[9];
  profile_detail::series(static_cast<long double>(y), K, c);
  std::vector<double> d(K + 1);
  long double fact = 1.0L;
  for (int k = 0; k <= K; ++k) {
    if (k >= 2) fact *= k;
    d[k] = static_cast<double>(c[k] * (k >= 2 ? fact : 1.0L));
  }
  return d;
}

inline ProfileEval eval_profile(double y) {
  ProfileEval p;
  p.y = y;
  p.eta = 1.0 + y * y;
  auto d = profile_derivs(y, 4);
  p.W = d[0];
  p.d1 = d[1];
  p.d2 = d[2];
  p.d3 = d[3];
  p.d4 = d[4];
  return p;
}

inline double profile_value(double y) {
  return static_cast<double>(profile_detail::root(y));
}

// |W^3 + W + y| evaluated in extended precision on the internal root.
inline double cubic_residual(double y) {
  long double W = profile_detail::root(static_cast<long double>(y));
  long double r = W * W * W + W + static_cast<long double>(y);
  return static_cast<double>(r < 0 ? -r : r);
}

// Residual of (d/ds - 1/2) Wbar + (3y/2 + Wbar) Wbar' with d/ds = 0.
inline double steady_residual(double y) {
  long double W = profile_detail::root(static_cast<long double>(y));
  long double W1 = -1.0L / (1.0L + 3.0L * W * W);
  long double r = -0.5L * W + (1.5L * static_cast<long double>(y) + W) * W1;
  return static_cast<double>(r);
}

struct ProfileBoundsReport {
  double max_w_weighted = 0;      // sup eta^{-1/6} |W|
  double min_d1_weighted = 0;     // min eta^{1/3} W'
  double max_d1_weighted = -1e30; // max eta^{1/3} W'
  double max_d2_weighted = 0;     // sup eta^{5/6} |W''|
  bool ok = true;
};

// Checks the profile bounds
//   ||eta^{-1/6} W||_inf <= 1,  -1 <= eta^{1/3} W' <= -1/6,
//   ||eta^{5/6} W''||_inf <= 2
// on the given grid; throws BoundViolation on failure (an implementation
// bug, not a data property).
inline ProfileBoundsReport profile_bounds_check(const std::vector<double>& ys) {
  ProfileBoundsReport r;
  r.min_d1_weighted = 0.0;
  const double tol = 1e-12;
  for (double y : ys) {
    ProfileEval p = eval_profile(y);
    double e16 = std::pow(p.eta, -1.0 / 6.0);
    double e13 = std::pow(p.eta, 1.0 / 3.0);
    double e56 = std::pow(p.eta, 5.0 / 6.0);
    double a = e16 * std::abs(p.W);
    double b = e13 * p.d1;
    double c = e56 * std::abs(p.d2);
    r.max_w_weighted = std::max(r.max_w_weighted, a);
    r.min_d1_weighted = std::min(r.min_d1_weighted, b);
    r.max_d1_weighted = std::max(r.max_d1_weighted, b);
    r.max_d2_weighted = std::max(r.max_d2_weighted, c);
    if (a > 1.0 + tol) throw BoundViolation("eta^{-1/6}|W| > 1", y);
    if (b < -1.0 - tol || b > -1.0 / 6.0 + tol)
      throw BoundViolation("eta^{1/3}W' outside [-1,-1/6]", y);
    if (c > 2.0 + tol) throw BoundViolation("eta^{5/6}|W''| > 2", y);
  }
  return r;
}

inline double eta(double y) { return 1.0 + y * y; }

}  // namespace shocklab
