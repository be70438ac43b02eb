#pragma once

// Truncated Taylor-series arithmetic ("jets"): value plus derivatives
// d^1..d^N with respect to a single scalar argument. Used wherever an
// evaluator has to ship analytic derivatives (initial-data families,
// profile derivative recurrences, coordinate chain rules).

#include <array>
#include <cmath>
#include <cstddef>

namespace shocklab {

template <int N, class Real = double>
struct Jet {
  static_assert(N >= 1);
  // c[k] = f^{(k)}(x0) / k!  (Taylor coefficients, not raw derivatives)
  std::array<Real, N + 1> c{};

  Jet() = default;
  explicit Jet(Real value) { c[0] = value; }

  static Jet constant(Real v) { return Jet(v); }
  static Jet variable(Real v) {
    Jet j(v);
    j.c[1] = Real(1);
    return j;
  }

  Real value() const { return c[0]; }

  // k-th derivative (un-normalized)
  Real deriv(int k) const {
    Real f = 1;
    for (int i = 2; i <= k; ++i) f *= Real(i);
    return c[k] * f;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k <= N; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(const Jet& a) {
    Jet r;
    for (int k = 0; k <= N; ++k) r.c[k] = -a.c[k];
    return r;
  }
  friend Jet operator+(Jet a, Real s) {
    a.c[0] += s;
    return a;
  }
  friend Jet operator+(Real s, Jet a) { return a + s; }
  friend Jet operator-(Jet a, Real s) {
    a.c[0] -= s;
    return a;
  }
  friend Jet operator-(Real s, const Jet& a) { return (-a) + s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= N; ++k) {
      Real s = 0;
      for (int i = 0; i <= k; ++i) s += a.c[i] * b.c[k - i];
      r.c[k] = s;
    }
    return r;
  }
  friend Jet operator*(Jet a, Real s) {
    for (auto& x : a.c) x *= s;
    return a;
  }
  friend Jet operator*(Real s, Jet a) { return a * s; }

  // b must have nonzero value part
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet r;
    r.c[0] = a.c[0] / b.c[0];
    for (int k = 1; k <= N; ++k) {
      Real s = a.c[k];
      for (int i = 0; i < k; ++i) s -= r.c[i] * b.c[k - i];
      r.c[k] = s / b.c[0];
    }
    return r;
  }
  friend Jet operator/(Jet a, Real s) {
    for (auto& x : a.c) x /= s;
    return a;
  }
  friend Jet operator/(Real s, const Jet& b) { return Jet(s) / b; }
};

// exp via the ODE r' = r * a'
template <int N, class Real>
Jet<N, Real> exp(const Jet<N, Real>& a) {
  Jet<N, Real> r;
  r.c[0] = std::exp(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    Real s = 0;
    for (int i = 1; i <= k; ++i) s += Real(i) * a.c[i] * r.c[k - i];
    r.c[k] = s / Real(k);
  }
  return r;
}

// log via r' = a'/a, a.value() > 0
template <int N, class Real>
Jet<N, Real> log(const Jet<N, Real>& a) {
  Jet<N, Real> r;
  r.c[0] = std::log(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    Real s = Real(k) * a.c[k];
    for (int i = 1; i < k; ++i) s -= Real(i) * r.c[i] * a.c[k - i];
    r.c[k] = s / (Real(k) * a.c[0]);
  }
  return r;
}

// a^p for real exponent, a.value() > 0; uses r' a = p a' r
template <int N, class Real>
Jet<N, Real> pow(const Jet<N, Real>& a, Real p) {
  Jet<N, Real> r;
  r.c[0] = std::pow(a.c[0], p);
  for (int k = 1; k <= N; ++k) {
    Real s = 0;
    for (int i = 1; i <= k; ++i)
      s += (p * Real(i) - Real(k - i)) * a.c[i] * r.c[k - i];
    r.c[k] = s / (Real(k) * a.c[0]);
  }
  return r;
}

template <int N, class Real>
Jet<N, Real> sqrt(const Jet<N, Real>& a) {
  return pow(a, Real(0.5));
}

template <int N, class Real>
Jet<N, Real> sin(const Jet<N, Real>& a);
template <int N, class Real>
Jet<N, Real> cos(const Jet<N, Real>& a);

template <int N, class Real>
Jet<N, Real> sin(const Jet<N, Real>& a) {
  // s' = a' c, c' = -a' s, propagated jointly
  Jet<N, Real> s, c;
  s.c[0] = std::sin(a.c[0]);
  c.c[0] = std::cos(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    Real ss = 0, cs = 0;
    for (int i = 1; i <= k; ++i) {
      ss += Real(i) * a.c[i] * c.c[k - i];
      cs -= Real(i) * a.c[i] * s.c[k - i];
    }
    s.c[k] = ss / Real(k);
    c.c[k] = cs / Real(k);
  }
  return s;
}

template <int N, class Real>
Jet<N, Real> cos(const Jet<N, Real>& a) {
  Jet<N, Real> s, c;
  s.c[0] = std::sin(a.c[0]);
  c.c[0] = std::cos(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    Real ss = 0, cs = 0;
    for (int i = 1; i <= k; ++i) {
      ss += Real(i) * a.c[i] * c.c[k - i];
      cs -= Real(i) * a.c[i] * s.c[k - i];
    }
    s.c[k] = ss / Real(k);
    c.c[k] = cs / Real(k);
  }
  return c;
}

// Composition f(g) where fj holds Taylor coefficients of f at g.value().
// Horner scheme on the nilpotent part of g.
template <int N, class Real>
Jet<N, Real> compose(const Jet<N, Real>& fj, const Jet<N, Real>& g) {
  Jet<N, Real> dg = g;  // g minus its value part
  dg.c[0] = 0;
  Jet<N, Real> r(fj.c[N]);
  for (int k = N - 1; k >= 0; --k) {
    r = r * dg;
    r.c[0] += fj.c[k];
  }
  return r;
}

}  // namespace shocklab
