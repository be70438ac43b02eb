#pragma once

// Grid utilities: Fornberg finite-difference weights on arbitrary nodes,
// local polynomial interpolation / least-squares fits, and the asinh-mapped
// self-similar grid.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace shocklab {

// Fornberg's algorithm: weights w[k][j] so that
//   f^(k)(x0) ~= sum_j w[k][j] f(x[j]),  k = 0..m
inline std::vector<std::vector<double>> fornberg_weights(
    double x0, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size()) - 1;
  assert(n >= m);
  std::vector<std::vector<std::vector<double>>> d(
      m + 1, std::vector<std::vector<double>>(n + 1,
                                              std::vector<double>(n + 1, 0.0)));
  d[0][0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i <= n; ++i) {
    double c2 = 1.0;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      for (int k = 0; k <= std::min(i, m); ++k) {
        d[k][i][j] = ((x[i] - x0) * d[k][i - 1][j] -
                      (k > 0 ? k * d[k - 1][i - 1][j] : 0.0)) /
                     c3;
      }
    }
    for (int k = 0; k <= std::min(i, m); ++k) {
      d[k][i][i] = c1 / c2 *
                   ((k > 0 ? k * d[k - 1][i - 1][i - 1] : 0.0) -
                    (x[i - 1] - x0) * d[k][i - 1][i - 1]);
    }
    c1 = c2;
  }
  std::vector<std::vector<double>> w(m + 1, std::vector<double>(n + 1));
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j <= n; ++j) w[k][j] = d[k][n][j];
  return w;
}

// Index of the grid interval containing x (clamped); xs strictly increasing.
inline int locate(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  int i = static_cast<int>(it - xs.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(xs.size()) - 2);
}

// Local polynomial interpolation with an `npts`-wide centered stencil.
// Degree npts-1; default 6 points. Used for frame mapping where the
// amplified pinning residuals need better than cubic accuracy.
class LocalInterp {
 public:
  LocalInterp(const std::vector<double>* xs, const std::vector<double>* fs,
              int npts = 6)
      : xs_(xs), fs_(fs), npts_(npts) {}

  double operator()(double x) const { return eval(x, 0); }

  double eval(double x, int der) const {
    const auto& xs = *xs_;
    const int n = static_cast<int>(xs.size());
    int np = std::min(npts_, n);
    int i = locate(xs, x);
    int lo = std::clamp(i - (np - 1) / 2, 0, n - np);
    std::vector<double> nodes(xs.begin() + lo, xs.begin() + lo + np);
    auto w = fornberg_weights(x, nodes, der);
    double s = 0;
    for (int j = 0; j < np; ++j) s += w[der][j] * (*fs_)[lo + j];
    return s;
  }

 private:
  const std::vector<double>* xs_;
  const std::vector<double>* fs_;
  int npts_;
};

// Least-squares polynomial fit of (x, f) samples around a center; exposes
// derivatives of the fitted polynomial at arbitrary points. Acts as a
// smoothing probe for high derivatives of gridded data.
class PolyFit {
 public:
  PolyFit() = default;
  PolyFit(const std::vector<double>& x, const std::vector<double>& f,
          int degree, double center, double scale)
      : center_(center), scale_(scale), coef_(degree + 1) {
    const int n = static_cast<int>(x.size());
    const int m = degree + 1;
    if (n < m) throw std::invalid_argument("PolyFit: underdetermined");
    Eigen::MatrixXd A(n, m);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      double t = (x[i] - center) / scale;
      double p = 1;
      for (int j = 0; j < m; ++j) {
        A(i, j) = p;
        p *= t;
      }
      b(i) = f[i];
    }
    Eigen::VectorXd c = A.householderQr().solve(b);
    for (int j = 0; j < m; ++j) coef_[j] = c(j);
  }

  double eval(double x, int der = 0) const {
    const int m = static_cast<int>(coef_.size());
    double t = (x - center_) / scale_;
    double s = 0;
    for (int j = m - 1; j >= der; --j) {
      double fac = 1;
      for (int k = 0; k < der; ++k) fac *= (j - k);
      s = s * t + coef_[j] * fac;
    }
    for (int k = 0; k < der; ++k) s /= scale_;
    return s;
  }

  double center() const { return center_; }

 private:
  double center_ = 0, scale_ = 1;
  std::vector<double> coef_;
};

// Savitzky-Golay style sliding derivative estimates on a uniform grid:
// local LS polynomial of `degree` over a window of half-width `halfw`,
// derivative `der` evaluated at the window center.
inline std::vector<double> sg_derivative(const std::vector<double>& f,
                                         double h, int halfw, int degree,
                                         int der) {
  const int n = static_cast<int>(f.size());
  const int w = 2 * halfw + 1;
  if (n < w) throw std::invalid_argument("sg_derivative: grid too short");
  // precompute the center filter once
  Eigen::MatrixXd A(w, degree + 1);
  for (int i = 0; i < w; ++i) {
    double t = (i - halfw);
    double p = 1;
    for (int j = 0; j <= degree; ++j) {
      A(i, j) = p;
      p *= t;
    }
  }
  Eigen::MatrixXd AtA = A.transpose() * A;
  Eigen::MatrixXd pinv = AtA.ldlt().solve(A.transpose());
  double fac = 1;
  for (int k = 2; k <= der; ++k) fac *= k;
  Eigen::VectorXd filt = pinv.row(der) * fac;  // d^der/dt^der at t=0

  std::vector<double> out(n);
  double hs = std::pow(h, der);
  for (int i = 0; i < n; ++i) {
    int lo = std::clamp(i - halfw, 0, n - w);
    double s = 0;
    for (int j = 0; j < w; ++j) s += filt(j) * f[lo + j];
    // off-center near the boundary: fall back to a locally exact fit
    if (lo != i - halfw) {
      Eigen::VectorXd b(w);
      for (int j = 0; j < w; ++j) b(j) = f[lo + j];
      Eigen::VectorXd c = pinv * b;  // fit is around lo+halfw
      double t = i - (lo + halfw);
      double v = 0;
      for (int j = degree; j >= der; --j) {
        double g = 1;
        for (int k = 0; k < der; ++k) g *= (j - k);
        v = v * t + c(j) * g;
      }
      s = v;
    }
    out[i] = s / hs;
  }
  return out;
}

// Self-similar y-grid, uniform in q = asinh(y), |y| <= ymax, odd symmetric.
inline std::vector<double> asinh_grid(double ymax, int npts) {
  std::vector<double> ys(npts);
  double qmax = std::asinh(ymax);
  for (int i = 0; i < npts; ++i) {
    double q = -qmax + 2.0 * qmax * i / (npts - 1);
    ys[i] = std::sinh(q);
  }
  // force exact symmetry and an exact center point for odd npts
  for (int i = 0; i < npts / 2; ++i) ys[i] = -ys[npts - 1 - i];
  if (npts % 2 == 1) ys[npts / 2] = 0.0;
  return ys;
}

}  // namespace shocklab
