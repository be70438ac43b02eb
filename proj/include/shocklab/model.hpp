#pragma once

// Compiled reduced model: each entry of A(w) as a multivariate polynomial
// fitted over the certification grid, with the structural zeros of the
// reduced form enforced exactly. The fitted model is itself an exactly
// normalized theorem-class system (a_in = 0 for i<n, A(0) diagonal,
// a_nn(0) = 0, d a_nn/d w_n(0) = 1), so downstream runs and diagnostics
// are self-consistent regardless of the (reported) fit residual.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shocklab/hyperbolic.hpp"
#include "shocklab/reduction.hpp"

namespace shocklab {

struct PolyND {
  int nvars = 0;
  double scale = 1.0;  // monomials in (w/scale)
  std::vector<std::vector<int>> expo;
  std::vector<double> coef;

  double eval(const VectorXd& w) const {
    double s = 0;
    for (size_t t = 0; t < coef.size(); ++t) {
      double m = coef[t];
      for (int k = 0; k < nvars; ++k)
        for (int e = 0; e < expo[t][k]; ++e) m *= w[k] / scale;
      s += m;
    }
    return s;
  }

  PolyND diff(int k) const {
    PolyND d;
    d.nvars = nvars;
    d.scale = scale;
    for (size_t t = 0; t < coef.size(); ++t) {
      if (expo[t][k] == 0) continue;
      auto e = expo[t];
      double c = coef[t] * e[k] / scale;
      e[k] -= 1;
      d.expo.push_back(e);
      d.coef.push_back(c);
    }
    return d;
  }
};

inline std::vector<std::vector<int>> monomials_up_to(int nvars, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(nvars, 0);
  std::function<void(int, int)> rec = [&](int var, int left) {
    if (var == nvars) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[var] = e;
      rec(var + 1, left - e);
    }
    cur[var] = 0;
  };
  rec(0, degree);
  return out;
}

struct ModelFrames {
  VectorXd mu;      // mu-indexed speeds (mu_n last)
  MatrixXd right;   // columns gamma_i, gamma_n = e_n exactly
  MatrixXd left;    // rows ell_i, biorthonormal
};

class ReducedModel {
 public:
  int n = 1;
  int i0 = 1;
  int degree = 0;
  double delta0 = 0;
  std::string system_name;
  std::vector<std::vector<PolyND>> a;     // a[i][j]; zero polys where exact 0
  std::vector<std::vector<PolyND>> da;    // da[k] of a_nn and bottom row etc.

  // derivative polys of every entry w.r.t. each variable (built on demand)
  void build_derivatives() {
    da.assign(n * n, std::vector<PolyND>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) da[i * n + j][k] = a[i][j].diff(k);
  }

  MatrixXd A(const VectorXd& w) const {
    MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = a[i][j].eval(w);
    return M;
  }

  double entry(int i, int j, const VectorXd& w) const { return a[i][j].eval(w); }
  double dentry(int i, int j, int k, const VectorXd& w) const {
    return da[i * n + j][k].eval(w);
  }

  double mu_n(const VectorXd& w) const { return a[n - 1][n - 1].eval(w); }

  VectorXd grad_mu_n(const VectorXd& w) const {
    VectorXd g(n);
    for (int k = 0; k < n; ++k) g[k] = da[(n - 1) * n + (n - 1)][k].eval(w);
    return g;
  }

  double d2_mu_n(int k, int l, const VectorXd& w) const {
    return da[(n - 1) * n + (n - 1)][k].diff(l).eval(w);
  }

  // Closed-path eigendecomposition exploiting the reduced structure:
  // eigenvalues of A are eig(top-left block) plus a_nn; gamma_n = e_n.
  // Block eigenvalues sorted ascending are mu_1..mu_{n-1}.
  ModelFrames frames(const VectorXd& w) const {
    ModelFrames f;
    MatrixXd M = A(w);
    f.mu.resize(n);
    f.right = MatrixXd::Zero(n, n);
    f.left = MatrixXd::Zero(n, n);
    double ann = M(n - 1, n - 1);
    f.mu[n - 1] = ann;
    f.right(n - 1, n - 1) = 1.0;
    if (n == 1) {
      f.left(0, 0) = 1.0;
      return f;
    }
    const int m = n - 1;
    MatrixXd Rblk(m, m);
    VectorXd lam(m);
    if (m == 1) {
      lam[0] = M(0, 0);
      Rblk(0, 0) = 1.0;
    } else if (m == 2) {
      double g11 = M(0, 0), g12 = M(0, 1), g21 = M(1, 0), g22 = M(1, 1);
      double tr = g11 + g22;
      double disc2 = (g11 - g22) * (g11 - g22) + 4.0 * g12 * g21;
      if (disc2 < 0) throw ComplexEigenvalues(w);
      double disc = std::sqrt(disc2);
      lam[0] = 0.5 * (tr - disc);
      lam[1] = 0.5 * (tr + disc);
      for (int i = 0; i < 2; ++i) {
        Eigen::Vector2d v1(g12, lam[i] - g11), v2(lam[i] - g22, g21);
        Eigen::Vector2d v = (v1.norm() >= v2.norm()) ? v1 : v2;
        if (v.norm() == 0) v = Eigen::Vector2d(1, 0);
        Rblk.col(i) = v.normalized();
      }
    } else {
      EigenStructure es = eigendecompose_matrix(M.topLeftCorner(m, m), w);
      lam = es.lambdas;
      Rblk = es.right_vecs;
    }
    Eigen::RowVectorXd b = M.row(n - 1).head(m);
    for (int i = 0; i < m; ++i) {
      f.mu[i] = lam[i];
      VectorXd full(n);
      full.head(m) = Rblk.col(i);
      double gap = lam[i] - ann;
      if (std::abs(gap) < 1e-10) throw EigenvalueCollision(w, std::abs(gap));
      full[n - 1] = b.dot(Rblk.col(i)) / gap;
      full.normalize();
      fix_sign(full);
      f.right.col(i) = full;
    }
    // left rows: block-biorthonormal with zero tail for i<n; for the n-th
    // family ell_n = (-b (G - ann I)^{-1}, 1), orthogonal to the others
    // by construction.
    MatrixXd blk(m, m);
    for (int i = 0; i < m; ++i) blk.col(i) = f.right.col(i).head(m);
    MatrixXd blk_inv = blk.inverse();
    for (int i = 0; i < m; ++i) f.left.row(i).head(m) = blk_inv.row(i);
    MatrixXd shifted = M.topLeftCorner(m, m) - ann * MatrixXd::Identity(m, m);
    Eigen::RowVectorXd xh = -b * shifted.inverse();
    f.left.row(n - 1).head(m) = xh;
    f.left(n - 1, n - 1) = 1.0;
    return f;
  }

  double max_speed(const VectorXd& w) const {
    ModelFrames f = frames(w);
    return f.mu.cwiseAbs().maxCoeff();
  }
};

struct CertificationReport {
  double max_zero_col = 0;       // max |a_in|, i<n
  double max_ann_mismatch = 0;   // max |a_nn - mu_n|
  double max_a0_offdiag = 0;     // off-diagonal of A(0)
  double max_roundtrip = 0;      // u -> w -> u
  double max_eig_mismatch = 0;   // eigenvalue multisets of A(w) vs F(u(w))
  double max_gamma_angle = 0;    // (A-18): image of gamma_{i0} vs e_n
  double max_perm_error = 0;     // mu_i(w) vs permuted lambda(u(w))
  double mu_n0 = 0;              // after normalization: should be 0
  double dmu_n0 = 0;             // after normalization: should be 1
  double gn_scalar0 = 0;         // genuine-nonlinearity scalar at w=0
  double certified_delta0 = 0;
  double fit_residual = 0;       // max |A_model - A_exact| over the grid
  int grid_points = 0;
  int newton_failures = 0;
  VectorXd worst_zero_col_at;
};

struct CertificationFailure : std::runtime_error {
  CertificationReport report;
  explicit CertificationFailure(CertificationReport r)
      : std::runtime_error("reduction certification failed"),
        report(std::move(r)) {}
};

// Sweep the (2m+1)^n lattice over the |w|_inf <= delta0 cube: verify every
// ReducedSystem invariant and collect (w, A(w)) samples for the model fit.
// Newton failures shrink the certified radius instead of aborting.
inline CertificationReport certify_reduction(
    const ReducedSystem& rs, double delta0, int m,
    std::vector<VectorXd>* ws_out = nullptr,
    std::vector<MatrixXd>* As_out = nullptr) {
  const int n = rs.n();
  CertificationReport rep;
  rep.certified_delta0 = delta0;

  const int side = 2 * m + 1;
  long total = 1;
  for (int k = 0; k < n; ++k) total *= side;
  rep.grid_points = static_cast<int>(total);

  VectorXd w(n), u;
  double fail_radius = std::numeric_limits<double>::infinity();
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int k = 0; k < n; ++k) {
      int j = static_cast<int>(rem % side);
      rem /= side;
      w[k] = delta0 * (j - m) / double(m);
    }
    try {
      u = rs.w_to_u(w);
    } catch (const NewtonFailure&) {
      ++rep.newton_failures;
      fail_radius = std::min(fail_radius, w.lpNorm<Eigen::Infinity>());
      continue;
    }
    MatrixXd Aw = rs.A(w);
    if (ws_out) ws_out->push_back(w);
    if (As_out) As_out->push_back(Aw);

    double zc = 0;
    for (int i = 0; i < n - 1; ++i) zc = std::max(zc, std::abs(Aw(i, n - 1)));
    if (zc > rep.max_zero_col) {
      rep.max_zero_col = zc;
      rep.worst_zero_col_at = w;
    }
    EigenStructure esA = eigendecompose_matrix(Aw, w);
    VectorXd mu = rs.permute_mus(esA.lambdas);
    rep.max_ann_mismatch =
        std::max(rep.max_ann_mismatch, std::abs(Aw(n - 1, n - 1) - mu[n - 1]));

    // eigenvalue multiset match with the physical flux (Prop 2.1(1))
    const auto& norm = rs.normalization();
    EigenStructure esF = eigendecompose_matrix(rs.spec().flux(u), u);
    for (int i = 0; i < n; ++i) {
      double lam_norm = (esF.lambdas[i] - norm.shift) / norm.scale;
      rep.max_eig_mismatch =
          std::max(rep.max_eig_mismatch, std::abs(lam_norm - esA.lambdas[i]));
    }
    // permutation check
    int k0 = rs.i0() - 1;
    for (int i = 0; i < n; ++i) {
      int lam_idx = (i < k0) ? i : (i < n - 1 ? i + 1 : k0);
      double lam_norm = (esF.lambdas[lam_idx] - norm.shift) / norm.scale;
      rep.max_perm_error =
          std::max(rep.max_perm_error, std::abs(mu[i] - lam_norm));
    }
    // (A-18): J_w gamma_{i0} parallel to e_n
    if (n > 1) {
      VectorXd g = esF.right_vecs.col(k0);
      VectorXd img = rs.jac_w(u) * g;
      double ang = img.head(n - 1).norm() / img.norm();
      rep.max_gamma_angle = std::max(rep.max_gamma_angle, ang);
    }
    // round trip
    VectorXd w2 = rs.u_to_w(u);
    rep.max_roundtrip =
        std::max(rep.max_roundtrip, (w2 - w).norm() / (1.0 + w.norm()));
  }
  if (rep.newton_failures > 0)
    rep.certified_delta0 = std::min(delta0, 0.95 * fail_radius);

  MatrixXd A0 = rs.A(VectorXd::Zero(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) rep.max_a0_offdiag = std::max(rep.max_a0_offdiag, std::abs(A0(i, j)));

  // normalization values at w = 0 (five-point slope in w_n)
  {
    double h = 1e-3;
    auto ann = [&](double wn) {
      VectorXd ww = VectorXd::Zero(n);
      ww[n - 1] = wn;
      return rs.A(ww)(n - 1, n - 1);
    };
    rep.mu_n0 = ann(0.0);
    rep.dmu_n0 =
        (ann(-2 * h) - 8 * ann(-h) + 8 * ann(h) - ann(2 * h)) / (12 * h);
    rep.gn_scalar0 = rep.dmu_n0;  // gamma_n = e_n, so grad mu_n . gamma_n
  }
  return rep;
}

// Least-squares polynomial fit of the collected A(w) samples. Structural
// zeros are not fitted; the constant and linear terms that the normalized
// reduced form pins are snapped exactly after the fit.
inline ReducedModel fit_reduced_model(const ReducedSystem& rs, double delta0,
                                      int degree,
                                      const std::vector<VectorXd>& ws,
                                      const std::vector<MatrixXd>& As,
                                      double* fit_residual = nullptr) {
  const int n = rs.n();
  ReducedModel model;
  model.n = n;
  model.i0 = rs.i0();
  model.degree = degree;
  model.delta0 = delta0;
  model.system_name = rs.spec().name;

  auto mono = monomials_up_to(n, degree);
  const int nb = static_cast<int>(mono.size());
  const int ns = static_cast<int>(ws.size());
  if (ns < nb) throw std::invalid_argument("fit: fewer samples than basis");

  Eigen::MatrixXd B(ns, nb);
  for (int s = 0; s < ns; ++s)
    for (int t = 0; t < nb; ++t) {
      double v = 1;
      for (int k = 0; k < n; ++k)
        for (int e = 0; e < mono[t][k]; ++e) v *= ws[s][k] / delta0;
      B(s, t) = v;
    }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);

  model.a.assign(n, std::vector<PolyND>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      PolyND& p = model.a[i][j];
      p.nvars = n;
      p.scale = delta0;
      if (j == n - 1 && i < n - 1) continue;  // exact zero column
      Eigen::VectorXd rhs(ns);
      for (int s = 0; s < ns; ++s) rhs(s) = As[s](i, j);
      Eigen::VectorXd c = qr.solve(rhs);
      for (int t = 0; t < nb; ++t) {
        if (c(t) == 0.0) continue;
        p.expo.push_back(mono[t]);
        p.coef.push_back(c(t));
      }
    }

  // snap the normalization exactly: A(0) diagonal, a_nn(0)=0, d/dw_n = 1
  auto const_term = [&](PolyND& p) -> double* {
    for (size_t t = 0; t < p.coef.size(); ++t) {
      bool all0 = true;
      for (int k = 0; k < n; ++k)
        if (p.expo[t][k] != 0) all0 = false;
      if (all0) return &p.coef[t];
    }
    return nullptr;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j)
        if (double* c = const_term(model.a[i][j])) *c = 0.0;
  double shift = 0.0;
  if (double* c = const_term(model.a[n - 1][n - 1])) {
    shift = *c;
  }
  double scale = 1.0;
  for (size_t t = 0; t < model.a[n - 1][n - 1].coef.size(); ++t) {
    const auto& e = model.a[n - 1][n - 1].expo[t];
    int deg = 0;
    for (int k = 0; k < n; ++k) deg += e[k];
    if (deg == 1 && e[n - 1] == 1)
      scale = model.a[n - 1][n - 1].coef[t] / delta0;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      PolyND& p = model.a[i][j];
      if (i == j)
        if (double* c = const_term(p)) *c -= shift;
      for (auto& cf : p.coef) cf /= scale;
    }

  model.build_derivatives();
  if (fit_residual) {
    double r = 0;
    for (int s = 0; s < ns; ++s) {
      MatrixXd D = model.A(ws[s]) * scale;
      for (int i = 0; i < n; ++i) D(i, i) += shift;
      r = std::max(r, (D - As[s]).cwiseAbs().maxCoeff());
    }
    *fit_residual = r;
  }
  return model;
}

// The scalar Burgers model A(w) = w, used by oracle paths and tests.
inline ReducedModel burgers_model() {
  ReducedModel m;
  m.n = 1;
  m.i0 = 1;
  m.degree = 1;
  m.delta0 = 10.0;
  m.system_name = "burgers";
  m.a.assign(1, std::vector<PolyND>(1));
  m.a[0][0].nvars = 1;
  m.a[0][0].scale = 1.0;
  m.a[0][0].expo = {{1}};
  m.a[0][0].coef = {1.0};
  m.build_derivatives();
  return m;
}

}  // namespace shocklab
