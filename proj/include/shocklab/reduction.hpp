#pragma once

// Constructive reduction of d_t u + F(u) d_x u = 0 to the partially
// decoupled form d_t w + A(w) d_x w = 0 with
//   a_in = 0 (i < n),  a_nn = mu_n,  A(0) diagonal,
// and the normalization mu_n(0) = 0, d(mu_n)/d(w_n)(0) = 1.
//
// The n-1 Riemann invariants alpha_i = zeta_i.u + alphabar_i(u) are built by
// transporting alphabar along the integral curves of the gamma_{i0} field
// from the hyperplane through 0 orthogonal to gamma_{i0}(0). Value and
// gradient are propagated together (variational equation), so the Jacobian
// of the map u -> w is available at transport accuracy.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "shocklab/hyperbolic.hpp"
#include "shocklab/ode.hpp"

namespace shocklab {

struct FlowEscape : std::runtime_error {
  VectorXd sample;
  explicit FlowEscape(VectorXd u)
      : std::runtime_error("transport curve left the state box"),
        sample(std::move(u)) {}
};

struct ResidualTooLarge : std::runtime_error {
  double residual;
  ResidualTooLarge(const std::string& w, double r)
      : std::runtime_error(w), residual(r) {}
};

struct SingularCorrection : std::runtime_error {
  SingularCorrection() : std::runtime_error("b_n correction system singular") {}
};

struct DegenerateScale : std::runtime_error {
  DegenerateScale()
      : std::runtime_error("d(mu_n)/d(w_n)(0) below tolerance") {}
};

struct NewtonFailure : std::runtime_error {
  VectorXd target;
  explicit NewtonFailure(VectorXd w)
      : std::runtime_error("Newton inversion of u->w failed"),
        target(std::move(w)) {}
};

class RiemannInvariantSet {
 public:
  RiemannInvariantSet() = default;

  RiemannInvariantSet(const SystemSpec& spec, double delta0)
      : spec_(&spec), n_(spec.n), k0_(spec.i0 - 1), delta0_(delta0) {
    gamma0_ = eigendecompose(spec, VectorXd::Zero(n_)).right_vecs.col(k0_);
    // Householder complement of gamma0: deterministic zeta basis
    VectorXd v = gamma0_;
    double s = (v[n_ - 1] >= 0) ? 1.0 : -1.0;
    v[n_ - 1] += s;
    MatrixXd H = MatrixXd::Identity(n_, n_) -
                 (2.0 / v.squaredNorm()) * (v * v.transpose());
    zetas_.resize(n_, n_ - 1);
    for (int j = 0; j < n_ - 1; ++j) zetas_.col(j) = H.col(j);
  }

  int count() const { return n_ - 1; }
  const MatrixXd& zetas() const { return zetas_; }
  const VectorXd& gamma0() const { return gamma0_; }

  // alphabar values (size n-1) and gradients (rows of (n-1) x n) at u,
  // from one shared backward transport solve.
  void alphabar(const VectorXd& u, VectorXd& vals, MatrixXd& grads) const {
    const int n = n_;
    vals = VectorXd::Zero(n - 1);
    grads = MatrixXd::Zero(n - 1, n);
    double g0 = gamma0_.dot(u);
    if (u.norm() == 0.0) return;

    // state: [ v (n) | V (n*n, col-major) | acc (n-1) | gacc ((n-1)*n) ]
    const int nv = n, nV = n * n, na = n - 1, ng = (n - 1) * n;
    Vec y0(nv + nV + na + ng);
    y0.setZero();
    y0.head(n) = u;
    for (int j = 0; j < n; ++j) y0[nv + j * n + j] = 1.0;

    const double sigma = (g0 >= 0) ? 1.0 : -1.0;
    const SystemSpec& spec = *spec_;
    const double box = spec.state_box;
    auto gamma_field = [&](const VectorXd& x) -> VectorXd {
      VectorXd g = eigendecompose(spec, x).right_vecs.col(k0_);
      if (g.dot(gamma0_) < 0) g = -g;  // keep orientation along the curve
      return g;
    };
    auto dgamma = [&](const VectorXd& x) -> MatrixXd {
      double h = std::max(1e-6, 1e-7 * x.norm());
      MatrixXd D(n, n);
      for (int k = 0; k < n; ++k) {
        VectorXd xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        D.col(k) = (gamma_field(xp) - gamma_field(xm)) / (2 * h);
      }
      return D;
    };

    auto rhs = [&](double, const Vec& y) -> Vec {
      VectorXd x = y.head(n);
      if (x.norm() > box) throw FlowEscape(u);
      VectorXd g = gamma_field(x);
      MatrixXd Dg = dgamma(x);
      MatrixXd V(n, n);
      for (int j = 0; j < n; ++j) V.col(j) = y.segment(nv + j * n, n);
      Vec dy(y.size());
      dy.head(n) = -sigma * g;
      MatrixXd dV = -sigma * (Dg * V);
      for (int j = 0; j < n; ++j) dy.segment(nv + j * n, n) = dV.col(j);
      VectorXd dgam = g - gamma0_;
      for (int i = 0; i < n - 1; ++i) {
        dy[nv + nV + i] = -zetas_.col(i).dot(dgam);           // r_i(v)
        Eigen::RowVectorXd gr = -zetas_.col(i).transpose() * Dg * V;
        dy.segment(nv + nV + na + i * n, n) = gr.transpose();  // grad acc
      }
      return dy;
    };
    auto event = [&](double, const Vec& y) -> double {
      return gamma0_.dot(y.head(n));
    };

    OdeOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    opt.h0 = 0.05;
    opt.hmax = 0.2;
    OdeResult res = integrate_ode(rhs, 0.0, 4.0 * box, y0, opt, event);
    if (!res.event) throw FlowEscape(u);

    VectorXd vS = res.y.head(n);
    MatrixXd VS(n, n);
    for (int j = 0; j < n; ++j) VS.col(j) = res.y.segment(nv + j * n, n);
    VectorXd gS = gamma_field(vS);
    double denom = gamma0_.dot(gS);
    Eigen::RowVectorXd dS = gamma0_.transpose() * VS / denom;  // sigma*gradS
    for (int i = 0; i < n - 1; ++i) {
      double acc = res.y[nv + nV + i];
      double rS = -zetas_.col(i).dot(gS - gamma0_);
      vals[i] = sigma * acc;
      grads.row(i) =
          sigma * res.y.segment(nv + nV + na + i * n, n).transpose() + rS * dS;
    }
  }

  // alpha_i = zeta_i.u + alphabar_i, with gradient rows
  void alphas(const VectorXd& u, VectorXd& vals, MatrixXd& grads) const {
    alphabar(u, vals, grads);
    for (int i = 0; i < n_ - 1; ++i) {
      vals[i] += zetas_.col(i).dot(u);
      grads.row(i) += zetas_.col(i).transpose();
    }
  }

  double delta0() const { return delta0_; }

 private:
  const SystemSpec* spec_ = nullptr;
  int n_ = 0, k0_ = 0;
  double delta0_ = 0;
  VectorXd gamma0_;
  MatrixXd zetas_;  // columns
};

inline RiemannInvariantSet build_riemann_invariants(const SystemSpec& spec,
                                                    double delta0) {
  if (spec.n == 1) return RiemannInvariantSet(spec, delta0);
  RiemannInvariantSet inv(spec, delta0);
  // spot-validate (B-2) on a small ball: grad(alpha_i).gamma_{i0} ~ 0
  double worst = 0;
  for (int trial = 0; trial < 12; ++trial) {
    VectorXd u = VectorXd::Zero(spec.n);
    for (int k = 0; k < spec.n; ++k)
      u[k] = delta0 * 0.7 * std::sin(1.7 * (trial + 1) + 2.3 * k);
    if (u.norm() > delta0) u *= delta0 / u.norm();
    VectorXd vals;
    MatrixXd grads;
    inv.alphas(u, vals, grads);
    VectorXd g = eigendecompose(spec, u).right_vecs.col(spec.i0 - 1);
    for (int i = 0; i < spec.n - 1; ++i)
      worst = std::max(worst, std::abs(grads.row(i).dot(g)));
  }
  if (worst > 1e-7)
    throw ResidualTooLarge("Riemann invariant residual grad(alpha).gamma", worst);
  return inv;
}

struct ReductionNormalization {
  double shift = 0.0;  // mu_n(0): Galilean translation
  double scale = 1.0;  // d(mu_n)/d(w_n)(0): spatial rescaling
};

class ReducedSystem {
 public:
  ReducedSystem() = default;

  ReducedSystem(const SystemSpec& spec, RiemannInvariantSet inv)
      : spec_(&spec), inv_(std::move(inv)), n_(spec.n), k0_(spec.i0 - 1) {
    const int n = n_;
    if (n == 1) {
      Bfull_ = MatrixXd::Identity(1, 1);
      J0_ = MatrixXd::Identity(1, 1);
      J0inv_ = J0_;
      return;
    }
    // G(0) and the diagonalizing block matrix C = B_{n-1}
    MatrixXd Jv0 = jac_v(VectorXd::Zero(n));
    MatrixXd G0 = Jv0 * spec.flux(VectorXd::Zero(n)) * Jv0.inverse();
    MatrixXd G0block = G0.topLeftCorner(n - 1, n - 1);
    EigenStructure es = eigendecompose_matrix(G0block, VectorXd::Zero(n));
    MatrixXd C = es.right_vecs.inverse();

    // b_n kills the bottom-row off-diagonal of A at w = 0:
    //   b^T (Gbar(0) - g_nn(0) I) = -g_r(0)^T C^{-1}
    double gnn0 = G0(n - 1, n - 1);
    Eigen::RowVectorXd gr0 = G0.row(n - 1).head(n - 1);
    Eigen::RowVectorXd rhs = -gr0 * es.right_vecs;  // = -g_r^T C^{-1}
    VectorXd bn(n - 1);
    for (int i = 0; i < n - 1; ++i) {
      double d = es.lambdas[i] - gnn0;
      if (std::abs(d) < 1e-10) throw SingularCorrection();
      bn[i] = rhs[i] / d;
    }

    Bfull_ = MatrixXd::Identity(n, n);
    Bfull_.topLeftCorner(n - 1, n - 1) = C;
    Bfull_.row(n - 1).head(n - 1) = bn.transpose() * C;
    J0_ = Bfull_ * Jv0;
    J0inv_ = J0_.inverse();
  }

  int n() const { return n_; }
  int i0() const { return k0_ + 1; }
  const SystemSpec& spec() const { return *spec_; }
  const ReductionNormalization& normalization() const { return norm_; }

  VectorXd u_to_w(const VectorXd& u) const {
    if (n_ == 1) return u;
    VectorXd av;
    MatrixXd ag;
    inv_.alphas(u, av, ag);
    VectorXd v(n_);
    v.head(n_ - 1) = av;
    v[n_ - 1] = inv_.gamma0().dot(u);
    return Bfull_ * v;
  }

  MatrixXd jac_w(const VectorXd& u) const {
    if (n_ == 1) return MatrixXd::Identity(1, 1);
    return Bfull_ * jac_v(u);
  }

  // damped Newton; throws NewtonFailure when no convergence inside the box
  VectorXd w_to_u(const VectorXd& w) const {
    if (n_ == 1) return w;
    VectorXd u = J0inv_ * w;
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 40; ++it) {
      VectorXd r = u_to_w(u) - w;
      res = r.norm();
      if (res < 1e-12 * (1.0 + w.norm())) return u;
      VectorXd du = jac_w(u).partialPivLu().solve(r);
      double lam = 1.0;
      for (int half = 0; half < 6; ++half) {
        VectorXd cand = u - lam * du;
        if (cand.norm() > spec_->state_box) {
          lam *= 0.5;
          continue;
        }
        if ((u_to_w(cand) - w).norm() < res) {
          u = cand;
          break;
        }
        lam *= 0.5;
        if (half == 5) u = cand;
      }
    }
    throw NewtonFailure(w);
  }

  MatrixXd A(const VectorXd& w) const {
    VectorXd u = w_to_u(w);
    MatrixXd J = jac_w(u);
    MatrixXd Araw = J * spec_->flux(u) * J.inverse();
    return (Araw - norm_.shift * MatrixXd::Identity(n_, n_)) / norm_.scale;
  }

  // reduced eigenvalues in the permuted indexing of Prop 2.1(1):
  // mu_i = lambda_i (i<i0), mu_i = lambda_{i+1} (i0<=i<n), mu_n = lambda_{i0}
  VectorXd mus(const VectorXd& w) const {
    EigenStructure es = eigendecompose_matrix(A(w), w);
    return permute_mus(es.lambdas);
  }

  VectorXd permute_mus(const VectorXd& sorted) const {
    VectorXd mu(n_);
    for (int i = 0; i < k0_; ++i) mu[i] = sorted[i];
    for (int i = k0_; i < n_ - 1; ++i) mu[i] = sorted[i + 1];
    mu[n_ - 1] = sorted[k0_];
    return mu;
  }

  // frames in mu-indexing with gamma_n = e_n enforced exactly
  void frames(const VectorXd& w, VectorXd& mu, MatrixXd& right,
              MatrixXd& left) const {
    EigenStructure es = eigendecompose_matrix(A(w), w);
    mu = permute_mus(es.lambdas);
    right.resize(n_, n_);
    for (int i = 0; i < k0_; ++i) right.col(i) = es.right_vecs.col(i);
    for (int i = k0_; i < n_ - 1; ++i) right.col(i) = es.right_vecs.col(i + 1);
    right.col(n_ - 1) = VectorXd::Unit(n_, n_ - 1);
    left = right.inverse();
  }

  // Remark 1.2 normalization; records (shift, scale) for mapping back.
  void normalize() {
    double h = 1e-3;
    auto ann = [&](double wn) {
      VectorXd w = VectorXd::Zero(n_);
      w[n_ - 1] = wn;
      return A(w)(n_ - 1, n_ - 1) * norm_.scale + norm_.shift;
    };
    double f0 = ann(0.0);
    // five-point stencil for the slope
    double d = (ann(-2 * h) - 8 * ann(-h) + 8 * ann(h) - ann(2 * h)) / (12 * h);
    if (std::abs(d) < 1e-8) throw DegenerateScale();
    norm_.shift = f0;
    norm_.scale = d;
  }

 private:
  MatrixXd jac_v(const VectorXd& u) const {
    VectorXd av;
    MatrixXd ag;
    inv_.alphas(u, av, ag);
    MatrixXd J(n_, n_);
    J.topRows(n_ - 1) = ag;
    J.row(n_ - 1) = inv_.gamma0().transpose();
    return J;
  }

  const SystemSpec* spec_ = nullptr;
  RiemannInvariantSet inv_;
  int n_ = 1, k0_ = 0;
  MatrixXd Bfull_, J0_, J0inv_;
  ReductionNormalization norm_;
};

inline ReducedSystem assemble_reduction(const SystemSpec& spec,
                                        RiemannInvariantSet inv) {
  return ReducedSystem(spec, std::move(inv));
}

inline ReducedSystem& normalize_frame(ReducedSystem& rs) {
  rs.normalize();
  return rs;
}

}  // namespace shocklab
