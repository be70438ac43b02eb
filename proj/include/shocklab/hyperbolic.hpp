#pragma once

// Quasilinear system description and its eigenstructure: wave speeds,
// bi-orthonormal eigenvector frames, strict hyperbolicity and genuine
// nonlinearity checks.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shocklab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SystemSpec {
  int n = 1;
  // u -> F(u), n x n; must be C^2 on the state box
  std::function<MatrixXd(const VectorXd&)> flux;
  int i0 = 1;              // 1-based index of the genuinely nonlinear speed
  double state_box = 1.0;  // hypercube/ball radius of validity
  std::string name = "custom";
};

struct EigenStructure {
  VectorXd lambdas;   // ascending
  MatrixXd right_vecs;  // columns gamma_i, unit norm, sign-fixed
  MatrixXd left_vecs;   // rows ell_i with ell_i . gamma_j = delta_ij
  double gap = 0;       // min consecutive eigenvalue separation
};

struct ComplexEigenvalues : std::runtime_error {
  VectorXd sample;
  explicit ComplexEigenvalues(VectorXd u)
      : std::runtime_error("complex eigenvalues: system not hyperbolic here"),
        sample(std::move(u)) {}
};

struct EigenvalueCollision : std::runtime_error {
  VectorXd sample;
  double gap;
  EigenvalueCollision(VectorXd u, double g)
      : std::runtime_error("eigenvalue gap below tolerance"),
        sample(std::move(u)),
        gap(g) {}
};

struct SignFlipUnresolved : std::runtime_error {
  SignFlipUnresolved()
      : std::runtime_error("eigenvector sign continuity lost along path") {}
};

// Sign convention: the largest-magnitude entry of each right eigenvector is
// made positive (first such entry on ties). Keeps finite-difference
// eigenvector paths from flipping spuriously.
inline void fix_sign(Eigen::Ref<VectorXd> v) {
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  if (v[imax] < 0) v = -v;
}

inline EigenStructure eigendecompose_matrix(const MatrixXd& F,
                                            const VectorXd& at) {
  const int n = static_cast<int>(F.rows());
  EigenStructure es;
  if (n == 1) {
    es.lambdas = VectorXd::Constant(1, F(0, 0));
    es.right_vecs = MatrixXd::Identity(1, 1);
    es.left_vecs = MatrixXd::Identity(1, 1);
    es.gap = std::numeric_limits<double>::infinity();
    return es;
  }
  Eigen::EigenSolver<MatrixXd> solver(F, true);
  double rho = 0;
  for (int i = 0; i < n; ++i)
    rho = std::max(rho, std::abs(solver.eigenvalues()[i]));
  double imag_tol = 1e-9 * std::max(1.0, rho);
  for (int i = 0; i < n; ++i)
    if (std::abs(solver.eigenvalues()[i].imag()) > imag_tol)
      throw ComplexEigenvalues(at);

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return solver.eigenvalues()[a].real() < solver.eigenvalues()[b].real();
  });

  es.lambdas.resize(n);
  es.right_vecs.resize(n, n);
  for (int i = 0; i < n; ++i) {
    es.lambdas[i] = solver.eigenvalues()[order[i]].real();
    VectorXd v = solver.eigenvectors().col(order[i]).real();
    // residual imaginary part is below imag_tol by the check above
    v.normalize();
    fix_sign(v);
    es.right_vecs.col(i) = v;
  }
  es.gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < n; ++i)
    es.gap = std::min(es.gap, es.lambdas[i + 1] - es.lambdas[i]);
  double gap_tol = 1e-8 * std::max(1.0, rho);
  if (!(es.gap > gap_tol)) throw EigenvalueCollision(at, es.gap);

  // left rows from the inverse of the right matrix: ell_i . gamma_j = delta
  es.left_vecs = es.right_vecs.inverse();
  return es;
}

inline EigenStructure eigendecompose(const SystemSpec& spec, const VectorXd& u) {
  return eigendecompose_matrix(spec.flux(u), u);
}

struct HyperbolicityReport {
  double min_gap = std::numeric_limits<double>::infinity();
  VectorXd worst_point;
};

inline HyperbolicityReport check_strict_hyperbolicity(
    const SystemSpec& spec, const std::vector<VectorXd>& samples) {
  HyperbolicityReport rep;
  for (const auto& u : samples) {
    EigenStructure es = eigendecompose(spec, u);
    if (es.gap < rep.min_gap) {
      rep.min_gap = es.gap;
      rep.worst_point = u;
    }
  }
  return rep;
}

// grad lambda_i by central differences; step per the gap-aware convention.
inline VectorXd lambda_gradient(const SystemSpec& spec, const VectorXd& u,
                                int i /*0-based*/) {
  const int n = spec.n;
  double h = std::max(1e-6, 1e-7 * u.norm());
  VectorXd g(n);
  for (int k = 0; k < n; ++k) {
    VectorXd up = u, um = u;
    up[k] += h;
    um[k] -= h;
    double lp = eigendecompose(spec, up).lambdas[i];
    double lm = eigendecompose(spec, um).lambdas[i];
    g[k] = (lp - lm) / (2 * h);
  }
  return g;
}

// The scalar field grad lambda_i . gamma_i along a sample path, with
// eigenvector orientation carried continuously from sample to sample.
inline std::vector<double> genuine_nonlinearity_field(
    const SystemSpec& spec, int i /*1-based*/,
    const std::vector<VectorXd>& samples) {
  std::vector<double> field;
  field.reserve(samples.size());
  VectorXd prev;
  for (const auto& u : samples) {
    EigenStructure es = eigendecompose(spec, u);
    VectorXd gamma = es.right_vecs.col(i - 1);
    if (prev.size()) {
      double dot = prev.dot(gamma);
      if (std::abs(dot) < 0.1) throw SignFlipUnresolved();
      if (dot < 0) gamma = -gamma;
    }
    prev = gamma;
    field.push_back(lambda_gradient(spec, u, i - 1).dot(gamma));
  }
  return field;
}

}  // namespace shocklab
