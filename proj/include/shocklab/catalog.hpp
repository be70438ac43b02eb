#pragma once

// Built-in system catalog. Parameter overrides come from the config layer.

#include <map>
#include <stdexcept>
#include <string>

#include "shocklab/hyperbolic.hpp"

namespace shocklab {

using ParamMap = std::map<std::string, double>;

inline double param(const ParamMap& p, const std::string& k, double dflt) {
  auto it = p.find(k);
  return it == p.end() ? dflt : it->second;
}

// Scalar Burgers: F(u) = u.
inline SystemSpec make_burgers() {
  SystemSpec s;
  s.n = 1;
  s.i0 = 1;
  s.state_box = 10.0;
  s.name = "burgers";
  s.flux = [](const VectorXd& u) {
    MatrixXd F(1, 1);
    F(0, 0) = u[0];
    return F;
  };
  return s;
}

// Scalar with affine speed a + b u (normalization exercises).
inline SystemSpec make_scalar_affine(const ParamMap& p) {
  SystemSpec s;
  s.n = 1;
  s.i0 = 1;
  s.state_box = 10.0;
  s.name = "scalar-affine";
  double a = param(p, "a", 2.0), b = param(p, "b", 3.0);
  s.flux = [a, b](const VectorXd& u) {
    MatrixXd F(1, 1);
    F(0, 0) = a + b * u[0];
    return F;
  };
  return s;
}

// Constant-coefficient system, diagonal speeds c1..cn.
inline SystemSpec make_constant(const ParamMap& p) {
  SystemSpec s;
  s.n = static_cast<int>(param(p, "n", 3));
  s.i0 = static_cast<int>(param(p, "i0", 2));
  s.state_box = param(p, "state_box", 1.0);
  s.name = "constant";
  std::vector<double> speeds(s.n);
  for (int i = 0; i < s.n; ++i)
    speeds[i] = param(p, "c" + std::to_string(i + 1), -1.0 + 2.0 * i / std::max(1, s.n - 1));
  s.flux = [speeds](const VectorXd&) {
    int n = static_cast<int>(speeds.size());
    MatrixXd F = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) F(i, i) = speeds[i];
    return F;
  };
  return s;
}

// 1D isentropic Euler in (rho, v) about a constant background, p = K rho^g.
// State u is the perturbation (rho - rho0, v - v0).
inline SystemSpec make_euler(const ParamMap& p) {
  SystemSpec s;
  s.n = 2;
  s.i0 = static_cast<int>(param(p, "i0", 2));
  s.state_box = param(p, "state_box", 0.3);
  s.name = "euler";
  double rho0 = param(p, "rho0", 1.0);
  double v0 = param(p, "v0", 0.0);
  double K = param(p, "K", 1.0);
  double g = param(p, "gas_gamma", 2.0);
  s.flux = [rho0, v0, K, g](const VectorXd& u) {
    double rho = rho0 + u[0], v = v0 + u[1];
    double c2 = K * g * std::pow(rho, g - 1.0);
    MatrixXd F(2, 2);
    F << v, rho, c2 / rho, v;
    return F;
  };
  return s;
}

// Paper-style synthetic 3x3 with i0 = 2: F = P(u) D(u) P(u)^{-1} where the
// eigenvalues are prescribed (middle one genuinely nonlinear with a
// quadratic term, which drives the eps^{4/3} blowup-time scaling) and P is
// a mild state-dependent frame. Strictly hyperbolic on the state box.
inline SystemSpec make_synthetic3(const ParamMap& p) {
  SystemSpec s;
  s.n = 3;
  s.i0 = 2;
  s.state_box = param(p, "state_box", 0.75);
  s.name = "synthetic3";
  double c = param(p, "coupling", 0.2);
  double q = param(p, "quad", 0.3);
  s.flux = [c, q](const VectorXd& u) {
    double u1 = u[0], u2 = u[1], u3 = u[2];
    Eigen::Vector3d lam(-1.3 + 0.15 * u1 + 0.05 * u3,
                        0.15 + u2 + q * u2 * u2 + 0.08 * u1 - 0.06 * u3,
                        1.5 + 0.12 * u3 + 0.04 * u2);
    Eigen::Matrix3d P = Eigen::Matrix3d::Identity();
    P(0, 1) += c * u3;
    P(0, 2) += c * u2;
    P(1, 0) += c * u1;
    P(1, 2) += 0.5 * c * (u3 - u1);
    P(2, 0) += c * u2;
    P(2, 1) += c * u1;
    return MatrixXd(P * lam.asDiagonal() * P.inverse());
  };
  return s;
}

// A system already in the reduced normalized form (zero n-th column above
// the diagonal, diagonal at 0, a_33 = mu_3 with mu_3(0)=0, d/dw3 = 1).
// Fixed point of the reduction; also the fast backend for evolution tests.
inline SystemSpec make_reduced3(const ParamMap& p) {
  SystemSpec s;
  s.n = 3;
  s.i0 = 2;
  s.state_box = param(p, "state_box", 0.75);
  s.name = "reduced3";
  double q = param(p, "quad", 0.3);
  s.flux = [q](const VectorXd& w) {
    double w1 = w[0], w2 = w[1], w3 = w[2];
    MatrixXd A(3, 3);
    A << -1.3 + 0.1 * w1 + 0.05 * w3 * w3, 0.12 * w3 + 0.06 * w1 * w2, 0.0,
        0.09 * w2 + 0.04 * w3, 1.5 + 0.11 * w1 - 0.05 * w2, 0.0,
        0.08 * w2 + 0.05 * w3 * w3, 0.07 * w1 + 0.03 * w2,
        w3 + q * w3 * w3 + 0.06 * w1 - 0.04 * w2;
    return A;
  };
  return s;
}

inline SystemSpec make_system(const std::string& name, const ParamMap& p = {}) {
  if (name == "burgers") return make_burgers();
  if (name == "scalar-affine") return make_scalar_affine(p);
  if (name == "constant") return make_constant(p);
  if (name == "euler") return make_euler(p);
  if (name == "synthetic3") return make_synthetic3(p);
  if (name == "reduced3") return make_reduced3(p);
  throw std::invalid_argument("unknown system: " + name);
}

}  // namespace shocklab
