#pragma once

#include "twolayer/core.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace twolayer {

struct EigenMode {
  double speed = 0.0;
  double nonlinearity = 0.0;
  double dispersion = 0.0;
  SmallVector vector;
  double theta = 1.0;
};

// P(U) d_t U + Q(U) d_x U = F with
//   P(U) = P_const + eps P1(U) - eps P_dxx d_x^2,
//   Q(U) = Q_const + eps Q1(U) - eps Q_dxx d_x^2.
struct OperatorSystem {
  int dimension = 4;
  double epsilon = 0.0;
  SmallMatrix P_const, P_dxx, Q_const, Q_dxx;
  LinearMatrixMap P1, Q1;
  std::string name;
};

struct SymmetricSystem {
  SmallMatrix S0, Sigma0, S2, Sigma2;
  LinearMatrixMap S1, Sigma1;
  double epsilon = 0.0;
  double K = 0.0;
  BoussinesqParameters params;

  OperatorSystem to_operator_system() const {
    OperatorSystem s;
    s.dimension = 4;
    s.epsilon = epsilon;
    s.P_const = S0;
    s.P_dxx = S2;
    s.P1 = S1;
    s.Q_const = Sigma0;
    s.Q_dxx = Sigma2;
    s.Q1 = Sigma1;
    s.name = "sym_bouss";
    return s;
  }
};

// Matrices of the non-symmetric parametrized family and the correction S~2.
struct BoussFamily {
  SmallMatrix A0, A1, A2, S_tilde2;
  LinearMatrixMap A;
};

struct WaveSpeeds {
  double c_plus;
  double c_minus;
};

inline WaveSpeeds wave_speeds(const FluidRegime& r) {
  r.validate();
  const double g = r.gamma, d = r.delta;
  const double disc = std::sqrt((1.0 - d) * (1.0 - d) + 4.0 * g * d);
  const double cp2 = (1.0 + d + disc) / (2.0 * d);
  const double cm2 = (1.0 + d - disc) / (2.0 * d);
  return {std::sqrt(cp2), std::sqrt(cm2)};
}

inline SmallMatrix free_surface_S0(const FluidRegime& r) {
  const double g = r.gamma;
  SmallMatrix S0(4, 4);
  S0 << g, g, 0, 0,
        g, 1, 0, 0,
        0, 0, g, 0,
        0, 0, 0, 1.0 / r.delta;
  return S0;
}

inline LinearMatrixMap free_surface_S1(const FluidRegime& r) {
  // S1(U) = [[0,0,g v1,0],[0,0,0,v2],[g v1,0,g eta1,0],[0,v2,0,eta2]]
  const double g = r.gamma;
  LinearMatrixMap S1(4);
  S1.on_basis(0)(2, 2) = g;
  S1.on_basis(1)(3, 3) = 1.0;
  S1.on_basis(2)(0, 2) = g;
  S1.on_basis(2)(2, 0) = g;
  S1.on_basis(3)(1, 3) = 1.0;
  S1.on_basis(3)(3, 1) = 1.0;
  return S1;
}

inline BoussFamily bouss_family_matrices(const FluidRegime& r, const BoussinesqParameters& p) {
  r.validate();
  p.validate();
  const double g = r.gamma, d = r.delta;
  const auto& L = p.lambda;
  const double beta1 = 1.0 / 3.0 - p.b1;
  const double alpha1 = 1.0 / (2.0 * d) - p.a1;
  const double alpha2 = 1.0 / (3.0 * d * d) - p.a2;
  const double beta2 = p.a2 + g / d;

  BoussFamily f;
  f.A0.resize(4, 4);
  f.A0 << 0, 0, 1, 0,
          0, 0, 0, 1.0 / d,
          1, 1, 0, 0,
          g, 1, 0, 0;

  f.A1.resize(4, 4);
  f.A1 << 0, 0, -L[0] * beta1, -L[1] * alpha1,
          0, 0, 0, -L[1] * alpha2 / d,
          -L[2] * p.b1 - L[3] * g * p.a1, -L[2] * p.b1 - L[3] * p.a1, 0, 0,
          -L[3] * g * beta2 - L[2] * g / 2.0, -L[3] * beta2 - L[2] * g / 2.0, 0, 0;

  f.A2.resize(4, 4);
  f.A2 << (1 - L[0]) * beta1, d * (1 - L[1]) * alpha1, 0, 0,
          0, (1 - L[1]) * alpha2, 0, 0,
          0, 0, (1 - L[2]) * p.b1, (1 - L[3]) * p.a1,
          0, 0, (1 - L[2]) * g / 2.0, (1 - L[3]) * beta2;

  // A(U) = [[v1,0,eta1,0],[0,v2,0,eta2],[0,0,v1,0],[0,0,0,v2]]
  f.A = LinearMatrixMap(4);
  f.A.on_basis(0)(0, 2) = 1.0;
  f.A.on_basis(1)(1, 3) = 1.0;
  f.A.on_basis(2)(0, 0) = 1.0;
  f.A.on_basis(2)(2, 2) = 1.0;
  f.A.on_basis(3)(1, 1) = 1.0;
  f.A.on_basis(3)(3, 3) = 1.0;

  const double a = g * ((1 - L[1]) * alpha2 - (1 - L[0]) * beta1);
  const double b = g * (1 - L[1]) * alpha1;
  f.S_tilde2 = SmallMatrix::Zero(4, 4);
  f.S_tilde2(0, 0) = a + (d - 1 + g) * b;
  f.S_tilde2(1, 0) = a + d * b;
  f.S_tilde2(2, 2) = a + (d - 1) * b + g * (p.b1 * L[2] - L[0] * beta1);
  f.S_tilde2(2, 3) = b + g * L[3] * p.a1;
  f.S_tilde2(3, 2) = g * (L[2] / (2 * d) - L[1] * alpha1);
  f.S_tilde2(3, 3) = (L[3] * beta2 - L[1] * alpha2) / d;
  return f;
}

namespace detail {

inline SymmetricSystem assemble_symmetric(const FluidRegime& r, const BoussinesqParameters& p,
                                          const BoussFamily& f, double K) {
  SymmetricSystem s;
  s.S0 = free_surface_S0(r);
  s.S1 = free_surface_S1(r);
  const SmallMatrix St2 = f.S_tilde2 + K * s.S0;
  s.Sigma0 = s.S0 * f.A0;
  s.S2 = s.S0 * f.A2 + St2;
  s.Sigma2 = s.S0 * f.A1 + St2 * f.A0;
  s.Sigma1 = s.S1.right_multiplied(f.A0) + f.A.left_multiplied(s.S0);
  s.epsilon = r.epsilon;
  s.K = K;
  s.params = p;
  s.params.K = K;
  return s;
}

}  // namespace detail

inline SymmetricSystem build_symmetric_system(const FluidRegime& r,
                                              const BoussinesqParameters& p = {}) {
  const BoussFamily f = bouss_family_matrices(r, p);
  const double s0_min = min_eigenvalue(free_surface_S0(r));
  const double target = 0.01 * s0_min;
  if (p.K) {
    SymmetricSystem s = detail::assemble_symmetric(r, p, f, *p.K);
    if (!(min_eigenvalue(s.S2) > 0.0))
      throw std::domain_error("S2 is not positive definite for K = " + std::to_string(*p.K) +
                              "; increase K");
    return s;
  }
  double K = 0.0;
  while (true) {
    SymmetricSystem s = detail::assemble_symmetric(r, p, f, K);
    if (min_eigenvalue(s.S2) >= target) return s;
    if (K >= 1024.0) break;
    K = (K == 0.0) ? 1.0 : 2.0 * K;
  }
  throw std::domain_error("S2 is not positive definite for any K <= 1024; increase K");
}

inline OperatorSystem build_system_BOUSS(const FluidRegime& r, const BoussinesqParameters& p = {}) {
  const BoussFamily f = bouss_family_matrices(r, p);
  OperatorSystem s;
  s.dimension = 4;
  s.epsilon = r.epsilon;
  s.P_const = SmallMatrix::Identity(4, 4);
  s.P_dxx = f.A2;
  s.P1 = LinearMatrixMap(4);
  s.Q_const = f.A0;
  s.Q_dxx = f.A1;
  s.Q1 = f.A;
  s.name = "bouss_family";
  return s;
}

inline OperatorSystem build_original_system(const FluidRegime& r) {
  r.validate();
  const double g = r.gamma, d = r.delta;
  OperatorSystem s;
  s.dimension = 4;
  s.epsilon = r.epsilon;
  s.P_const = SmallMatrix::Identity(4, 4);
  s.P_dxx = SmallMatrix::Zero(4, 4);
  s.P_dxx(2, 2) = 1.0 / 3.0;
  s.P_dxx(2, 3) = 1.0 / (2.0 * d);
  s.P_dxx(3, 2) = g / 2.0;
  s.P_dxx(3, 3) = (1.0 + 3.0 * g * d) / (3.0 * d * d);
  s.P1 = LinearMatrixMap(4);
  s.Q_const.resize(4, 4);
  s.Q_const << 0, 0, 1, 0,
               0, 0, 0, 1.0 / d,
               1, 1, 0, 0,
               g, 1, 0, 0;
  s.Q_dxx = SmallMatrix::Zero(4, 4);
  // d_x(eta1 u1), d_x(eta2 u2), u1 d_x u1, u2 d_x u2
  s.Q1 = bouss_family_matrices(r, BoussinesqParameters{}).A;
  s.name = "orig_bouss";
  return s;
}

// Velocity change linking the original system to the parametrized family:
// (u1, u2) = (I + eps B d_x^2)(v1, v2), B = [[beta1, alpha1], [0, alpha2]].
inline SmallMatrix velocity_change_matrix(const FluidRegime& r, const BoussinesqParameters& p = {}) {
  r.validate();
  p.validate();
  const double d = r.delta;
  SmallMatrix B(2, 2);
  B << 1.0 / 3.0 - p.b1, 1.0 / (2.0 * d) - p.a1,
       0.0, 1.0 / (3.0 * d * d) - p.a2;
  return B;
}

inline std::vector<EigenMode> free_surface_modes(const FluidRegime& r,
                                                 double tol = kDegeneracyTolerance) {
  const auto [cp, cm] = wave_speeds(r);
  const double g = r.gamma, d = r.delta;
  const double cp2 = cp * cp, cm2 = cm * cm;
  const double gap = cp2 - cm2;
  const double crit = 2.0 * (1.0 - g) / (d + 1.0);
  if (std::abs(gap) < tol) throw DegenerateRegimeError("coincident wave speeds c+^2 = c-^2");
  if (std::abs(cp2 - 1.0) < tol || std::abs(cm2 - 1.0) < tol)
    throw DegenerateRegimeError("wave speed c^2 = 1");
  if (std::abs(cp2 - crit) < tol || std::abs(cm2 - crit) < tol)
    throw DegenerateRegimeError("dispersion denominator c^2 - 2(1-gamma)/(delta+1) vanishes");

  auto theta = [&](double c2) { return std::sqrt(2.0 * d * gap * std::abs(c2 - 1.0)); };
  auto lambda = [&](double c2, double th) {
    return 1.5 * ((2.0 - d) * c2 + d - 1.0 / d - (1.0 - g)) / (th * gap);
  };
  auto mu = [&](double c, double c2) {
    const double k1 = 1.0 + 3.0 * g / d + 1.0 / (d * d);
    return (c / 6.0) * (k1 * (c2 - (1.0 - g) / (d + 1.0)) - c2 / d) / (c2 - crit);
  };

  const double thp = theta(cp2), thm = theta(cm2);
  const double lp = lambda(cp2, thp), lm = lambda(cm2, thm);
  const double mp = mu(cp, cp2), mm = mu(cm, cm2);

  auto vec = [](double a, double b, double c, double e, double th) {
    SmallVector v(4);
    v << a / th, b / th, c / th, e / th;
    return v;
  };
  std::vector<EigenMode> modes(4);
  modes[0] = {cp, lp, mp, vec(1 / cp, cp - 1 / cp, 1, d * cp2 - d, thp), thp};
  modes[1] = {-cp, lp, -mp, vec(-1 / cp, 1 / cp - cp, 1, d * cp2 - d, thp), thp};
  modes[2] = {cm, lm, mm, vec(-1 / cm, 1 / cm - cm, -1, d - d * cm2, thm), thm};
  modes[3] = {-cm, lm, -mm, vec(1 / cm, cm - 1 / cm, -1, d - d * cm2, thm), thm};
  return modes;
}

struct RigidLidModes {
  double c, lambda, mu, lambda_interface;
  SmallVector e_plus, e_minus;
  // Symmetrizer of the linear rigid-lid system; e+- are orthonormal for it.
  SmallMatrix S0;

  std::vector<EigenMode> modes() const {
    return {EigenMode{c, lambda, mu, e_plus, 1.0}, EigenMode{-c, lambda, -mu, e_minus, 1.0}};
  }
};

inline RigidLidModes rigid_lid_modes(const FluidRegime& r, double tol = kDegeneracyTolerance) {
  r.validate();
  const double g = r.gamma, d = r.delta;
  if (1.0 - g < tol) throw DegenerateRegimeError("rigid lid: gamma too close to 1");
  RigidLidModes m;
  m.c = std::sqrt((1.0 - g) / (g + d));
  m.lambda_interface = 1.5 * m.c * (d * d - g) / (g + d);
  m.lambda = m.lambda_interface / std::sqrt(2.0 * (1.0 - g));
  m.mu = (m.c / 6.0) * (1.0 + g * d) / (d * (g + d));
  const double s = 1.0 / std::sqrt(2.0);
  m.e_plus.resize(2);
  m.e_minus.resize(2);
  m.e_plus << s / std::sqrt(1.0 - g), s * std::sqrt(g + d);
  m.e_minus << -s / std::sqrt(1.0 - g), s * std::sqrt(g + d);
  m.S0 = SmallMatrix::Zero(2, 2);
  m.S0(0, 0) = 1.0 - g;
  m.S0(1, 1) = 1.0 / (g + d);
  return m;
}

struct RigidLidCoefficients {
  double a, b, c, d, nonlinear;
};

inline RigidLidCoefficients rigid_lid_coefficients(const FluidRegime& r, double theta1,
                                                   double theta2, double beta) {
  r.validate();
  if (theta1 < 0.0) throw std::invalid_argument("theta1 must be nonnegative");
  if (theta2 > 1.0) throw std::invalid_argument("theta2 must be at most 1");
  if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
  const double g = r.gamma, d = r.delta;
  const double base = (1.0 + g * d) / (3.0 * d * (g + d));
  RigidLidCoefficients k;
  k.a = ((1.0 - theta1) * base - beta) / (g + d);
  k.b = theta1 * base;
  k.c = beta * theta2;
  k.d = beta * (1.0 - theta2);
  k.nonlinear = (d * d - g) / ((g + d) * (g + d));
  return k;
}

// State (zeta, v): zeta interface elevation, v shear velocity.
inline OperatorSystem rigid_lid_system(const FluidRegime& r, double theta1 = 0.0,
                                       double theta2 = 0.0, double beta = 0.0) {
  const auto k = rigid_lid_coefficients(r, theta1, theta2, beta);
  const double g = r.gamma, d = r.delta;
  OperatorSystem s;
  s.dimension = 2;
  s.epsilon = r.epsilon;
  s.P_const = SmallMatrix::Identity(2, 2);
  s.P_dxx = SmallMatrix::Zero(2, 2);
  s.P_dxx(0, 0) = k.b;
  s.P_dxx(1, 1) = k.d;
  s.P1 = LinearMatrixMap(2);
  s.Q_const.resize(2, 2);
  s.Q_const << 0, 1.0 / (g + d),
               1.0 - g, 0;
  s.Q_dxx = SmallMatrix::Zero(2, 2);
  s.Q_dxx(0, 1) = -k.a;
  s.Q_dxx(1, 0) = -k.c * (1.0 - g);
  s.Q1 = LinearMatrixMap(2);
  s.Q1.on_basis(0)(0, 1) = k.nonlinear;
  s.Q1.on_basis(1)(0, 0) = k.nonlinear;
  s.Q1.on_basis(1)(1, 1) = k.nonlinear;
  s.name = "rigid_lid_bouss";
  return s;
}

}  // namespace twolayer
