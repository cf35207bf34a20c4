#pragma once

#include "twolayer/cyclic_solver.hpp"
#include "twolayer/grid.hpp"
#include "twolayer/kdv.hpp"
#include "twolayer/model_coefficients.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace twolayer {

struct BoussState {
  StateField U_current;
  StateField U_half_prev;
  double time = 0.0;
  long step_index = 0;
};

// Sampler (t, x) -> forcing vector, written to out[0..dim).
using ForcingTerm = std::function<void(double, double, double*)>;

inline StateField sample_forcing(const ForcingTerm& f, double t, const PeriodicGrid& grid, int dim) {
  StateField F(grid, dim);
  for (std::size_t i = 0; i < grid.size(); ++i) f(t, grid.x(i), F.point(i));
  require_finite(F, "forcing");
  return F;
}

// Sigma~1(V) with Sigma1(U) V = Sigma~1(V) U.
inline SmallMatrix sigma1_adjoint(const LinearMatrixMap& sigma1, const SmallVector& V) {
  return sigma1.adjoint(V);
}

inline SmallMatrix sigma1_adjoint(const SymmetricSystem& s, const SmallVector& V) {
  return s.Sigma1.adjoint(V);
}

namespace detail {

inline Eigen::Map<const SmallVector> point_vec(const StateField& f, std::size_t i) {
  return Eigen::Map<const SmallVector>(f.point(i), f.components);
}

// Discrete Q(U) d_x U.
inline StateField flux_term(const StateField& U, const OperatorSystem& sys) {
  const StateField Ux = d1(U);
  const StateField Uxxx = d3(U);
  StateField out(U.grid, U.components);
  const double eps = sys.epsilon;
  for (std::size_t i = 0; i < U.points(); ++i) {
    const auto u = point_vec(U, i);
    const auto ux = point_vec(Ux, i);
    const auto uxxx = point_vec(Uxxx, i);
    SmallVector v = sys.Q_const * ux - eps * sys.Q_dxx * uxxx;
    if (eps != 0.0) v += eps * sys.Q1(u) * ux;
    for (int c = 0; c < U.components; ++c) out.at(i, c) = v[c];
  }
  return out;
}

// P(U) with P1 frozen at the given field, as a cyclic block operator.
inline void assemble_P(CyclicBlockBanded& A, const StateField& frozen, const OperatorSystem& sys) {
  const double eps = sys.epsilon;
  const double dx = frozen.grid.dx();
  const double s2 = 1.0 / (dx * dx);
  A.fill_zero();
  for (std::size_t i = 0; i < frozen.points(); ++i) {
    A.add_block(i, 0, sys.P_const);
    if (eps != 0.0) {
      A.add_block(i, 0, sys.P1(point_vec(frozen, i)), eps);
      A.add_block(i, 0, sys.P_dxx, 2.0 * eps * s2);
      A.add_block(i, 1, sys.P_dxx, -eps * s2);
      A.add_block(i, -1, sys.P_dxx, -eps * s2);
    }
  }
}

inline StateField time_derivative(const StateField& U, const OperatorSystem& sys,
                                  const StateField* F) {
  StateField rhs = flux_term(U, sys);
  for (std::size_t k = 0; k < rhs.values.size(); ++k)
    rhs.values[k] = (F ? F->values[k] : 0.0) - rhs.values[k];
  CyclicBlockBanded P(U.points(), U.components, 1);
  assemble_P(P, U, sys);
  CyclicBlockSolver lu;
  lu.factor(P);
  StateField out(U.grid, U.components);
  out.values = solve_checked(P, lu, rhs.values, true);
  return out;
}

}  // namespace detail

inline BoussState bootstrap(const StateField& U0, const OperatorSystem& sys, double dt,
                            const ForcingTerm& forcing = {}, Bootstrap method = Bootstrap::Euler) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (U0.components != sys.dimension) throw std::invalid_argument("state dimension mismatch");
  std::optional<StateField> F0;
  if (forcing) F0 = sample_forcing(forcing, 0.0, U0.grid, sys.dimension);
  StateField f = detail::time_derivative(U0, sys, F0 ? &*F0 : nullptr);
  if (method == Bootstrap::RK2) {
    StateField mid = U0;
    for (std::size_t k = 0; k < mid.values.size(); ++k) mid.values[k] += 0.25 * dt * f.values[k];
    std::optional<StateField> Fm;
    if (forcing) Fm = sample_forcing(forcing, 0.25 * dt, U0.grid, sys.dimension);
    f = detail::time_derivative(mid, sys, Fm ? &*Fm : nullptr);
  }
  BoussState s;
  s.U_current = U0;
  s.U_half_prev = U0;
  for (std::size_t k = 0; k < U0.values.size(); ++k) s.U_half_prev.values[k] -= 0.5 * dt * f.values[k];
  return s;
}

class BoussStepper {
 public:
  BoussStepper(const OperatorSystem& sys, const PeriodicGrid& grid, double dt,
               long residual_interval = kDefaultResidualInterval)
      : sys_(sys), grid_(grid), dt_(dt), residual_interval_(residual_interval),
        A_(grid.size(), sys.dimension, 2), G_(grid.size(), sys.dimension, 2),
        L_(grid.size(), sys.dimension, 2) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  }

  // F is the forcing sampled at the half step, or null.
  BoussState step(const BoussState& s, const StateField* F = nullptr) {
    require_same_grid(s.U_current.grid, grid_);
    const int m = sys_.dimension;
    const std::size_t n = grid_.size();
    const double dx = grid_.dx();
    const double eps = sys_.epsilon;

    StateField h(grid_, m);
    for (std::size_t k = 0; k < h.values.size(); ++k)
      h.values[k] = 2.0 * s.U_current.values[k] - s.U_half_prev.values[k];

    detail::assemble_P(A_, h, sys_);

    G_.fill_zero();
    const double c1 = 1.0 / (2.0 * dx);
    const double c3 = eps / (2.0 * dx * dx * dx);
    const bool nonlinear = eps != 0.0 && !sys_.Q1.is_zero();
    SmallVector si(m), qi(m);
    for (std::size_t i = 0; i < n; ++i) {
      G_.add_block(i, 1, sys_.Q_const, c1);
      G_.add_block(i, -1, sys_.Q_const, -c1);
      if (eps != 0.0) {
        G_.add_block(i, 2, sys_.Q_dxx, -c3);
        G_.add_block(i, 1, sys_.Q_dxx, 2.0 * c3);
        G_.add_block(i, -1, sys_.Q_dxx, -2.0 * c3);
        G_.add_block(i, -2, sys_.Q_dxx, c3);
      }
      if (nonlinear) {
        const double* hp = h.point(stencil::wrap(long(i) + 1, n));
        const double* hm = h.point(stencil::wrap(long(i) - 1, n));
        const double* hi = h.point(i);
        for (int c = 0; c < m; ++c) {
          si[c] = hi[c] + 0.5 * (hp[c] + hm[c]);
          qi[c] = (hp[c] - hm[c]) * c1;
        }
        const SmallMatrix Qs = sys_.Q1(si);
        G_.add_block(i, 1, Qs, eps / 3.0 * c1);
        G_.add_block(i, -1, Qs, -eps / 3.0 * c1);
        G_.add_block(i, 0, sys_.Q1.adjoint(qi), eps / 3.0);
      }
    }

    // L = A/dt + G/2, rhs = A U/dt - G U/2 + F
    L_ = A_;
    L_.combine(1.0 / dt_, G_, 0.5);
    std::vector<double> au = A_.apply(s.U_current.values);
    std::vector<double> gu = G_.apply(s.U_current.values);
    std::vector<double> rhs(au.size());
    for (std::size_t k = 0; k < rhs.size(); ++k)
      rhs[k] = au[k] / dt_ - 0.5 * gu[k] + (F ? F->values[k] : 0.0);

    BoussState next;
    next.U_current = StateField(grid_, m);
    try {
      lu_.factor(L_);
      const bool check = residual_interval_ > 0 && (s.step_index % residual_interval_ == 0);
      next.U_current.values = solve_checked(L_, lu_, rhs, check);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (Boussinesq step " +
                            std::to_string(s.step_index + 1) + ")",
                        s.step_index + 1);
    }
    next.U_half_prev = std::move(h);
    next.time = s.time + dt_;
    next.step_index = s.step_index + 1;
    return next;
  }

  double dt() const { return dt_; }

 private:
  OperatorSystem sys_;
  PeriodicGrid grid_;
  double dt_;
  long residual_interval_;
  CyclicBlockBanded A_, G_, L_;
  CyclicBlockSolver lu_;
};

inline BoussState bouss_step(const BoussState& s, const OperatorSystem& sys, double dt,
                             const ForcingTerm& forcing = {}) {
  BoussStepper stepper(sys, s.U_current.grid, dt);
  if (!forcing) return stepper.step(s);
  const StateField F = sample_forcing(forcing, s.time + 0.5 * dt, s.U_current.grid, sys.dimension);
  return stepper.step(s, &F);
}

inline BoussState bouss_step(const BoussState& s, const SymmetricSystem& sys, double dt,
                             const ForcingTerm& forcing = {}) {
  return bouss_step(s, sys.to_operator_system(), dt, forcing);
}

// E = 1/2 (P0 U,U) + eps/2 (P1(U) U,U) + eps/2 (P_dxx D1 U, D1 U)
inline double energy(const StateField& U, const OperatorSystem& sys) {
  const StateField Ux = d1(U);
  double e0 = 0.0, e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < U.points(); ++i) {
    const auto u = detail::point_vec(U, i);
    const auto ux = detail::point_vec(Ux, i);
    e0 += u.dot(sys.P_const * u);
    if (sys.epsilon != 0.0) {
      e1 += u.dot(sys.P1(u) * u);
      e2 += ux.dot(sys.P_dxx * ux);
    }
  }
  const double dx = U.grid.dx();
  const double E = 0.5 * dx * (e0 + sys.epsilon * (e1 + e2));
  if (E < 0.0)
    throw std::domain_error("negative energy: epsilon*|U| too large for the smallness condition");
  return E;
}

inline double energy(const StateField& U, const SymmetricSystem& sys) {
  return energy(U, sys.to_operator_system());
}

// (eta, u) of the original system from (eta, v) of the symmetric family.
inline StateField to_original_variables(const StateField& V, const FluidRegime& r,
                                        const BoussinesqParameters& p = {}) {
  if (V.components != 4) throw std::invalid_argument("expected a 4-component state");
  const SmallMatrix B = velocity_change_matrix(r, p);
  const StateField D = d2(V);
  StateField U = V;
  for (std::size_t i = 0; i < V.points(); ++i)
    for (int a = 0; a < 2; ++a)
      U.at(i, 2 + a) += r.epsilon * (B(a, 0) * D.at(i, 2) + B(a, 1) * D.at(i, 3));
  return U;
}

// Inverse of to_original_variables: solves (I + eps B D2) v = u.
inline StateField to_symmetric_variables(const StateField& U, const FluidRegime& r,
                                         const BoussinesqParameters& p = {}) {
  if (U.components != 4) throw std::invalid_argument("expected a 4-component state");
  const SmallMatrix B = velocity_change_matrix(r, p);
  StateField V = U;
  if (r.epsilon == 0.0) return V;
  const std::size_t n = U.points();
  const double s = r.epsilon / (U.grid.dx() * U.grid.dx());
  CyclicBlockBanded A(n, 2, 1);
  std::vector<double> rhs(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    A.add_block(i, 0, SmallMatrix::Identity(2, 2));
    A.add_block(i, 0, B, -2.0 * s);
    A.add_block(i, 1, B, s);
    A.add_block(i, -1, B, s);
    rhs[2 * i] = U.at(i, 2);
    rhs[2 * i + 1] = U.at(i, 3);
  }
  CyclicBlockSolver lu;
  lu.factor(A);
  const std::vector<double> v = solve_checked(A, lu, rhs, true);
  for (std::size_t i = 0; i < n; ++i) {
    V.at(i, 2) = v[2 * i];
    V.at(i, 3) = v[2 * i + 1];
  }
  return V;
}

struct Jet {
  SmallVector U, Ut, Ux, Uxxt, Uxxx;
};

using AnalyticTrajectory = std::function<Jet(double, double)>;

// F = P(U) U_t + Q(U) U_x with analytic derivatives of the exact trajectory.
inline ForcingTerm manufactured_forcing(const OperatorSystem& sys, AnalyticTrajectory exact) {
  return [sys, exact = std::move(exact)](double t, double x, double* out) {
    const Jet j = exact(t, x);
    const double eps = sys.epsilon;
    SmallVector F = sys.P_const * j.Ut + sys.Q_const * j.Ux;
    if (eps != 0.0) {
      F += eps * (sys.P1(j.U) * j.Ut - sys.P_dxx * j.Uxxt + sys.Q1(j.U) * j.Ux -
                  sys.Q_dxx * j.Uxxx);
    }
    for (int c = 0; c < sys.dimension; ++c) out[c] = F[c];
  };
}

inline Trajectory<StateField> run_boussinesq(const StateField& U0, const OperatorSystem& sys,
                                             const RunOptions& opt,
                                             const ForcingTerm& forcing = {},
                                             const Observer<StateField>& observer = {}) {
  require_finite(U0, "initial data");
  const long n_steps = detail::steps_for(opt.t_end, opt.dt, "t_end");
  const std::vector<long> outs = detail::output_steps(opt.output_times, opt.t_end, opt.dt);
  Trajectory<StateField> traj;
  BoussState s = bootstrap(U0, sys, opt.dt, forcing, opt.bootstrap);
  auto record = [&](const BoussState& st) {
    if (std::binary_search(outs.begin(), outs.end(), st.step_index)) {
      traj.times.push_back(static_cast<double>(st.step_index) * opt.dt);
      traj.states.push_back(st.U_current);
    }
    if (observer) {
      StepDiagnostics d{st.step_index, discrete_l2(st.U_current), energy(st.U_current, sys)};
      observer(static_cast<double>(st.step_index) * opt.dt, st.U_current, d);
    }
  };
  record(s);
  if (n_steps == 0) return traj;
  BoussStepper stepper(sys, U0.grid, opt.dt, opt.residual_interval);
  while (s.step_index < n_steps) {
    if (forcing) {
      const StateField F = sample_forcing(forcing, (static_cast<double>(s.step_index) + 0.5) * opt.dt,
                                          U0.grid, sys.dimension);
      s = stepper.step(s, &F);
    } else {
      s = stepper.step(s);
    }
    require_finite(s.U_current, "Boussinesq state at step " + std::to_string(s.step_index));
    record(s);
  }
  return traj;
}

}  // namespace twolayer
