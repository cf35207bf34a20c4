#pragma once

#include "twolayer/cyclic_solver.hpp"
#include "twolayer/grid.hpp"
#include "twolayer/model_coefficients.hpp"
#include "twolayer/parallel.hpp"
#include "twolayer/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace twolayer {

// d_t u + c d_x u + lambda u d_x u + mu d_x^3 u = 0
struct KdVCoefficients {
  double c = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
};

struct KdVState {
  ScalarField u_current;
  ScalarField u_half_prev;
  double time = 0.0;
  long step_index = 0;
};

enum class Bootstrap { Euler, RK2 };

struct StepDiagnostics {
  long step = 0;
  double l2 = 0.0;
  double energy = 0.0;
};

template <class Field>
struct Trajectory {
  std::vector<double> times;
  std::vector<Field> states;
};

template <class Field>
using Observer = std::function<void(double, const Field&, const StepDiagnostics&)>;

#ifdef NDEBUG
inline constexpr long kDefaultResidualInterval = 100;
#else
inline constexpr long kDefaultResidualInterval = 1;
#endif

inline ScalarField kdv_rhs(const ScalarField& u, const KdVCoefficients& k) {
  const ScalarField ux = d1(u);
  const ScalarField uxxx = d3(u);
  ScalarField f(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i)
    f[i] = -k.c * ux[i] - k.lambda * u[i] * ux[i] - k.mu * uxxx[i];
  return f;
}

inline KdVState bootstrap(const ScalarField& u0, const KdVCoefficients& k, double dt,
                          Bootstrap method = Bootstrap::Euler) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  KdVState s;
  s.u_current = u0;
  s.u_half_prev = ScalarField(u0.grid);
  ScalarField f = kdv_rhs(u0, k);
  if (method == Bootstrap::RK2) {
    ScalarField mid(u0.grid);
    for (std::size_t i = 0; i < u0.size(); ++i) mid[i] = u0[i] + 0.25 * dt * f[i];
    f = kdv_rhs(mid, k);
  }
  for (std::size_t i = 0; i < u0.size(); ++i) s.u_half_prev[i] = u0[i] - 0.5 * dt * f[i];
  return s;
}

class KdVStepper {
 public:
  KdVStepper(const PeriodicGrid& grid, const KdVCoefficients& k, double dt,
             long residual_interval = kDefaultResidualInterval)
      : grid_(grid), k_(k), dt_(dt), residual_interval_(residual_interval),
        G_(grid.size(), 1, 2), L_(grid.size(), 1, 2) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  }

  KdVState step(const KdVState& s) {
    require_same_grid(s.u_current.grid, grid_);
    const std::size_t n = grid_.size();
    const double dx = grid_.dx();
    ScalarField h(grid_);
    for (std::size_t i = 0; i < n; ++i) h[i] = 2.0 * s.u_current[i] - s.u_half_prev[i];

    G_.fill_zero();
    const double a1 = k_.c / (2.0 * dx);
    const double a3 = k_.mu / (2.0 * dx * dx * dx);
    const double l3 = k_.lambda / 3.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double hp = h[stencil::wrap(long(i) + 1, n)];
      const double hm = h[stencil::wrap(long(i) - 1, n)];
      const double si = h[i] + 0.5 * (hp + hm);
      const double qi = (hp - hm) / (2.0 * dx);
      G_(i, 1, 0, 0) = a1 - 2.0 * a3 + l3 * (0.5 * qi + si / (2.0 * dx));
      G_(i, -1, 0, 0) = -a1 + 2.0 * a3 + l3 * (0.5 * qi - si / (2.0 * dx));
      G_(i, 2, 0, 0) = a3;
      G_(i, -2, 0, 0) = -a3;
    }
    L_ = G_;
    L_.combine(0.5, G_, 0.0);
    for (std::size_t i = 0; i < n; ++i) L_(i, 0, 0, 0) += 1.0 / dt_;

    std::vector<double> rhs = G_.apply(s.u_current.values);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = s.u_current[i] / dt_ - 0.5 * rhs[i];

    KdVState next;
    try {
      lu_.factor(L_);
      const bool check = residual_interval_ > 0 && (s.step_index % residual_interval_ == 0);
      next.u_current = ScalarField(grid_, solve_checked(L_, lu_, rhs, check));
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (KdV step " + std::to_string(s.step_index + 1) + ")",
                        s.step_index + 1);
    }
    next.u_half_prev = std::move(h);
    next.time = s.time + dt_;
    next.step_index = s.step_index + 1;
    return next;
  }

 private:
  PeriodicGrid grid_;
  KdVCoefficients k_;
  double dt_;
  long residual_interval_;
  CyclicBlockBanded G_, L_;
  CyclicBlockSolver lu_;
};

inline KdVState step(const KdVState& s, const KdVCoefficients& k, double dt) {
  KdVStepper stepper(s.u_current.grid, k, dt);
  return stepper.step(s);
}

namespace detail {

inline long steps_for(double t, double dt, const char* what) {
  if (t < 0.0) throw std::invalid_argument(std::string(what) + " must be nonnegative");
  const double n = t / dt;
  const long r = std::lround(n);
  if (std::abs(n - static_cast<double>(r)) > 1e-6)
    throw std::invalid_argument(std::string(what) + " = " + std::to_string(t) +
                                " is not a multiple of dt");
  return r;
}

// Step indices at which output is recorded (always includes 0).
inline std::vector<long> output_steps(const std::vector<double>& times, double t_end, double dt) {
  std::vector<long> out{0};
  if (times.empty()) {
    out.push_back(steps_for(t_end, dt, "t_end"));
  } else {
    for (double t : times) {
      if (t > t_end + 1e-12) throw std::invalid_argument("output time beyond t_end");
      out.push_back(steps_for(t, dt, "output time"));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

struct RunOptions {
  double dt = 0.01;
  double t_end = 1.0;
  std::vector<double> output_times;  // empty: only t_end
  Bootstrap bootstrap = Bootstrap::Euler;
  long residual_interval = kDefaultResidualInterval;
};

inline Trajectory<ScalarField> run_kdv(const ScalarField& u0, const KdVCoefficients& k,
                                       const RunOptions& opt,
                                       const Observer<ScalarField>& observer = {}) {
  require_finite(u0, "initial data");
  const long n_steps = detail::steps_for(opt.t_end, opt.dt, "t_end");
  const std::vector<long> outs = detail::output_steps(opt.output_times, opt.t_end, opt.dt);
  Trajectory<ScalarField> traj;
  KdVState s = bootstrap(u0, k, opt.dt, opt.bootstrap);
  auto record = [&](const KdVState& st) {
    if (std::binary_search(outs.begin(), outs.end(), st.step_index)) {
      traj.times.push_back(static_cast<double>(st.step_index) * opt.dt);
      traj.states.push_back(st.u_current);
    }
    if (observer) {
      StepDiagnostics d{st.step_index, discrete_l2(st.u_current), 0.0};
      observer(static_cast<double>(st.step_index) * opt.dt, st.u_current, d);
    }
  };
  record(s);
  if (n_steps == 0) return traj;
  KdVStepper stepper(u0.grid, k, opt.dt, opt.residual_interval);
  while (s.step_index < n_steps) {
    s = stepper.step(s);
    record(s);
  }
  return traj;
}

inline std::vector<KdVCoefficients> kdv_coefficients(const std::vector<EigenMode>& modes,
                                                     double epsilon) {
  std::vector<KdVCoefficients> out;
  for (const auto& m : modes)
    out.push_back({m.speed, epsilon * m.nonlinearity, epsilon * m.dispersion});
  return out;
}

// Sum_i u_i e_i with u_i solving the i-th KdV equation (c_i, eps lambda_i, eps mu_i).
inline Trajectory<StateField> run_kdv_approximation(const StateField& U0,
                                                    const std::vector<EigenMode>& modes,
                                                    const SmallMatrix& S0, double epsilon,
                                                    const RunOptions& opt,
                                                    unsigned workers = 1) {
  const ModeAmplitudes amps = project(U0, modes, S0);
  const auto coeffs = kdv_coefficients(modes, epsilon);
  std::vector<Trajectory<ScalarField>> runs(modes.size());
  parallel_for(
      modes.size(),
      [&](std::size_t i) {
        bool zero = true;
        for (double v : amps[i].values) zero = zero && v == 0.0;
        if (zero) {
          // Zero data stays zero; skip the solve.
          const auto outs = detail::output_steps(opt.output_times, opt.t_end, opt.dt);
          for (long s : outs) {
            runs[i].times.push_back(static_cast<double>(s) * opt.dt);
            runs[i].states.push_back(amps[i]);
          }
          return;
        }
        runs[i] = run_kdv(amps[i], coeffs[i], opt);
      },
      workers);
  Trajectory<StateField> out;
  out.times = runs[0].times;
  for (std::size_t t = 0; t < out.times.size(); ++t) {
    ModeAmplitudes a;
    for (auto& r : runs) a.push_back(r.states[t]);
    out.states.push_back(reconstruct(a, modes));
  }
  return out;
}

inline Trajectory<StateField> run_kdv_approximation(const StateField& U0, const FluidRegime& r,
                                                    const RunOptions& opt, unsigned workers = 1) {
  return run_kdv_approximation(U0, free_surface_modes(r), free_surface_S0(r), r.epsilon, opt,
                               workers);
}

}  // namespace twolayer
