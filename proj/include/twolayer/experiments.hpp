#pragma once

#include "twolayer/boussinesq.hpp"
#include "twolayer/kdv.hpp"
#include "twolayer/model_coefficients.hpp"
#include "twolayer/parallel.hpp"
#include "twolayer/regime_analysis.hpp"
#include "twolayer/spectral.hpp"
#include "twolayer/waves.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace twolayer {

enum class Model { KdVApprox, SymBouss, OrigBouss, RigidLidBouss, RigidLidKdV };

inline const char* to_string(Model m) {
  switch (m) {
    case Model::KdVApprox: return "kdv_approx";
    case Model::SymBouss: return "sym_bouss";
    case Model::OrigBouss: return "orig_bouss";
    case Model::RigidLidBouss: return "rigid_lid_bouss";
    default: return "rigid_lid_kdv";
  }
}

inline Model parse_model(const std::string& s) {
  for (Model m : {Model::KdVApprox, Model::SymBouss, Model::OrigBouss, Model::RigidLidBouss,
                  Model::RigidLidKdV})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown model '" + s + "'");
}

inline bool is_rigid_lid(Model m) { return m == Model::RigidLidBouss || m == Model::RigidLidKdV; }

struct InitialData {
  enum class Kind { Soliton, Bump, RigidLid };
  Kind kind = Kind::Soliton;
  // Soliton amplitudes per mode; empty means |M| = magnitude with the polarity sign.
  std::optional<std::array<double, 4>> M;
  double magnitude = 1.0;
  double center = 0.0;
  // Interface bump M/sqrt(1+(kappa x)^2); also eta0 for rigid-lid data.
  double bump_M = 1.0;
  double kappa = 1.0;
  // Shear velocity bump for rigid-lid data.
  double v_M = 0.0;
  double v_kappa = 1.0;
};

inline const char* to_string(InitialData::Kind k) {
  switch (k) {
    case InitialData::Kind::Soliton: return "soliton";
    case InitialData::Kind::Bump: return "algebraic_bump";
    default: return "rigid_lid";
  }
}

struct ValidateRow {
  double dx, dt, T, epsilon;
};

struct ExperimentConfig {
  FluidRegime regime{0.25, 1.0, 0.1};
  BoussinesqParameters params;
  double L = 120.0;
  double dx = 0.01;
  double dt = 0.01;
  double t_end = 1.0;
  Bootstrap bootstrap = Bootstrap::Euler;
  InitialData initial;
  std::vector<Model> models{Model::SymBouss, Model::KdVApprox};
  std::vector<double> snapshot_times;
  // Rigid-lid family parameters.
  double theta1 = 0.0, theta2 = 0.0, beta = 0.0;
  // Validity horizon: eps * T must not exceed this.
  double max_eps_t = 5.0;

  // compare / error-in-time
  std::vector<double> epsilons;
  double sample_dt = 1.0;
  double fit_t_min = 1.0;
  double horizon = 1.0;  // error-in-time runs to T = horizon / eps

  // validate
  std::vector<ValidateRow> validate_rows{{0.01, 0.01, 5.0, 0.2}, {0.02, 0.02, 10.0, 0.1},
                                         {0.05, 0.05, 20.0, 0.05}};
  std::vector<double> refinement_dx{0.04, 0.02, 0.01, 0.005};
  double refinement_T = 2.0;
  double refinement_epsilon = 0.1;

  // sweep / analyze maps
  std::vector<double> sweep_gamma;
  std::vector<double> sweep_delta;

  unsigned workers = 0;  // 0: TWOLAYER_WORKERS or hardware concurrency

  std::string csv_path;         // report CSV; empty: stdout
  std::string snapshot_prefix;  // snapshot files <prefix>_<model>_t<time>.csv

  unsigned worker_pool() const { return workers ? workers : worker_count(); }

  void check_horizon(double T, double eps) const {
    if (T * eps > max_eps_t * (1.0 + 1e-12))
      throw std::invalid_argument("eps*T = " + std::to_string(T * eps) +
                                  " exceeds the validity horizon " + std::to_string(max_eps_t));
  }

  void validate() const {
    regime.validate();
    params.validate();
    if (!(L > 0.0) || !(dx > 0.0) || !(dt > 0.0)) throw std::invalid_argument("L, dx, dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
    if (models.empty()) throw std::invalid_argument("at least one model is required");
    if (!(sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be positive");
    if (!(initial.kappa > 0.0) || !(initial.v_kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    for (double t : snapshot_times)
      if (t < 0.0 || t > t_end + 1e-12) throw std::invalid_argument("snapshot time outside [0, t_end]");
    check_horizon(t_end, regime.epsilon);
  }
};

struct ReportRow {
  double dx = 0, dt = 0, L = 0, T = 0, epsilon = 0;
  std::string model_a, model_b;
  double rel_l2_error = 0, wall_time_s = 0;
  std::optional<std::pair<double, double>> gamma_delta;  // sweep rows only
};

struct ExperimentReport {
  std::string experiment;
  std::vector<ReportRow> rows;
  // Derived numbers (orders, slopes, exponents), in insertion order.
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::string> warnings;

  double summary_value(const std::string& key) const {
    for (const auto& [k, v] : summary)
      if (k == key) return v;
    throw std::out_of_range("no summary entry '" + key + "'");
  }
};

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("slope fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::domain_error("slope fit: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline FluidRegime with_epsilon(FluidRegime r, double eps) {
  r.epsilon = eps;
  r.validate();
  return r;
}

}  // namespace detail

inline PeriodicGrid make_grid(const ExperimentConfig& cfg, double dx) {
  return PeriodicGrid::from_spacing(cfg.L, dx);
}

// (zeta, v) -> (-zeta, zeta, -v/(g+d), d v/(g+d)), the eps -> 0 correspondence.
inline StateField embed_rigid_lid(const StateField& Z, const FluidRegime& r) {
  if (Z.components != 2) throw std::invalid_argument("expected a rigid-lid (zeta, v) state");
  ScalarField zeta(Z.grid), v(Z.grid);
  for (std::size_t i = 0; i < Z.points(); ++i) {
    zeta[i] = Z.at(i, 0);
    v[i] = Z.at(i, 1);
  }
  return rigid_lid_initial_data(zeta, v, r);
}

inline std::array<double, 4> soliton_amplitudes(const InitialData& init,
                                                const std::vector<EigenMode>& modes) {
  return init.M ? *init.M : FourModeSolitons::polarity_amplitudes(modes, init.magnitude);
}

inline StateField initial_state(const InitialData& init, const FluidRegime& r,
                                const PeriodicGrid& grid, std::vector<std::string>* warnings = nullptr) {
  switch (init.kind) {
    case InitialData::Kind::Soliton: {
      const auto modes = free_surface_modes(r);
      FourModeSolitons s(soliton_amplitudes(init, modes), modes, r.epsilon, grid, init.center);
      if (warnings) warnings->insert(warnings->end(), s.warnings().begin(), s.warnings().end());
      return s.state(0.0);
    }
    case InitialData::Kind::Bump:
      return flat_surface_zero_velocity(algebraic_bump(init.bump_M, init.kappa, grid));
    default:
      return rigid_lid_initial_data(algebraic_bump(init.bump_M, init.kappa, grid),
                                    algebraic_bump(init.v_M, init.v_kappa, grid), r);
  }
}

inline StateField rigid_lid_state(const InitialData& init, const PeriodicGrid& grid) {
  if (init.kind == InitialData::Kind::Soliton)
    throw std::invalid_argument("rigid-lid models need algebraic_bump or rigid_lid initial data");
  const ScalarField eta = algebraic_bump(init.bump_M, init.kappa, grid);
  const ScalarField v = init.kind == InitialData::Kind::RigidLid
                            ? algebraic_bump(init.v_M, init.v_kappa, grid)
                            : ScalarField(grid);
  StateField Z(grid, 2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Z.at(i, 0) = eta[i];
    Z.at(i, 1) = v[i];
  }
  return Z;
}

// Runs one model from the shared initial data. Free-surface models return
// their native 4-component variables; rigid-lid models are embedded.
inline Trajectory<StateField> run_model(Model m, const ExperimentConfig& cfg, const FluidRegime& r,
                                        const PeriodicGrid& grid, const RunOptions& opt) {
  if (is_rigid_lid(m)) {
    const StateField Z0 = rigid_lid_state(cfg.initial, grid);
    Trajectory<StateField> t;
    if (m == Model::RigidLidBouss) {
      t = run_boussinesq(Z0, rigid_lid_system(r, cfg.theta1, cfg.theta2, cfg.beta), opt);
    } else {
      const RigidLidModes rl = rigid_lid_modes(r);
      t = run_kdv_approximation(Z0, rl.modes(), rl.S0, r.epsilon, opt);
    }
    for (auto& s : t.states) s = embed_rigid_lid(s, r);
    return t;
  }
  const StateField U0 = initial_state(cfg.initial, r, grid);
  switch (m) {
    case Model::KdVApprox:
      return run_kdv_approximation(U0, r, opt);
    case Model::SymBouss:
      return run_boussinesq(U0, build_symmetric_system(r, cfg.params).to_operator_system(), opt);
    default:
      return run_boussinesq(to_original_variables(U0, r, cfg.params), build_original_system(r), opt);
  }
}

// States of a model pair brought to common variables: whenever one side is
// the original system, the other is mapped to the original velocities.
inline std::pair<StateField, StateField> common_variables(Model a, const StateField& Ua, Model b,
                                                          const StateField& Ub, const FluidRegime& r,
                                                          const BoussinesqParameters& p) {
  if ((a == Model::OrigBouss) == (b == Model::OrigBouss)) return {Ua, Ub};
  if (a == Model::OrigBouss) return {Ua, to_original_variables(Ub, r, p)};
  return {to_original_variables(Ua, r, p), Ub};
}

inline RunOptions run_options(const ExperimentConfig& cfg, double dt, double T,
                              std::vector<double> outputs = {}) {
  RunOptions o;
  o.dt = dt;
  o.t_end = T;
  o.output_times = std::move(outputs);
  o.bootstrap = cfg.bootstrap;
  return o;
}

// Scheme validation: KdV approximation vs exact solitons and forced symmetric
// system vs the exact uncoupled trajectory, on the listed rows and on a dyadic
// refinement study.
inline ExperimentReport validate_schemes(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = "validate";
  struct Job {
    ValidateRow row;
    bool refinement;
  };
  std::vector<Job> jobs;
  for (const auto& r : cfg.validate_rows) jobs.push_back({r, false});
  for (double h : cfg.refinement_dx) jobs.push_back({{h, h, cfg.refinement_T, cfg.refinement_epsilon}, true});
  for (const auto& j : jobs) cfg.check_horizon(j.row.T, j.row.epsilon);

  std::vector<std::array<ReportRow, 2>> out(jobs.size());
  std::vector<std::vector<std::string>> warn(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t k) {
        const ValidateRow& v = jobs[k].row;
        const FluidRegime r = detail::with_epsilon(cfg.regime, v.epsilon);
        const PeriodicGrid grid = make_grid(cfg, v.dx);
        const auto modes = free_surface_modes(r);
        FourModeSolitons exact(soliton_amplitudes(cfg.initial, modes), modes, v.epsilon, grid,
                               cfg.initial.center);
        warn[k] = exact.warnings();
        const StateField U0 = exact.state(0.0);
        const StateField UT = exact.state(v.T);
        const RunOptions opt = run_options(cfg, v.dt, v.T);

        auto t0 = std::chrono::steady_clock::now();
        const StateField kdv = run_kdv_approximation(U0, r, opt).states.back();
        out[k][0] = {v.dx, v.dt, cfg.L, v.T, v.epsilon, "kdv_scheme", "exact_soliton",
                     relative_l2_error(kdv, UT), detail::seconds_since(t0), {}};

        t0 = std::chrono::steady_clock::now();
        const OperatorSystem sys = build_symmetric_system(r, cfg.params).to_operator_system();
        const StateField bou =
            run_boussinesq(U0, sys, opt, manufactured_forcing(sys, exact.trajectory())).states.back();
        out[k][1] = {v.dx, v.dt, cfg.L, v.T, v.epsilon, "sym_bouss_forced", "exact_kdv_approx",
                     relative_l2_error(bou, UT), detail::seconds_since(t0), {}};
      },
      cfg.worker_pool());

  for (std::size_t k = 0; k < jobs.size(); ++k) {
    rep.rows.push_back(out[k][0]);
    rep.rows.push_back(out[k][1]);
    for (auto& w : warn[k]) rep.warnings.push_back(w);
  }
  // Observed orders between consecutive refinement levels.
  const std::size_t first = cfg.validate_rows.size();
  for (int which = 0; which < 2; ++which) {
    const std::string name = which == 0 ? "order_kdv" : "order_bouss";
    for (std::size_t k = first + 1; k < jobs.size(); ++k) {
      const double e0 = out[k - 1][which].rel_l2_error, e1 = out[k][which].rel_l2_error;
      const double h0 = jobs[k - 1].row.dx, h1 = jobs[k].row.dx;
      rep.summary.emplace_back(name + "_dx" + format_number(h1), std::log(e0 / e1) / std::log(h0 / h1));
    }
  }
  return rep;
}

// Pairwise model gaps at fixed T across epsilons; the first model is the reference.
inline ExperimentReport compare_models(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = "compare";
  if (cfg.models.size() < 2) throw std::invalid_argument("compare needs at least two models");
  const std::vector<double> eps = cfg.epsilons.empty() ? std::vector<double>{0.1, 0.05, 0.01} : cfg.epsilons;
  for (double e : eps) cfg.check_horizon(cfg.t_end, e);
  const PeriodicGrid grid = make_grid(cfg, cfg.dx);
  const std::size_t nm = cfg.models.size();

  std::vector<StateField> finals(eps.size() * nm);
  std::vector<double> walls(eps.size() * nm);
  parallel_for(
      finals.size(),
      [&](std::size_t k) {
        const FluidRegime r = detail::with_epsilon(cfg.regime, eps[k / nm]);
        const auto t0 = std::chrono::steady_clock::now();
        finals[k] = run_model(cfg.models[k % nm], cfg, r, grid, run_options(cfg, cfg.dt, cfg.t_end))
                        .states.back();
        walls[k] = detail::seconds_since(t0);
      },
      cfg.worker_pool());

  const Model a = cfg.models[0];
  for (std::size_t j = 1; j < nm; ++j) {
    const Model b = cfg.models[j];
    std::vector<double> errs;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const FluidRegime r = detail::with_epsilon(cfg.regime, eps[i]);
      const auto [Ua, Ub] = common_variables(a, finals[i * nm], b, finals[i * nm + j], r, cfg.params);
      const double err = relative_l2_error(Ub, Ua);
      errs.push_back(err);
      rep.rows.push_back({cfg.dx, cfg.dt, cfg.L, cfg.t_end, eps[i], to_string(a), to_string(b), err,
                          walls[i * nm] + walls[i * nm + j], {}});
    }
    if (eps.size() >= 2)
      rep.summary.emplace_back(std::string("slope_") + to_string(a) + "_vs_" + to_string(b),
                               loglog_slope(eps, errs));
  }
  return rep;
}

// Gap between the first two models sampled in time up to T = horizon/eps.
inline ExperimentReport error_in_time(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = "error-in-time";
  if (cfg.models.size() < 2) throw std::invalid_argument("error-in-time needs two models");
  const std::vector<double> eps =
      cfg.epsilons.empty() ? std::vector<double>{0.1, 0.05, 0.025, 0.01} : cfg.epsilons;
  const Model a = cfg.models[0], b = cfg.models[1];
  const PeriodicGrid grid = make_grid(cfg, cfg.dx);

  struct Series {
    std::vector<double> t, err;
    double wall = 0.0;
  };
  std::vector<Series> series(eps.size());
  std::vector<Trajectory<StateField>> runs(2 * eps.size());
  std::vector<double> walls(2 * eps.size());
  std::vector<std::vector<double>> samples(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw std::invalid_argument("error-in-time needs eps > 0");
    const double T = cfg.horizon / eps[i];
    cfg.check_horizon(T, eps[i]);
    for (long k = 0; static_cast<double>(k) * cfg.sample_dt <= T + 1e-9; ++k)
      samples[i].push_back(std::min(static_cast<double>(k) * cfg.sample_dt, T));
    if (samples[i].back() < T - 1e-9) samples[i].push_back(T);
  }
  parallel_for(
      runs.size(),
      [&](std::size_t k) {
        const std::size_t i = k / 2;
        const FluidRegime r = detail::with_epsilon(cfg.regime, eps[i]);
        const auto t0 = std::chrono::steady_clock::now();
        runs[k] = run_model(k % 2 == 0 ? a : b, cfg, r, grid,
                            run_options(cfg, cfg.dt, samples[i].back(), samples[i]));
        walls[k] = detail::seconds_since(t0);
      },
      cfg.worker_pool());

  for (std::size_t i = 0; i < eps.size(); ++i) {
    const FluidRegime r = detail::with_epsilon(cfg.regime, eps[i]);
    const auto& ta = runs[2 * i];
    const auto& tb = runs[2 * i + 1];
    std::vector<double> ft, fe;
    for (std::size_t s = 0; s < ta.times.size(); ++s) {
      const auto [Ua, Ub] = common_variables(a, ta.states[s], b, tb.states[s], r, cfg.params);
      const double err = relative_l2_error(Ub, Ua);
      rep.rows.push_back({cfg.dx, cfg.dt, cfg.L, ta.times[s], eps[i], to_string(a), to_string(b), err,
                          walls[2 * i] + walls[2 * i + 1], {}});
      if (ta.times[s] >= cfg.fit_t_min - 1e-9 && err > 0.0) {
        ft.push_back(ta.times[s]);
        fe.push_back(err);
      }
    }
    const std::string tag = "_eps" + format_number(eps[i]);
    if (ft.size() >= 2) rep.summary.emplace_back("growth_exponent" + tag, loglog_slope(ft, fe));
    if (!fe.empty()) rep.summary.emplace_back("error_at_horizon_over_eps" + tag, fe.back() / eps[i]);
  }
  return rep;
}

struct Snapshot {
  std::string model;
  double t = 0.0;
  StateField U;
};

struct SnapshotResult {
  std::vector<Snapshot> snapshots;
  ExperimentReport report;  // each model against the first one at every snapshot time
};

inline SnapshotResult snapshots(const ExperimentConfig& cfg) {
  cfg.validate();
  SnapshotResult res;
  res.report.experiment = "simulate";
  const PeriodicGrid grid = make_grid(cfg, cfg.dx);
  std::vector<double> times = cfg.snapshot_times;
  if (times.empty()) times = {0.0, cfg.t_end};
  std::vector<Trajectory<StateField>> runs(cfg.models.size());
  std::vector<double> walls(cfg.models.size());
  initial_state(cfg.initial, cfg.regime, grid, &res.report.warnings);
  parallel_for(
      cfg.models.size(),
      [&](std::size_t k) {
        const auto t0 = std::chrono::steady_clock::now();
        runs[k] = run_model(cfg.models[k], cfg, cfg.regime, grid, run_options(cfg, cfg.dt, cfg.t_end, times));
        walls[k] = detail::seconds_since(t0);
      },
      cfg.worker_pool());
  for (std::size_t k = 0; k < runs.size(); ++k)
    for (std::size_t s = 0; s < runs[k].times.size(); ++s)
      res.snapshots.push_back({to_string(cfg.models[k]), runs[k].times[s], runs[k].states[s]});
  const Model a = cfg.models[0];
  for (std::size_t j = 1; j < cfg.models.size(); ++j)
    for (std::size_t s = 0; s < runs[0].times.size(); ++s) {
      if (runs[0].times[s] == 0.0) continue;
      const auto [Ua, Ub] =
          common_variables(a, runs[0].states[s], cfg.models[j], runs[j].states[s], cfg.regime, cfg.params);
      res.report.rows.push_back({cfg.dx, cfg.dt, cfg.L, runs[0].times[s], cfg.regime.epsilon, to_string(a),
                                 to_string(cfg.models[j]), relative_l2_error(Ub, Ua), walls[0] + walls[j], {}});
    }
  return res;
}

struct RegimePoint {
  std::string label;
  double gamma, delta;
};

inline std::vector<RegimePoint> rigid_lid_points() {
  return {{"A", 0.25, 1.0}, {"B", 0.25, 2.0}, {"C", 0.9, 1.0}, {"D", 0.25, 0.25}};
}

inline ScalarField interface_trace(const StateField& U) {
  ScalarField f(U.grid);
  for (std::size_t i = 0; i < U.points(); ++i) f[i] = U.at(i, 1);
  return f;
}

struct RigidLidComparison {
  ExperimentReport report;  // one row per point, gamma_delta set
  std::vector<std::pair<std::string, SnapshotResult>> runs;
};

// Free-surface vs rigid-lid runs at points A-D from flat-surface data. The
// distance is between interface traces, relative to the rigid-lid trace.
inline RigidLidComparison rigid_lid_comparison(const ExperimentConfig& base) {
  RigidLidComparison out;
  out.report.experiment = "rigid-lid-points";
  Model free_m = Model::KdVApprox, rigid_m = Model::RigidLidKdV;
  bool have_free = false, have_rigid = false;
  for (Model m : base.models) {
    if (is_rigid_lid(m) && !have_rigid) rigid_m = m, have_rigid = true;
    if (!is_rigid_lid(m) && !have_free) free_m = m, have_free = true;
  }
  ExperimentConfig cfg = base;
  cfg.models = {free_m, rigid_m};
  if (cfg.initial.kind == InitialData::Kind::Soliton) cfg.initial.kind = InitialData::Kind::Bump;
  if (!cfg.snapshot_times.empty() && std::abs(cfg.snapshot_times.back() - cfg.t_end) > 1e-9)
    cfg.snapshot_times.push_back(cfg.t_end);
  const auto points = rigid_lid_points();
  std::vector<SnapshotResult> res(points.size());
  parallel_for(
      points.size(),
      [&](std::size_t k) {
        ExperimentConfig c = cfg;
        c.regime = FluidRegime::make(points[k].gamma, points[k].delta, cfg.regime.epsilon);
        c.workers = 1;
        res[k] = snapshots(c);
      },
      cfg.worker_pool());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& snaps = res[k].snapshots;
    const Snapshot *fs = nullptr, *rl = nullptr;
    for (const auto& s : snaps) {
      if (std::abs(s.t - cfg.t_end) > 1e-9) continue;
      if (s.model == to_string(free_m)) fs = &s;
      if (s.model == to_string(rigid_m)) rl = &s;
    }
    if (!fs || !rl) throw std::logic_error("rigid-lid comparison: missing final snapshot");
    const double d = relative_l2_error(interface_trace(fs->U), interface_trace(rl->U));
    ReportRow row{cfg.dx, cfg.dt, cfg.L, cfg.t_end, cfg.regime.epsilon, to_string(free_m), to_string(rigid_m), d,
                  res[k].report.rows.empty() ? 0.0 : res[k].report.rows.back().wall_time_s,
                  std::make_pair(points[k].gamma, points[k].delta)};
    out.report.rows.push_back(row);
    out.report.summary.emplace_back("interface_distance_" + points[k].label, d);
    out.runs.emplace_back(points[k].label, std::move(res[k]));
  }
  out.report.summary.emplace_back(
      "ratio_A_over_C", out.report.summary_value("interface_distance_A") / out.report.summary_value("interface_distance_C"));
  return out;
}

// Model gap at every (gamma, delta) of the sweep grid.
inline ExperimentReport sweep(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = "sweep";
  if (cfg.sweep_gamma.empty() || cfg.sweep_delta.empty())
    throw std::invalid_argument("sweep needs non-empty sweep.gamma and sweep.delta lists");
  if (cfg.models.size() < 2) throw std::invalid_argument("sweep needs two models");
  cfg.check_horizon(cfg.t_end, cfg.regime.epsilon);
  std::vector<std::pair<double, double>> pts;
  for (double g : cfg.sweep_gamma)
    for (double d : cfg.sweep_delta) pts.emplace_back(g, d);
  const PeriodicGrid grid = make_grid(cfg, cfg.dx);
  std::vector<ReportRow> rows(pts.size());
  parallel_for(
      pts.size(),
      [&](std::size_t k) {
        const FluidRegime r = FluidRegime::make(pts[k].first, pts[k].second, cfg.regime.epsilon);
        const auto t0 = std::chrono::steady_clock::now();
        const RunOptions opt = run_options(cfg, cfg.dt, cfg.t_end);
        const StateField Ua = run_model(cfg.models[0], cfg, r, grid, opt).states.back();
        const StateField Ub = run_model(cfg.models[1], cfg, r, grid, opt).states.back();
        const auto [ca, cb] = common_variables(cfg.models[0], Ua, cfg.models[1], Ub, r, cfg.params);
        rows[k] = {cfg.dx, cfg.dt, cfg.L, cfg.t_end, cfg.regime.epsilon, to_string(cfg.models[0]),
                   to_string(cfg.models[1]), relative_l2_error(cb, ca), detail::seconds_since(t0), pts[k]};
      },
      cfg.worker_pool());
  rep.rows = std::move(rows);
  return rep;
}

struct RegimeMapRow {
  double gamma, delta;
  RegimeClassification cls;
  RigidLidValidity validity;
};

inline std::vector<RegimeMapRow> regime_map(const std::vector<double>& gammas, const std::vector<double>& deltas) {
  std::vector<RegimeMapRow> rows;
  for (double g : gammas)
    for (double d : deltas) {
      const FluidRegime r = FluidRegime::make(g, d);
      rows.push_back({g, d, classify(r), rigid_lid_validity(r, 1.0)});
    }
  return rows;
}

// CSV output

inline constexpr const char* kReportHeader = "dx,dt,L,T,epsilon,model_a,model_b,rel_l2_error,wall_time_s";
inline constexpr const char* kSnapshotHeader = "x,eta1,eta2,v1,v2,zeta1,zeta2";
inline constexpr const char* kRegimeMapHeader =
    "gamma,delta,delta_c,slow_interface_polarity,slow_surface_polarity,surface_dominant_slow,"
    "fast_dominates_zero_velocity,surface_over_slow,fast_over_slow,rigid_lid_valid";

inline void write_report_csv(std::ostream& os, const ExperimentReport& rep) {
  const bool sweep_rows = !rep.rows.empty() && rep.rows.front().gamma_delta.has_value();
  os << (sweep_rows ? "gamma,delta," : "") << kReportHeader << '\n';
  os << std::setprecision(12);
  for (const auto& r : rep.rows) {
    if (sweep_rows) os << r.gamma_delta->first << ',' << r.gamma_delta->second << ',';
    os << r.dx << ',' << r.dt << ',' << r.L << ',' << r.T << ',' << r.epsilon << ',' << r.model_a << ','
       << r.model_b << ',' << r.rel_l2_error << ',' << r.wall_time_s << '\n';
  }
}

inline void write_snapshot_csv(std::ostream& os, const StateField& U) {
  if (U.components != 4) throw std::invalid_argument("snapshots are written as 4-component states");
  require_finite(U, "snapshot");
  os << kSnapshotHeader << '\n' << std::setprecision(12);
  for (std::size_t i = 0; i < U.points(); ++i) {
    const double e1 = U.at(i, 0), e2 = U.at(i, 1);
    os << U.grid.x(i) << ',' << e1 << ',' << e2 << ',' << U.at(i, 2) << ',' << U.at(i, 3) << ',' << e1 + e2 << ','
       << e2 << '\n';
  }
}

inline void write_regime_map_csv(std::ostream& os, const std::vector<RegimeMapRow>& rows) {
  os << kRegimeMapHeader << '\n' << std::setprecision(12);
  for (const auto& r : rows)
    os << r.gamma << ',' << r.delta << ',' << r.cls.delta_c << ',' << to_string(r.cls.slow_mode_polarity) << ','
       << to_string(r.cls.slow_mode_surface_polarity) << ',' << r.cls.surface_dominant_slow << ','
       << r.cls.fast_dominates_zero_velocity << ',' << r.validity.surface_over_slow << ','
       << r.validity.fast_over_slow << ',' << r.validity.valid << '\n';
}

template <class Writer>
inline void write_file(const std::filesystem::path& path, Writer&& w) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  w(os);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

inline std::string snapshot_filename(const std::string& prefix, const Snapshot& s) {
  return prefix + "_" + s.model + "_t" + format_number(s.t) + ".csv";
}

}  // namespace twolayer
