#include "twolayer/config_io.hpp"
#include "twolayer/twolayer.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace twolayer;

struct Overrides {
  std::string config;
  std::optional<double> gamma, delta, epsilon, L, dx, dt, t_end, K;
  std::vector<std::string> models;
  std::vector<double> epsilons, snapshot_times, sweep_gamma, sweep_delta;
  std::string out, snapshot_prefix, init;
  std::optional<unsigned> workers;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--gamma", o.gamma, "density ratio");
  app->add_option("--delta", o.delta, "depth ratio");
  app->add_option("--epsilon", o.epsilon, "long-wave parameter");
  app->add_option("--L", o.L, "domain length");
  app->add_option("--dx", o.dx, "grid spacing");
  app->add_option("--dt", o.dt, "time step");
  app->add_option("--t-end", o.t_end, "final time");
  app->add_option("--K", o.K, "positivity shift of S2 (default: automatic)");
  app->add_option("--models", o.models, "models, first one is the reference")->delimiter(',');
  app->add_option("--epsilons", o.epsilons, "epsilon list for multi-run suites")->delimiter(',');
  app->add_option("--snapshot-times", o.snapshot_times, "snapshot times")->delimiter(',');
  app->add_option("--init", o.init, "initial data type: soliton, algebraic_bump, rigid_lid");
  app->add_option("--sweep-gamma", o.sweep_gamma, "gamma grid")->delimiter(',');
  app->add_option("--sweep-delta", o.sweep_delta, "delta grid")->delimiter(',');
  app->add_option("-o,--out", o.out, "output CSV (default: stdout)");
  app->add_option("--snapshot-prefix", o.snapshot_prefix, "prefix for snapshot CSV files");
  app->add_option("--workers", o.workers, "worker threads (default: $TWOLAYER_WORKERS)");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.gamma) c.regime.gamma = *o.gamma;
  if (o.delta) c.regime.delta = *o.delta;
  if (o.epsilon) c.regime.epsilon = *o.epsilon;
  if (o.L) c.L = *o.L;
  if (o.dx) c.dx = *o.dx;
  if (o.dt) c.dt = *o.dt;
  if (o.t_end) c.t_end = *o.t_end;
  if (o.K) c.params.K = *o.K;
  if (!o.models.empty()) {
    c.models.clear();
    for (const auto& m : o.models) c.models.push_back(parse_model(m));
  }
  if (!o.epsilons.empty()) c.epsilons = o.epsilons;
  if (!o.snapshot_times.empty()) c.snapshot_times = o.snapshot_times;
  if (!o.sweep_gamma.empty()) c.sweep_gamma = o.sweep_gamma;
  if (!o.sweep_delta.empty()) c.sweep_delta = o.sweep_delta;
  if (!o.init.empty()) {
    if (o.init == "soliton") c.initial.kind = InitialData::Kind::Soliton;
    else if (o.init == "algebraic_bump") c.initial.kind = InitialData::Kind::Bump;
    else if (o.init == "rigid_lid") c.initial.kind = InitialData::Kind::RigidLid;
    else throw ConfigError("--init must be soliton, algebraic_bump or rigid_lid");
  }
  if (!o.out.empty()) c.csv_path = o.out;
  if (!o.snapshot_prefix.empty()) c.snapshot_prefix = o.snapshot_prefix;
  if (o.workers) c.workers = *o.workers;
  c.regime.validate();
  c.params.validate();
  return c;
}

// Report CSV to file (plus <csv>.json sidecar) or stdout; summary lines go
// to stdout when the CSV is a file and to stderr otherwise.
void emit(const ExperimentConfig& c, const ExperimentReport& rep) {
  std::ostream& info = c.csv_path.empty() ? std::cerr : std::cout;
  if (c.csv_path.empty()) {
    write_report_csv(std::cout, rep);
  } else {
    write_file(c.csv_path, [&](std::ostream& os) { write_report_csv(os, rep); });
    write_file(c.csv_path + ".json", [&](std::ostream& os) { os << provenance(c, rep).dump(2) << '\n'; });
    info << "wrote " << c.csv_path << " (" << rep.rows.size() << " rows)\n";
  }
  for (const auto& [k, v] : rep.summary) info << k << " = " << format_number(v) << '\n';
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
}

void write_snapshots(const std::string& prefix, const std::vector<Snapshot>& snaps) {
  for (const auto& s : snaps) {
    const std::string path = snapshot_filename(prefix, s);
    write_file(path, [&](std::ostream& os) { write_snapshot_csv(os, s.U); });
  }
}

int error_record(const std::string& kind, const std::string& msg, long step, int code) {
  Json j{{"error", kind}, {"message", msg}};
  if (step >= 0) j["step"] = step;
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer internal wave models: Boussinesq systems, KdV approximation, rigid lid"};
  app.require_subcommand(1);
  Overrides o;
  bool rigid_points = false;

  auto* coeffs = app.add_subcommand("coeffs", "print coefficients, modes and classification as JSON");
  auto* simulate = app.add_subcommand("simulate", "run the configured models and dump snapshots");
  auto* validate = app.add_subcommand("validate", "scheme validation against exact solitons");
  auto* compare = app.add_subcommand("compare", "model gaps at fixed T across epsilons");
  auto* eit = app.add_subcommand("error-in-time", "model gap sampled in time up to T = 1/epsilon");
  auto* analyze = app.add_subcommand("analyze", "regime classification; regime map CSV with a sweep grid");
  auto* sweep_cmd = app.add_subcommand("sweep", "model gap over a (gamma, delta) grid");
  for (auto* s : {coeffs, simulate, validate, compare, eit, analyze, sweep_cmd}) add_common(s, o);
  simulate->add_flag("--rigid-lid-points", rigid_points, "free surface vs rigid lid at points A-D");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const ExperimentConfig c = resolve(o);
    if (coeffs->parsed()) {
      std::cout << coefficients_json(c.regime, c.params).dump(2) << '\n';
    } else if (simulate->parsed()) {
      c.validate();
      const std::string prefix = c.snapshot_prefix.empty() ? "snapshot" : c.snapshot_prefix;
      if (rigid_points) {
        RigidLidComparison r = rigid_lid_comparison(c);
        for (const auto& [label, res] : r.runs) write_snapshots(prefix + "_" + label, res.snapshots);
        emit(c, r.report);
      } else {
        const SnapshotResult r = snapshots(c);
        write_snapshots(prefix, r.snapshots);
        emit(c, r.report);
      }
    } else if (validate->parsed()) {
      emit(c, validate_schemes(c));
    } else if (compare->parsed()) {
      emit(c, compare_models(c));
    } else if (eit->parsed()) {
      emit(c, error_in_time(c));
    } else if (sweep_cmd->parsed()) {
      emit(c, sweep(c));
    } else if (analyze->parsed()) {
      if (c.sweep_gamma.empty() || c.sweep_delta.empty()) {
        std::cout << coefficients_json(c.regime, c.params)["classification"].dump(2) << '\n';
      } else {
        const auto rows = regime_map(c.sweep_gamma, c.sweep_delta);
        if (c.csv_path.empty())
          write_regime_map_csv(std::cout, rows);
        else
          write_file(c.csv_path, [&](std::ostream& os) { write_regime_map_csv(os, rows); });
      }
    }
  } catch (const SolverError& e) {
    return error_record("solver_error", e.what(), e.step(), 3);
  } catch (const DegenerateRegimeError& e) {
    return error_record("degenerate_regime", e.what(), -1, 2);
  } catch (const PolarityError& e) {
    return error_record("polarity", e.what(), -1, 2);
  } catch (const std::invalid_argument& e) {
    return error_record("invalid_input", e.what(), -1, 2);
  } catch (const std::exception& e) {
    return error_record("error", e.what(), -1, 1);
  }
  return 0;
}
