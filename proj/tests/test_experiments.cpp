#include "twolayer/config_io.hpp"
#include "twolayer/twolayer.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace twolayer;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.L = 60.0;
  c.dx = 0.1;
  c.dt = 0.1;
  c.t_end = 1.0;
  c.workers = 1;
  return c;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("loglog slope of exact powers") {
  CHECK_THAT(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}), WithinAbs(2.0, 1e-12));
  CHECK_THAT(loglog_slope({0.1, 0.01}, {0.5, 0.05}), WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(loglog_slope({1}, {1}), std::invalid_argument);
}

TEST_CASE("model names round trip") {
  for (Model m : {Model::KdVApprox, Model::SymBouss, Model::OrigBouss, Model::RigidLidBouss, Model::RigidLidKdV})
    CHECK(parse_model(to_string(m)) == m);
  CHECK_THROWS(parse_model("bouss"));
}

TEST_CASE("config parse, echo and re-parse") {
  const Json j = Json::parse(R"({
    "regime": {"gamma": 0.3, "delta": 1.5, "epsilon": 0.05},
    "grid": {"L": 80, "dx": 0.02},
    "dt": 0.02, "t_end": 4,
    "initial_data": {"type": "algebraic_bump", "M": 0.5, "kappa": 2},
    "models": ["orig_bouss", "kdv_approx"],
    "outputs": {"snapshot_times": [1, 4], "csv": "out/x.csv"},
    "epsilons": [0.1, 0.05]
  })");
  const ExperimentConfig c = parse_config(j);
  CHECK(c.regime.gamma == 0.3);
  CHECK(c.L == 80.0);
  CHECK(c.initial.kind == InitialData::Kind::Bump);
  CHECK(c.initial.bump_M == 0.5);
  CHECK(c.models.front() == Model::OrigBouss);
  CHECK(c.csv_path == "out/x.csv");
  const ExperimentConfig d = parse_config(to_json(c));
  CHECK(to_json(d) == to_json(c));
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH(parse_config(Json::parse(R"({"regime": {"gamma": 0.3, "delat": 1}})")),
                    ContainsSubstring("delat"));
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"models": ["nope"]})")), std::invalid_argument);
  ExperimentConfig c = small_config();
  c.t_end = 100.0;  // eps*T = 10 > 5
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("report CSV header and sweep prefix") {
  ExperimentReport rep;
  rep.rows.push_back({0.01, 0.01, 120, 1, 0.1, "sym_bouss", "kdv_approx", 0.5, 1.0, {}});
  std::ostringstream os;
  write_report_csv(os, rep);
  CHECK(first_line(os.str()) == "dx,dt,L,T,epsilon,model_a,model_b,rel_l2_error,wall_time_s");
  rep.rows.front().gamma_delta = std::make_pair(0.25, 1.0);
  std::ostringstream os2;
  write_report_csv(os2, rep);
  CHECK(first_line(os2.str()) == "gamma,delta,dx,dt,L,T,epsilon,model_a,model_b,rel_l2_error,wall_time_s");
}

TEST_CASE("snapshot CSV carries surface and interface") {
  const PeriodicGrid g(1.0, 8);
  StateField U(g, 4);
  U.at(0, 0) = 1.0;
  U.at(0, 1) = 2.0;
  std::ostringstream os;
  write_snapshot_csv(os, U);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header == "x,eta1,eta2,v1,v2,zeta1,zeta2");
  CHECK(row == "-0.5,1,2,0,0,3,2");
}

TEST_CASE("compare on a coarse grid") {
  ExperimentConfig c = small_config();
  c.models = {Model::SymBouss, Model::KdVApprox, Model::OrigBouss};
  c.epsilons = {0.1, 0.05};
  const ExperimentReport rep = compare_models(c);
  CHECK(rep.rows.size() == 4);
  for (const auto& r : rep.rows) {
    CHECK(r.rel_l2_error > 0.0);
    CHECK(r.rel_l2_error < 1.0);
  }
  // The KdV gap decays roughly like eps.
  CHECK_THAT(rep.summary_value("slope_sym_bouss_vs_kdv_approx"), WithinAbs(1.0, 0.5));
}

TEST_CASE("error-in-time sampling and summary keys") {
  ExperimentConfig c = small_config();
  c.epsilons = {0.5};
  c.horizon = 1.0;
  c.sample_dt = 0.5;
  const ExperimentReport rep = error_in_time(c);
  REQUIRE(rep.rows.size() == 5);
  CHECK(rep.rows.front().T == 0.0);
  CHECK(rep.rows.front().rel_l2_error < 1e-14);
  CHECK_THAT(rep.rows.back().T, WithinAbs(2.0, 1e-12));
  CHECK_NOTHROW(rep.summary_value("growth_exponent_eps0.5"));
  CHECK_NOTHROW(rep.summary_value("error_at_horizon_over_eps_eps0.5"));
}

TEST_CASE("snapshots in common variables") {
  ExperimentConfig c = small_config();
  c.initial.kind = InitialData::Kind::Bump;
  c.models = {Model::OrigBouss, Model::SymBouss};
  c.snapshot_times = {0.0, 1.0};
  const SnapshotResult r = snapshots(c);
  CHECK(r.snapshots.size() == 4);
  for (const auto& s : r.snapshots) CHECK(s.U.components == 4);
  CHECK(snapshot_filename("out/s", r.snapshots.front()) == "out/s_orig_bouss_t0.csv");
}

TEST_CASE("rigid-lid data and soliton guard") {
  const PeriodicGrid g(20.0, 100);
  InitialData init;
  init.kind = InitialData::Kind::RigidLid;
  const StateField Z = rigid_lid_state(init, g);
  CHECK(Z.components == 2);
  init.kind = InitialData::Kind::Soliton;
  CHECK_THROWS(rigid_lid_state(init, g));
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.1);
  const StateField E = embed_rigid_lid(Z, r);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(E.at(i, 0) + E.at(i, 1) == 0.0);
}

TEST_CASE("rigid-lid comparison at points A-D on a coarse grid") {
  ExperimentConfig c = small_config();
  c.t_end = 2.0;
  const RigidLidComparison r = rigid_lid_comparison(c);
  CHECK(r.report.rows.size() == 4);
  CHECK(r.runs.size() == 4);
  CHECK(r.report.summary_value("ratio_A_over_C") > 1.0);
}

TEST_CASE("sweep rows carry gamma and delta") {
  ExperimentConfig c = small_config();
  c.t_end = 0.5;
  c.sweep_gamma = {0.25, 0.5};
  c.sweep_delta = {1.0};
  const ExperimentReport rep = sweep(c);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[1].gamma_delta->first == 0.5);
}

TEST_CASE("regime map and coefficient JSON") {
  const auto rows = regime_map({0.25, 0.8}, {0.5, 2.0});
  CHECK(rows.size() == 4);
  std::ostringstream os;
  write_regime_map_csv(os, rows);
  CHECK(first_line(os.str()) == kRegimeMapHeader);
  const Json j = coefficients_json(FluidRegime::make(0.25, 1.0), {});
  for (const char* k : {"wave_speeds", "modes", "symmetric_system", "rigid_lid", "classification"})
    CHECK(j.contains(k));
  CHECK(j["symmetric_system"]["K"].get<double>() == 1.0);
}
