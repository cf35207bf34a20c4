#pragma once

// JSON configuration, provenance echo and the coefficient dump. Needs the
// nlohmann single header (vendor/json.hpp) on the include path.

#include "twolayer/experiments.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace twolayer {

using Json = nlohmann::ordered_json;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
inline void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline void read_bump(const Json& j, double& M, double& kappa, const std::string& where) {
  check_keys(j, where, {"M", "kappa"});
  read(j, "M", M, where);
  read(j, "kappa", kappa, where);
}

}  // namespace detail

inline ExperimentConfig parse_config(const Json& j) {
  using detail::read;
  ExperimentConfig c;
  detail::check_keys(j, "config",
                     {"regime", "params", "grid", "dt", "t_end", "bootstrap", "initial_data", "models", "outputs",
                      "rigid_lid", "max_eps_t", "epsilons", "error_in_time", "validate", "sweep", "workers"});
  if (j.contains("regime")) {
    const Json& r = j["regime"];
    detail::check_keys(r, "regime", {"gamma", "delta", "epsilon"});
    read(r, "gamma", c.regime.gamma, "regime");
    read(r, "delta", c.regime.delta, "regime");
    read(r, "epsilon", c.regime.epsilon, "regime");
  }
  if (j.contains("params")) {
    const Json& p = j["params"];
    detail::check_keys(p, "params", {"a1", "a2", "b1", "lambda", "K"});
    read(p, "a1", c.params.a1, "params");
    read(p, "a2", c.params.a2, "params");
    read(p, "b1", c.params.b1, "params");
    read(p, "lambda", c.params.lambda, "params");
    if (p.contains("K") && !p["K"].is_null()) c.params.K = p["K"].get<double>();
  }
  if (j.contains("grid")) {
    detail::check_keys(j["grid"], "grid", {"L", "dx"});
    read(j["grid"], "L", c.L, "grid");
    read(j["grid"], "dx", c.dx, "grid");
  }
  read(j, "dt", c.dt, "config");
  read(j, "t_end", c.t_end, "config");
  if (j.contains("bootstrap")) {
    const std::string b = j["bootstrap"].get<std::string>();
    if (b == "euler") c.bootstrap = Bootstrap::Euler;
    else if (b == "rk2") c.bootstrap = Bootstrap::RK2;
    else throw ConfigError("bootstrap must be 'euler' or 'rk2'");
  }
  if (j.contains("initial_data")) {
    const Json& d = j["initial_data"];
    if (!d.contains("type")) throw ConfigError("initial_data.type is required");
    const std::string type = d["type"].get<std::string>();
    if (type == "soliton") {
      detail::check_keys(d, "initial_data", {"type", "M", "magnitude", "center"});
      c.initial.kind = InitialData::Kind::Soliton;
      if (d.contains("M")) c.initial.M = d["M"].get<std::array<double, 4>>();
      read(d, "magnitude", c.initial.magnitude, "initial_data");
      read(d, "center", c.initial.center, "initial_data");
    } else if (type == "algebraic_bump") {
      detail::check_keys(d, "initial_data", {"type", "M", "kappa"});
      c.initial.kind = InitialData::Kind::Bump;
      read(d, "M", c.initial.bump_M, "initial_data");
      read(d, "kappa", c.initial.kappa, "initial_data");
    } else if (type == "rigid_lid") {
      detail::check_keys(d, "initial_data", {"type", "eta", "v"});
      c.initial.kind = InitialData::Kind::RigidLid;
      if (d.contains("eta")) detail::read_bump(d["eta"], c.initial.bump_M, c.initial.kappa, "initial_data.eta");
      if (d.contains("v")) detail::read_bump(d["v"], c.initial.v_M, c.initial.v_kappa, "initial_data.v");
    } else {
      throw ConfigError("initial_data.type must be soliton, algebraic_bump or rigid_lid");
    }
  }
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& m : j["models"]) c.models.push_back(parse_model(m.get<std::string>()));
  }
  if (j.contains("outputs")) {
    const Json& o = j["outputs"];
    detail::check_keys(o, "outputs", {"snapshot_times", "csv", "snapshot_prefix"});
    read(o, "snapshot_times", c.snapshot_times, "outputs");
    read(o, "csv", c.csv_path, "outputs");
    read(o, "snapshot_prefix", c.snapshot_prefix, "outputs");
  }
  if (j.contains("rigid_lid")) {
    detail::check_keys(j["rigid_lid"], "rigid_lid", {"theta1", "theta2", "beta"});
    read(j["rigid_lid"], "theta1", c.theta1, "rigid_lid");
    read(j["rigid_lid"], "theta2", c.theta2, "rigid_lid");
    read(j["rigid_lid"], "beta", c.beta, "rigid_lid");
  }
  read(j, "max_eps_t", c.max_eps_t, "config");
  read(j, "epsilons", c.epsilons, "config");
  if (j.contains("error_in_time")) {
    const Json& e = j["error_in_time"];
    detail::check_keys(e, "error_in_time", {"sample_dt", "fit_t_min", "horizon"});
    read(e, "sample_dt", c.sample_dt, "error_in_time");
    read(e, "fit_t_min", c.fit_t_min, "error_in_time");
    read(e, "horizon", c.horizon, "error_in_time");
  }
  if (j.contains("validate")) {
    const Json& v = j["validate"];
    detail::check_keys(v, "validate", {"rows", "refinement"});
    if (v.contains("rows")) {
      c.validate_rows.clear();
      for (const auto& r : v["rows"]) {
        detail::check_keys(r, "validate.rows[]", {"dx", "dt", "T", "epsilon"});
        c.validate_rows.push_back({r.at("dx").get<double>(), r.at("dt").get<double>(), r.at("T").get<double>(),
                                   r.at("epsilon").get<double>()});
      }
    }
    if (v.contains("refinement")) {
      const Json& r = v["refinement"];
      detail::check_keys(r, "validate.refinement", {"dx", "T", "epsilon"});
      read(r, "dx", c.refinement_dx, "validate.refinement");
      read(r, "T", c.refinement_T, "validate.refinement");
      read(r, "epsilon", c.refinement_epsilon, "validate.refinement");
    }
  }
  if (j.contains("sweep")) {
    detail::check_keys(j["sweep"], "sweep", {"gamma", "delta"});
    read(j["sweep"], "gamma", c.sweep_gamma, "sweep");
    read(j["sweep"], "delta", c.sweep_delta, "sweep");
  }
  read(j, "workers", c.workers, "config");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

// Full echo; parse_config(to_json(c)) reproduces c.
inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["regime"] = {{"gamma", c.regime.gamma}, {"delta", c.regime.delta}, {"epsilon", c.regime.epsilon}};
  j["params"] = {{"a1", c.params.a1}, {"a2", c.params.a2}, {"b1", c.params.b1}, {"lambda", c.params.lambda}};
  j["params"]["K"] = c.params.K ? Json(*c.params.K) : Json(nullptr);
  j["grid"] = {{"L", c.L}, {"dx", c.dx}};
  j["dt"] = c.dt;
  j["t_end"] = c.t_end;
  j["bootstrap"] = c.bootstrap == Bootstrap::Euler ? "euler" : "rk2";
  Json d;
  d["type"] = to_string(c.initial.kind);
  switch (c.initial.kind) {
    case InitialData::Kind::Soliton:
      if (c.initial.M) d["M"] = *c.initial.M;
      d["magnitude"] = c.initial.magnitude;
      d["center"] = c.initial.center;
      break;
    case InitialData::Kind::Bump:
      d["M"] = c.initial.bump_M;
      d["kappa"] = c.initial.kappa;
      break;
    default:
      d["eta"] = {{"M", c.initial.bump_M}, {"kappa", c.initial.kappa}};
      d["v"] = {{"M", c.initial.v_M}, {"kappa", c.initial.v_kappa}};
  }
  j["initial_data"] = d;
  j["models"] = Json::array();
  for (Model m : c.models) j["models"].push_back(to_string(m));
  j["outputs"] = {{"snapshot_times", c.snapshot_times}, {"csv", c.csv_path}, {"snapshot_prefix", c.snapshot_prefix}};
  j["rigid_lid"] = {{"theta1", c.theta1}, {"theta2", c.theta2}, {"beta", c.beta}};
  j["max_eps_t"] = c.max_eps_t;
  j["epsilons"] = c.epsilons;
  j["error_in_time"] = {{"sample_dt", c.sample_dt}, {"fit_t_min", c.fit_t_min}, {"horizon", c.horizon}};
  Json rows = Json::array();
  for (const auto& r : c.validate_rows) rows.push_back({{"dx", r.dx}, {"dt", r.dt}, {"T", r.T}, {"epsilon", r.epsilon}});
  j["validate"] = {{"rows", rows},
                   {"refinement", {{"dx", c.refinement_dx}, {"T", c.refinement_T}, {"epsilon", c.refinement_epsilon}}}};
  j["sweep"] = {{"gamma", c.sweep_gamma}, {"delta", c.sweep_delta}};
  j["workers"] = c.workers;
  return j;
}

// Sidecar written next to every report CSV.
inline Json provenance(const ExperimentConfig& c, const ExperimentReport& rep) {
  Json j;
  j["experiment"] = rep.experiment;
  j["config"] = to_json(c);
  // K actually used (auto-selected when the config leaves it empty).
  try {
    j["resolved_K"] = build_symmetric_system(c.regime, c.params).K;
  } catch (const std::exception&) {
    j["resolved_K"] = nullptr;
  }
  Json s = Json::object();
  for (const auto& [k, v] : rep.summary) s[k] = v;
  j["summary"] = s;
  j["warnings"] = rep.warnings;
  return j;
}

inline Json matrix_json(const SmallMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline Json vector_json(const SmallVector& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json coefficients_json(const FluidRegime& r, const BoussinesqParameters& p) {
  Json j;
  j["regime"] = {{"gamma", r.gamma}, {"delta", r.delta}, {"epsilon", r.epsilon}};
  const auto [cp, cm] = wave_speeds(r);
  j["wave_speeds"] = {{"c_plus", cp}, {"c_minus", cm}};
  Json modes = Json::array();
  for (const auto& m : free_surface_modes(r))
    modes.push_back({{"speed", m.speed}, {"nonlinearity", m.nonlinearity}, {"dispersion", m.dispersion},
                     {"theta", m.theta}, {"vector", vector_json(m.vector)}});
  j["modes"] = modes;
  const SymmetricSystem s = build_symmetric_system(r, p);
  j["symmetric_system"] = {{"K", s.K},
                           {"S0", matrix_json(s.S0)},
                           {"Sigma0", matrix_json(s.Sigma0)},
                           {"S2", matrix_json(s.S2)},
                           {"Sigma2", matrix_json(s.Sigma2)}};
  const RigidLidModes rl = rigid_lid_modes(r);
  j["rigid_lid"] = {{"c", rl.c},
                    {"lambda", rl.lambda},
                    {"mu", rl.mu},
                    {"lambda_interface", rl.lambda_interface},
                    {"e_plus", vector_json(rl.e_plus)},
                    {"e_minus", vector_json(rl.e_minus)}};
  const RegimeClassification cls = classify(r);
  j["classification"] = {{"delta_c", cls.delta_c},
                         {"delta_c_rigid", cls.delta_c_rigid},
                         {"slow_interface_polarity", to_string(cls.slow_mode_polarity)},
                         {"slow_surface_polarity", to_string(cls.slow_mode_surface_polarity)},
                         {"fast_polarity", to_string(cls.fast_mode_polarity)},
                         {"surface_dominant_slow", cls.surface_dominant_slow},
                         {"fast_dominates_zero_velocity", cls.fast_dominates_zero_velocity}};
  j["amplitude_ratio"] = {{"fast", amplitude_ratio(r, ModePair::Fast)}, {"slow", amplitude_ratio(r, ModePair::Slow)}};
  const RigidLidValidity v = rigid_lid_validity(r, 1.0);
  j["rigid_lid_validity"] = {{"surface_over_slow", v.surface_over_slow},
                             {"fast_over_slow", v.fast_over_slow},
                             {"valid", v.valid}};
  return j;
}

}  // namespace twolayer
