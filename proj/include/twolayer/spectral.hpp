#pragma once

#include "twolayer/grid.hpp"
#include "twolayer/model_coefficients.hpp"

#include <array>
#include <vector>

namespace twolayer {

using ModeAmplitudes = std::vector<ScalarField>;

// u_i = e_i . S0 U at every grid point.
inline ModeAmplitudes project(const StateField& U, const std::vector<EigenMode>& modes,
                              const SmallMatrix& S0) {
  const int m = U.components;
  if (S0.rows() != m || modes.size() != static_cast<std::size_t>(m))
    throw std::invalid_argument("project: mode basis does not match state dimension");
  std::vector<SmallVector> rows;
  for (const auto& mode : modes) rows.push_back(S0.transpose() * mode.vector);
  ModeAmplitudes amps(m, ScalarField(U.grid));
  for (std::size_t i = 0; i < U.points(); ++i)
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int c = 0; c < m; ++c) s += rows[k][c] * U.at(i, c);
      amps[k][i] = s;
    }
  return amps;
}

inline StateField reconstruct(const ModeAmplitudes& amps, const std::vector<EigenMode>& modes) {
  if (amps.empty() || amps.size() != modes.size())
    throw std::invalid_argument("reconstruct: amplitude count does not match modes");
  const int m = static_cast<int>(modes.size());
  const PeriodicGrid& grid = amps[0].grid;
  for (const auto& a : amps) require_same_grid(a.grid, grid);
  StateField U(grid, m);
  for (std::size_t i = 0; i < U.points(); ++i)
    for (int k = 0; k < m; ++k)
      for (int c = 0; c < m; ++c) U.at(i, c) += amps[k][i] * modes[k].vector[c];
  return U;
}

inline StateField rigid_lid_initial_data(const ScalarField& eta0, const ScalarField& v0,
                                         const FluidRegime& r) {
  require_same_grid(eta0.grid, v0.grid);
  const double g = r.gamma, d = r.delta;
  StateField U(eta0.grid, 4);
  for (std::size_t i = 0; i < U.points(); ++i) {
    U.at(i, 0) = -eta0[i];
    U.at(i, 1) = eta0[i];
    U.at(i, 2) = -v0[i] / (g + d);
    U.at(i, 3) = d * v0[i] / (g + d);
  }
  return U;
}

// Interface (eta) and surface (zeta) parts carried by each mode, indexed as
// the modes: 0 = (+,fast), 1 = (-,fast), 2 = (+,slow), 3 = (-,slow).
struct InitialMagnitudes {
  std::array<ScalarField, 4> eta;
  std::array<ScalarField, 4> zeta;
};

inline InitialMagnitudes initial_mode_magnitudes(const ScalarField& eta0, const ScalarField& v0,
                                                 const FluidRegime& r) {
  require_same_grid(eta0.grid, v0.grid);
  free_surface_modes(r);  // degeneracy check
  const auto [cp, cm] = wave_speeds(r);
  const double g = r.gamma, d = r.delta;
  const double gap = cp * cp - cm * cm;
  constexpr int j_of[4] = {1, -1, 1, -1};
  constexpr int k_of[4] = {1, 1, -1, -1};
  InitialMagnitudes out;
  for (int mode = 0; mode < 4; ++mode) {
    const int j = j_of[mode], k = k_of[mode];
    const double c = (k == 1) ? cp : cm;
    const double c2 = c * c;
    const double pre = k / (2.0 * d * gap);
    // Velocity factor from e_{i,4} - gamma e_{i,3} (see projection e_i . S0 U0).
    const double vel = d * c2 - d - g;
    const double eta_e = (1.0 - g) * (c2 - 1.0) / c2;
    const double eta_v = j * vel / ((g + d) * c);
    const double zeta_e = 1.0 - g;
    const double zeta_v = j * c * vel / ((c2 - 1.0) * (g + d));
    out.eta[mode] = ScalarField(eta0.grid);
    out.zeta[mode] = ScalarField(eta0.grid);
    for (std::size_t i = 0; i < eta0.size(); ++i) {
      out.eta[mode][i] = pre * (eta_e * eta0[i] + eta_v * v0[i]);
      out.zeta[mode][i] = pre * (zeta_e * eta0[i] + zeta_v * v0[i]);
    }
  }
  return out;
}

}  // namespace twolayer
