#include "twolayer/spectral.hpp"
#include "twolayer/waves.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace twolayer;
using Catch::Matchers::WithinAbs;

namespace {

StateField random_state(const PeriodicGrid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  StateField U(g, 4);
  for (auto& v : U.values) v = u(rng);
  return U;
}

ScalarField random_field(const PeriodicGrid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);
  return f;
}

}  // namespace

TEST_CASE("projection of a constant eigenvector") {
  const FluidRegime r = FluidRegime::make(0.25, 1.0);
  const auto modes = free_surface_modes(r);
  const PeriodicGrid g(1.0, 8);
  StateField U(g, 4);
  for (std::size_t i = 0; i < 8; ++i)
    for (int c = 0; c < 4; ++c) U.at(i, c) = modes[1].vector[c];
  const auto a = project(U, modes, free_surface_S0(r));
  for (int k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < 8; ++i) CHECK_THAT(a[k][i], WithinAbs(k == 1 ? 1.0 : 0.0, 1e-14));
}

TEST_CASE("projection recovers random combination constants") {
  const FluidRegime r = FluidRegime::make(0.4, 2.5);
  const auto modes = free_surface_modes(r);
  const PeriodicGrid g(1.0, 8);
  const double coef[4] = {0.3, -1.2, 2.0, 0.7};
  StateField U(g, 4);
  for (std::size_t i = 0; i < 8; ++i)
    for (int k = 0; k < 4; ++k)
      for (int c = 0; c < 4; ++c) U.at(i, c) += coef[k] * modes[k].vector[c];
  const auto a = project(U, modes, free_surface_S0(r));
  for (int k = 0; k < 4; ++k) CHECK_THAT(a[k][3], WithinAbs(coef[k], 1e-12));
}

TEST_CASE("project/reconstruct round trip on random fields") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> ug(0.05, 0.95), ud(0.1, 10.0);
  const PeriodicGrid g(5.0, 64);
  for (int k = 0; k < 100; ++k) {
    const FluidRegime r = FluidRegime::make(ug(rng), ud(rng));
    std::vector<EigenMode> modes;
    try {
      modes = free_surface_modes(r);
    } catch (const DegenerateRegimeError&) {
      continue;
    }
    const StateField U = random_state(g, rng);
    const StateField back = reconstruct(project(U, modes, free_surface_S0(r)), modes);
    REQUIRE(relative_l2_error(back, U) <= 1e-12);
  }
}

TEST_CASE("reconstruction of zero amplitudes and the interface row") {
  const FluidRegime r = FluidRegime::make(0.25, 1.0);
  const auto modes = free_surface_modes(r);
  const PeriodicGrid g(2.0, 16);
  const StateField Z = reconstruct(ModeAmplitudes(4, ScalarField(g)), modes);
  for (double v : Z.values) CHECK(v == 0.0);
  std::mt19937 rng(1);
  ModeAmplitudes a;
  for (int k = 0; k < 4; ++k) a.push_back(random_field(g, rng));
  const StateField U = reconstruct(a, modes);
  for (std::size_t i = 0; i < 16; ++i) {
    double eta2 = 0.0;
    for (int k = 0; k < 4; ++k) eta2 += a[k][i] * modes[k].vector[1];
    CHECK_THAT(U.at(i, 1), WithinAbs(eta2, 1e-14));
  }
  const auto back = project(U, modes, free_surface_S0(r));
  for (int k = 0; k < 4; ++k) CHECK(relative_l2_error(back[k], a[k]) < 1e-12);
}

TEST_CASE("shape mismatches are rejected") {
  const FluidRegime r = FluidRegime::make(0.25, 1.0);
  const auto modes = free_surface_modes(r);
  const PeriodicGrid g(2.0, 16);
  CHECK_THROWS_AS(project(StateField(g, 2), modes, free_surface_S0(r)), std::invalid_argument);
  CHECK_THROWS_AS(reconstruct(ModeAmplitudes(3, ScalarField(g)), modes), std::invalid_argument);
}

TEST_CASE("rigid-lid compatible initial data") {
  const FluidRegime r = FluidRegime::make(0.3, 1.7);
  const PeriodicGrid g(4.0, 32);
  std::mt19937 rng(2);
  const ScalarField eta = random_field(g, rng), v = random_field(g, rng);
  const StateField U = rigid_lid_initial_data(eta, v, r);
  for (std::size_t i = 0; i < 32; ++i) {
    CHECK(U.at(i, 0) + U.at(i, 1) == 0.0);
    CHECK_THAT(U.at(i, 3) - r.gamma * U.at(i, 2), WithinAbs(v[i], 1e-14));
  }
  const StateField U0 = rigid_lid_initial_data(eta, ScalarField(g), r);
  for (std::size_t i = 0; i < 32; ++i) {
    CHECK(U0.at(i, 1) == eta[i]);
    CHECK(U0.at(i, 2) == 0.0);
    CHECK(U0.at(i, 3) == 0.0);
  }
}

TEST_CASE("zero-velocity interface magnitudes at gamma=1/4, delta=1") {
  const FluidRegime r = FluidRegime::make(0.25, 1.0);
  const PeriodicGrid g(4.0, 32);
  const ScalarField eta(g, 1.0);
  const auto m = initial_mode_magnitudes(eta, ScalarField(g), r);
  // Cross-check against projection followed by the interface row.
  const auto modes = free_surface_modes(r);
  const auto amps = project(rigid_lid_initial_data(eta, ScalarField(g), r), modes, free_surface_S0(r));
  for (int k = 0; k < 4; ++k) {
    CHECK_THAT(m.eta[k][0], WithinAbs(amps[k][0] * modes[k].vector[1], 1e-14));
    CHECK_THAT(m.zeta[k][0], WithinAbs(amps[k][0] * (modes[k].vector[0] + modes[k].vector[1]), 1e-14));
  }
  CHECK_THAT(m.eta[0][0], WithinAbs(0.125, 1e-14));
  CHECK_THAT(m.eta[1][0], WithinAbs(0.125, 1e-14));
  CHECK_THAT(m.eta[2][0], WithinAbs(0.375, 1e-14));
  CHECK_THAT(m.eta[3][0], WithinAbs(0.375, 1e-14));
  // Same surface weight for all four waves, signs from the pair index.
  CHECK_THAT(std::abs(m.zeta[0][0]), WithinAbs(std::abs(m.zeta[2][0]), 1e-14));
  CHECK(m.zeta[0][0] == m.zeta[1][0]);
  CHECK(m.zeta[2][0] == m.zeta[3][0]);
}

TEST_CASE("magnitudes with nonzero velocity match direct projection") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> ug(0.05, 0.95), ud(0.1, 10.0);
  const PeriodicGrid g(4.0, 16);
  for (int t = 0; t < 50; ++t) {
    const FluidRegime r = FluidRegime::make(ug(rng), ud(rng));
    std::vector<EigenMode> modes;
    try {
      modes = free_surface_modes(r);
    } catch (const DegenerateRegimeError&) {
      continue;
    }
    const ScalarField eta = random_field(g, rng), v = random_field(g, rng);
    const auto m = initial_mode_magnitudes(eta, v, r);
    const auto amps = project(rigid_lid_initial_data(eta, v, r), modes, free_surface_S0(r));
    for (int k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < 16; ++i) {
        REQUIRE_THAT(m.eta[k][i], WithinAbs(amps[k][i] * modes[k].vector[1], 1e-10));
        REQUIRE_THAT(m.zeta[k][i], WithinAbs(amps[k][i] * (modes[k].vector[0] + modes[k].vector[1]), 1e-10));
      }
    // Partition identities.
    for (std::size_t i = 0; i < 16; ++i) {
      double se = 0, sz = 0;
      for (int k = 0; k < 4; ++k) {
        se += m.eta[k][i];
        sz += m.zeta[k][i];
      }
      REQUIRE_THAT(se, WithinAbs(eta[i], 1e-12));
      REQUIRE_THAT(sz, WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("fast interface part dominates exactly below delta = 1 - 2 gamma") {
  const PeriodicGrid g(4.0, 16);
  const ScalarField eta(g, 1.0);
  for (double gamma : {0.1, 0.2, 0.3, 0.4}) {
    const double line = 1.0 - 2.0 * gamma;
    for (double d : {0.5 * line, 0.9 * line, 1.1 * line, 2.0 * line}) {
      const auto m = initial_mode_magnitudes(eta, ScalarField(g), FluidRegime::make(gamma, d));
      const double fast = discrete_l2(m.eta[0]), slow = discrete_l2(m.eta[2]);
      CHECK((fast >= slow) == (d <= line));
    }
    const auto m = initial_mode_magnitudes(eta, ScalarField(g), FluidRegime::make(gamma, line));
    CHECK_THAT(discrete_l2(m.eta[0]), WithinAbs(discrete_l2(m.eta[2]), 1e-10));
  }
}

TEST_CASE("flat-surface data projects to the zero-velocity magnitudes") {
  const FluidRegime r = FluidRegime::make(0.25, 2.0);
  const PeriodicGrid g(40.0, 400);
  const ScalarField bump = algebraic_bump(1.0, 1.0, g);
  const auto m = initial_mode_magnitudes(bump, ScalarField(g), r);
  const auto modes = free_surface_modes(r);
  const auto amps = project(flat_surface_zero_velocity(bump), modes, free_surface_S0(r));
  for (int k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < g.size(); i += 37)
      CHECK_THAT(amps[k][i] * modes[k].vector[1], WithinAbs(m.eta[k][i], 1e-13));
}
