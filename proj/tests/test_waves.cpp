#include "twolayer/waves.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace twolayer;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("sech^2 wavenumber and speed for unit coefficients") {
  const SolitonSpec s{12.0, 0.0, {0.0, 1.0, 1.0}};
  CHECK_THAT(s.wavenumber(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(s.speed(), WithinAbs(4.0, 1e-15));
}

TEST_CASE("soliton profile solves the KdV equation pointwise") {
  const PeriodicGrid g(200.0, 1000);
  for (const KdVCoefficients& k : {KdVCoefficients{1.2, 0.3, 0.05}, KdVCoefficients{-0.4, -0.2, 0.01}}) {
    const double M = (k.lambda / k.mu > 0) ? 0.7 : -0.7;
    const SolitonSpec s{M, 3.0, k};
    for (double x : {-1.0, 2.5, 3.3, 6.0}) {
      const SechJet j = soliton_jet(s, g, 0.4, x);
      // u_t = -c' u_x for a translate.
      const double res = -s.speed() * j.ux + k.c * j.ux + k.lambda * j.u * j.ux + k.mu * j.uxxx;
      CHECK(std::abs(res) < 1e-13);
    }
  }
}

TEST_CASE("jet derivatives against finite differences") {
  const double M = 0.8, k = 0.6, h = 1e-4;
  for (double xi : {-2.0, -0.3, 0.0, 1.1}) {
    const SechJet j = sech2_jet(M, k, xi);
    auto u = [&](double z) { return sech2_jet(M, k, z).u; };
    auto ux = [&](double z) { return sech2_jet(M, k, z).ux; };
    auto uxx = [&](double z) { return sech2_jet(M, k, z).uxx; };
    CHECK_THAT(j.ux, WithinAbs((u(xi + h) - u(xi - h)) / (2 * h), 1e-7));
    CHECK_THAT(j.uxx, WithinAbs((ux(xi + h) - ux(xi - h)) / (2 * h), 1e-7));
    CHECK_THAT(j.uxxx, WithinAbs((uxx(xi + h) - uxx(xi - h)) / (2 * h), 1e-7));
  }
}

TEST_CASE("soliton mass equals 2M/k") {
  const PeriodicGrid g = PeriodicGrid::from_spacing(120.0, 0.01);
  const SolitonSpec s{0.5, 0.0, {1.0, 0.4, 0.1}};
  double mass = 0.0;
  for (double v : soliton_profile(s, g).values) mass += v * g.dx();
  CHECK_THAT(mass, WithinRel(2.0 * s.amplitude / s.wavenumber(), 1e-10));
}

TEST_CASE("wrong polarity is rejected") {
  const SolitonSpec s{-1.0, 0.0, {1.0, 0.4, 0.1}};
  CHECK_THROWS_AS(s.wavenumber(), PolarityError);
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.1);
  const auto modes = free_surface_modes(r);
  auto M = FourModeSolitons::polarity_amplitudes(modes);
  M[2] = -M[2];
  CHECK_THROWS_AS(FourModeSolitons(M, modes, r.epsilon, PeriodicGrid(120.0, 1200)), PolarityError);
}

TEST_CASE("four-mode data is the sum of the modal profiles") {
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.1);
  const auto modes = free_surface_modes(r);
  const PeriodicGrid g = PeriodicGrid::from_spacing(120.0, 0.05);
  const FourModeSolitons f(FourModeSolitons::polarity_amplitudes(modes), modes, r.epsilon, g);
  CHECK(f.warnings().empty());
  const StateField U = f.state(2.0);
  for (std::size_t i = 0; i < g.size(); i += 97) {
    double eta2 = 0.0;
    for (int k = 0; k < 4; ++k) eta2 += soliton_profile(f.specs()[k], g, 2.0)[i] * modes[k].vector[1];
    CHECK_THAT(U.at(i, 1), WithinAbs(eta2, 1e-14));
  }
}

TEST_CASE("short domains warn about the soliton tail") {
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.1);
  const auto modes = free_surface_modes(r);
  const FourModeSolitons f(FourModeSolitons::polarity_amplitudes(modes), modes, r.epsilon, PeriodicGrid(10.0, 200));
  CHECK(!f.warnings().empty());
}

TEST_CASE("algebraic bump") {
  const PeriodicGrid g(100.0, 1000);
  const ScalarField b = algebraic_bump(2.0, 0.5, g);
  CHECK(b[500] == 2.0);
  for (std::size_t i = 1; i < 500; ++i) CHECK_THAT(b[500 + i], WithinAbs(b[500 - i], 1e-14));
  CHECK_THAT(b[0], WithinRel(2.0 / std::sqrt(1.0 + 25.0 * 25.0), 1e-14));
  CHECK_THROWS_AS(algebraic_bump(1.0, 0.0, g), std::invalid_argument);
  const StateField U = flat_surface_zero_velocity(b);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(U.at(i, 0) + U.at(i, 1) == 0.0);
    CHECK(U.at(i, 2) == 0.0);
  }
}
