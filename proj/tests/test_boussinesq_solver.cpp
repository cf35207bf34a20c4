#include "twolayer/boussinesq.hpp"
#include "twolayer/waves.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace twolayer;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

StateField gaussian_state(const PeriodicGrid& g, double w = 2.0) {
  StateField U(g, 4);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    const double e = std::exp(-x * x / (w * w));
    U.at(i, 0) = 0.3 * e;
    U.at(i, 1) = -0.5 * e;
    U.at(i, 2) = 0.2 * x * e;
    U.at(i, 3) = 0.1 * e;
  }
  return U;
}

RunOptions opts(double dt, double T) {
  RunOptions o;
  o.dt = dt;
  o.t_end = T;
  return o;
}

}  // namespace

TEST_CASE("zero data stays zero") {
  const PeriodicGrid g(20.0, 100);
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.1);
  for (const OperatorSystem& sys : {build_symmetric_system(r).to_operator_system(), build_original_system(r)}) {
    const auto t = run_boussinesq(StateField(g, 4), sys, opts(0.05, 1.0));
    for (double v : t.states.back().values) CHECK(v == 0.0);
  }
}

TEST_CASE("nonlinear flux adjoint on all 16 basis pairs") {
  const FluidRegime r = FluidRegime::make(0.3, 1.7, 0.1);
  const SymmetricSystem s = build_symmetric_system(r);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const SmallVector U = SmallVector::Unit(4, i), V = SmallVector::Unit(4, j);
      const SmallVector lhs = s.Sigma1(U) * V;
      const SmallVector rhs = sigma1_adjoint(s, V) * U;
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("linear symmetric scheme conserves the discrete energy") {
  const PeriodicGrid g(30.0, 300);
  const FluidRegime r = FluidRegime::make(0.4, 2.0, 0.0);
  const OperatorSystem sys = build_symmetric_system(r).to_operator_system();
  const StateField U0 = gaussian_state(g);
  const double E0 = energy(U0, sys);
  double worst = 0.0;
  run_boussinesq(U0, sys, opts(0.05, 5.0), {}, [&](double, const StateField&, const StepDiagnostics& d) {
    worst = std::max(worst, std::abs(d.energy - E0) / E0);
  });
  CHECK(worst <= 1e-10);
}

TEST_CASE("dispersive linear part also conserves energy") {
  // Nonlinear terms off: S1 = Sigma1 = 0.
  const PeriodicGrid g(30.0, 300);
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.1);
  OperatorSystem sys = build_symmetric_system(r).to_operator_system();
  sys.P1 = LinearMatrixMap(4);
  sys.Q1 = LinearMatrixMap(4);
  // Invariant of the scheme: U.S0 U - eps U.S2 D2 U with the compact D2.
  auto invariant = [&](const StateField& U) {
    const StateField U2 = d2(U);
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      e += detail::point_vec(U, i).dot(sys.P_const * detail::point_vec(U, i) - sys.epsilon * sys.P_dxx * detail::point_vec(U2, i));
    return e;
  };
  const StateField U0 = gaussian_state(g);
  const auto t = run_boussinesq(U0, sys, opts(0.05, 5.0));
  CHECK_THAT(invariant(t.states.back()), WithinRel(invariant(U0), 1e-10));
}

TEST_CASE("forced symmetric system converges at second order") {
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.1);
  const OperatorSystem sys = build_symmetric_system(r).to_operator_system();
  const auto modes = free_surface_modes(r);
  std::vector<double> errs;
  for (double h : {0.05, 0.025, 0.0125}) {
    const PeriodicGrid g = PeriodicGrid::from_spacing(80.0, h);
    const FourModeSolitons ex(FourModeSolitons::polarity_amplitudes(modes), modes, r.epsilon, g);
    const auto t = run_boussinesq(ex.state(0.0), sys, opts(h, 1.0), manufactured_forcing(sys, ex.trajectory()));
    errs.push_back(relative_l2_error(t.states.back(), ex.state(1.0)));
  }
  for (std::size_t k = 1; k < errs.size(); ++k) {
    const double order = std::log2(errs[k - 1] / errs[k]);
    CHECK(order > 1.7);
    CHECK(order < 2.3);
  }
}

TEST_CASE("forcing that vanishes leaves the exact solution of a trivial system") {
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.0);
  const OperatorSystem sys = build_symmetric_system(r).to_operator_system();
  const PeriodicGrid g(10.0, 50);
  const ForcingTerm F = manufactured_forcing(sys, [](double, double) {
    Jet j;
    for (auto* v : {&j.U, &j.Ut, &j.Ux, &j.Uxxt, &j.Uxxx}) *v = SmallVector::Zero(4);
    return j;
  });
  const StateField Z = sample_forcing(F, 0.3, g, 4);
  for (double v : Z.values) CHECK(v == 0.0);
}

TEST_CASE("reflection symmetry of the original system") {
  const std::size_t n = 200;
  const PeriodicGrid g(20.0, n);
  const FluidRegime r = FluidRegime::make(0.3, 1.5, 0.1);
  const OperatorSystem sys = build_original_system(r);
  const StateField U0 = gaussian_state(g);
  // (eta, u)(x) -> (eta, -u)(-x); grid point i reflects to n - i.
  auto reflect = [&](const StateField& U) {
    StateField R(g, 4);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (n - i) % n;
      R.at(j, 0) = U.at(i, 0);
      R.at(j, 1) = U.at(i, 1);
      R.at(j, 2) = -U.at(i, 2);
      R.at(j, 3) = -U.at(i, 3);
    }
    return R;
  };
  const StateField a = run_boussinesq(U0, sys, opts(0.05, 2.0)).states.back();
  const StateField b = run_boussinesq(reflect(U0), sys, opts(0.05, 2.0)).states.back();
  CHECK(relative_l2_error(reflect(a), b) <= 1e-12);
}

TEST_CASE("velocity change round trip") {
  const PeriodicGrid g(20.0, 200);
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.1);
  const StateField V = gaussian_state(g);
  const StateField U = to_original_variables(V, r);
  CHECK(relative_l2_error(U, V) > 1e-6);
  CHECK(relative_l2_error(to_symmetric_variables(U, r), V) <= 1e-12);
  // eta rows are untouched.
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(U.at(i, 0) == V.at(i, 0));
    CHECK(U.at(i, 1) == V.at(i, 1));
  }
  const FluidRegime r0 = FluidRegime::make(0.25, 1.0, 0.0);
  CHECK(to_original_variables(V, r0).values == V.values);
  CHECK_THROWS_AS(to_original_variables(StateField(g, 2), r), std::invalid_argument);
}

TEST_CASE("bootstrap rejects bad input") {
  const PeriodicGrid g(10.0, 50);
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.1);
  const OperatorSystem sys = build_symmetric_system(r).to_operator_system();
  CHECK_THROWS_AS(bootstrap(StateField(g, 4), sys, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap(StateField(g, 2), sys, 0.1), std::invalid_argument);
}

TEST_CASE("single-mode soliton: Boussinesq tracks the KdV translate") {
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.05);
  const PeriodicGrid g = PeriodicGrid::from_spacing(100.0, 0.05);
  const auto modes = free_surface_modes(r);
  const auto M = FourModeSolitons::polarity_amplitudes(modes);
  const FourModeSolitons one({M[0], 0.0, 0.0, 0.0}, modes, r.epsilon, g);
  const auto t = run_boussinesq(one.state(0.0), build_symmetric_system(r).to_operator_system(), opts(0.05, 1.0));
  const double err = relative_l2_error(t.states.back(), one.state(1.0));
  CHECK(err < 0.05);
}
