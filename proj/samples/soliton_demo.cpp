// Propagates the fast right-going soliton with the symmetric system and the
// KdV approximation and prints the peak position against c' t.
#include "twolayer/twolayer.hpp"

#include <cstdio>

using namespace twolayer;

int main() {
  const FluidRegime r = FluidRegime::make(0.25, 1.0, 0.1);
  const PeriodicGrid grid = PeriodicGrid::from_spacing(120.0, 0.02);
  const auto modes = free_surface_modes(r);
  FourModeSolitons exact({1.0, 0.0, 0.0, 0.0}, modes, r.epsilon, grid, -20.0);

  RunOptions opt;
  opt.dt = 0.02;
  opt.t_end = 10.0;
  opt.output_times = {0.0, 2.5, 5.0, 7.5, 10.0};
  const StateField U0 = exact.state(0.0);
  const auto bouss = run_boussinesq(U0, build_symmetric_system(r).to_operator_system(), opt);
  const auto kdv = run_kdv_approximation(U0, r, opt);

  std::printf("%6s %10s %10s %12s %12s\n", "t", "peak", "c't", "|B-K|/|K|", "|B-exact|");
  for (std::size_t k = 0; k < bouss.times.size(); ++k) {
    const double t = bouss.times[k];
    std::size_t imax = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (bouss.states[k].at(i, 1) > bouss.states[k].at(imax, 1)) imax = i;
    std::printf("%6.2f %10.3f %10.3f %12.3e %12.3e\n", t, grid.x(imax),
                -20.0 + exact.specs()[0].speed() * t,
                relative_l2_error(bouss.states[k], kdv.states[k]),
                relative_l2_error(bouss.states[k], exact.state(t)));
  }
}
