#pragma once

#include "twolayer/boussinesq.hpp"
#include "twolayer/grid.hpp"
#include "twolayer/kdv.hpp"
#include "twolayer/model_coefficients.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace twolayer {

// Coefficients are the scaled ones (c, eps*lambda, eps*mu).
struct SolitonSpec {
  double amplitude = 1.0;
  double center = 0.0;
  KdVCoefficients coeffs;

  double wavenumber() const {
    const double r = coeffs.lambda * amplitude / coeffs.mu;
    if (!(r > 0.0))
      throw PolarityError("soliton amplitude sign must match sign(lambda/mu); got M = " +
                          std::to_string(amplitude));
    return std::sqrt(r / 12.0);
  }
  double speed() const { return coeffs.c + coeffs.lambda * amplitude / 3.0; }

  // Ratio of the sech^2 tail at distance L/2 to the amplitude.
  double tail_ratio(double length) const {
    const double ch = std::cosh(wavenumber() * length / 2.0);
    return 1.0 / (ch * ch);
  }
};

inline constexpr double kSolitonTailTolerance = 1e-12;

// Values and derivatives of M sech^2(k xi) at xi.
struct SechJet {
  double u, ux, uxx, uxxx;
};

inline SechJet sech2_jet(double M, double k, double xi) {
  const double t = std::tanh(k * xi);
  const double ch = std::cosh(k * xi);
  const double s2 = 1.0 / (ch * ch);
  return {M * s2, -2.0 * M * k * s2 * t, 2.0 * M * k * k * s2 * (3.0 * t * t - 1.0),
          8.0 * M * k * k * k * s2 * t * (2.0 - 3.0 * t * t)};
}

inline SechJet soliton_jet(const SolitonSpec& s, const PeriodicGrid& grid, double t, double x) {
  if (s.amplitude == 0.0) return {0, 0, 0, 0};
  const double xi = grid.wrap(x - s.center - s.speed() * t + grid.origin() + grid.length() / 2.0) -
                    grid.origin() - grid.length() / 2.0;
  return sech2_jet(s.amplitude, s.wavenumber(), xi);
}

inline ScalarField soliton_profile(const SolitonSpec& s, const PeriodicGrid& grid, double t = 0.0) {
  ScalarField f(grid);
  if (s.amplitude == 0.0) return f;
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = soliton_jet(s, grid, t, grid.x(i)).u;
  return f;
}

// Four independent solitons, one per mode, and their exact uncoupled trajectory.
class FourModeSolitons {
 public:
  FourModeSolitons(const std::array<double, 4>& M, const std::vector<EigenMode>& modes,
                   double epsilon, const PeriodicGrid& grid, double center = 0.0)
      : modes_(modes), grid_(grid) {
    if (modes.size() != 4) throw std::invalid_argument("four modes required");
    for (int i = 0; i < 4; ++i) {
      SolitonSpec s{M[i], center,
                    {modes[i].speed, epsilon * modes[i].nonlinearity, epsilon * modes[i].dispersion}};
      if (M[i] != 0.0) {
        if (!(modes[i].nonlinearity * M[i] / modes[i].dispersion > 0.0))
          throw PolarityError("mode " + std::to_string(i + 1) +
                              ": amplitude sign violates the polarity rule sign(M) = sign(lambda/mu)");
        if (epsilon == 0.0) throw std::invalid_argument("solitons need epsilon > 0");
        if (s.tail_ratio(grid.length()) > kSolitonTailTolerance)
          warnings_.push_back("mode " + std::to_string(i + 1) +
                              ": soliton tail at L/2 exceeds 1e-12*M; periodic wrap pollutes the data");
      }
      specs_[i] = s;
    }
  }

  static std::array<double, 4> polarity_amplitudes(const std::vector<EigenMode>& modes,
                                                   double magnitude = 1.0) {
    std::array<double, 4> M{};
    for (int i = 0; i < 4; ++i)
      M[i] = (modes[i].nonlinearity / modes[i].dispersion > 0.0) ? magnitude : -magnitude;
    return M;
  }

  const std::array<SolitonSpec, 4>& specs() const { return specs_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  Jet jet(double t, double x) const {
    Jet j;
    for (auto* v : {&j.U, &j.Ut, &j.Ux, &j.Uxxt, &j.Uxxx}) *v = SmallVector::Zero(4);
    for (int i = 0; i < 4; ++i) {
      if (specs_[i].amplitude == 0.0) continue;
      const SechJet s = soliton_jet(specs_[i], grid_, t, x);
      const double cp = specs_[i].speed();
      const auto& e = modes_[i].vector;
      j.U += s.u * e;
      j.Ux += s.ux * e;
      j.Uxxx += s.uxxx * e;
      j.Ut += -cp * s.ux * e;
      j.Uxxt += -cp * s.uxxx * e;
    }
    return j;
  }

  StateField state(double t) const {
    StateField U(grid_, 4);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const Jet j = jet(t, grid_.x(i));
      for (int c = 0; c < 4; ++c) U.at(i, c) = j.U[c];
    }
    return U;
  }

  AnalyticTrajectory trajectory() const {
    return [self = *this](double t, double x) { return self.jet(t, x); };
  }

 private:
  std::vector<EigenMode> modes_;
  PeriodicGrid grid_;
  std::array<SolitonSpec, 4> specs_{};
  std::vector<std::string> warnings_;
};

inline StateField four_mode_soliton_data(const std::array<double, 4>& M, const FluidRegime& r,
                                         const PeriodicGrid& grid) {
  return FourModeSolitons(M, free_surface_modes(r), r.epsilon, grid).state(0.0);
}

inline ScalarField algebraic_bump(double M, double kappa, const PeriodicGrid& grid) {
  if (!(kappa > 0.0)) throw std::invalid_argument("bump: kappa must be positive");
  ScalarField f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double kx = kappa * grid.x(i);
    f[i] = M / std::sqrt(1.0 + kx * kx);
  }
  return f;
}

inline StateField flat_surface_zero_velocity(const ScalarField& bump) {
  StateField U(bump.grid, 4);
  for (std::size_t i = 0; i < bump.size(); ++i) {
    U.at(i, 0) = -bump[i];
    U.at(i, 1) = bump[i];
  }
  return U;
}

}  // namespace twolayer
