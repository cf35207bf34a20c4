#pragma once

#include "twolayer/core.hpp"
#include "twolayer/model_coefficients.hpp"

#include <cmath>
#include <string>

namespace twolayer {

enum class Polarity { Elevation, Depression, Critical };

inline const char* to_string(Polarity p) {
  switch (p) {
    case Polarity::Elevation: return "elevation";
    case Polarity::Depression: return "depression";
    default: return "critical";
  }
}

enum class ModePair { Fast, Slow };

inline double critical_cubic(double gamma, double X) {
  return ((X + (gamma * gamma + 3.0 * gamma - 3.0)) * X + (3.0 - 4.0 * gamma)) * X - 1.0;
}

inline double critical_cubic_discriminant(double gamma) {
  const double b = gamma * gamma + 3.0 * gamma - 3.0, c = 3.0 - 4.0 * gamma, d = -1.0;
  return 18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c - 27.0 * d * d;
}

inline double critical_ratio(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("critical_ratio: gamma must lie in (0,1)");
  if (critical_cubic_discriminant(gamma) > 1e-12)
    throw std::domain_error("critical_ratio: cubic has three real roots");
  double a = 0.5, b = 2.0;
  double fa = critical_cubic(gamma, a);
  if (fa * critical_cubic(gamma, b) > 0.0) throw std::domain_error("critical_ratio: root not bracketed");
  while (b - a > 1e-13) {
    const double mid = 0.5 * (a + b);
    const double fm = critical_cubic(gamma, mid);
    if (fm == 0.0) return mid;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Nonlinearity of the KdV equation written for the interface (or surface)
// trace of mode i, i.e. lambda_i divided by the trace weight.
inline double interface_nonlinearity(const EigenMode& m) { return m.nonlinearity / m.vector[1]; }
inline double surface_nonlinearity(const EigenMode& m) {
  return m.nonlinearity / (m.vector[0] + m.vector[1]);
}

struct RegimeClassification {
  double delta_c = 0.0;
  double delta_c_rigid = 0.0;
  Polarity slow_mode_polarity = Polarity::Critical;          // at the interface
  Polarity slow_mode_surface_polarity = Polarity::Critical;  // at the surface
  Polarity fast_mode_polarity = Polarity::Elevation;
  bool surface_dominant_slow = false;
  bool fast_dominates_zero_velocity = false;
};

inline RegimeClassification classify(const FluidRegime& r) {
  RegimeClassification c;
  c.delta_c = critical_ratio(r.gamma);
  c.delta_c_rigid = std::sqrt(r.gamma);
  if (std::abs(r.delta - c.delta_c) <= 1e-8) {
    c.slow_mode_polarity = Polarity::Critical;
    c.slow_mode_surface_polarity = Polarity::Critical;
  } else {
    const auto modes = free_surface_modes(r);
    const EigenMode& slow = modes[2];
    const double si = interface_nonlinearity(slow) / slow.dispersion;
    const double ss = surface_nonlinearity(slow) / slow.dispersion;
    c.slow_mode_polarity = si > 0.0 ? Polarity::Elevation : Polarity::Depression;
    c.slow_mode_surface_polarity = ss > 0.0 ? Polarity::Elevation : Polarity::Depression;
  }
  c.surface_dominant_slow = r.delta <= 2.0 * (1.0 - 2.0 * r.gamma);
  c.fast_dominates_zero_velocity = r.delta <= 1.0 - 2.0 * r.gamma;
  return c;
}

// eta/zeta = (c^2 - 1)/c^2 for the given pair.
inline double amplitude_ratio(const FluidRegime& r, ModePair pair) {
  const auto [cp, cm] = wave_speeds(r);
  const double c2 = (pair == ModePair::Fast) ? cp * cp : cm * cm;
  if (c2 < kDegeneracyTolerance) throw DegenerateRegimeError("amplitude_ratio: vanishing speed");
  return (c2 - 1.0) / c2;
}

inline double thickness(double M, double lambda, double mu) {
  const double r = lambda * M / mu;
  if (!(r > 0.0)) throw PolarityError("thickness: lambda*M/mu must be positive");
  return std::sqrt(12.0 / r);
}

struct RigidLidValidity {
  double surface_over_slow = 0.0;  // |zeta_{.,.}| / |eta_{.,-}|
  double fast_over_slow = 0.0;     // |eta_{.,+}| / |eta_{.,-}|
  double eta_fast = 0.0, eta_slow = 0.0, zeta = 0.0;
  bool valid = false;
};

// Closed forms for zero initial velocity; magnitudes scale with eta0_norm.
inline RigidLidValidity rigid_lid_validity(const FluidRegime& r, double eta0_norm,
                                           double v0_norm = 0.0, double threshold = 0.2) {
  if (v0_norm != 0.0)
    throw std::invalid_argument("rigid_lid_validity: closed forms assume zero initial velocity");
  free_surface_modes(r);
  const auto [cp, cm] = wave_speeds(r);
  const double cp2 = cp * cp, cm2 = cm * cm;
  const double pre = (1.0 - r.gamma) / (2.0 * r.delta * (cp2 - cm2));
  RigidLidValidity v;
  v.zeta = pre * eta0_norm;
  v.eta_fast = pre * (cp2 - 1.0) / cp2 * eta0_norm;
  v.eta_slow = pre * (1.0 - cm2) / cm2 * eta0_norm;
  v.surface_over_slow = cm2 / (1.0 - cm2);
  v.fast_over_slow = ((cp2 - 1.0) / cp2) * (cm2 / (1.0 - cm2));
  v.valid = v.surface_over_slow < threshold && v.fast_over_slow < threshold;
  return v;
}

}  // namespace twolayer
