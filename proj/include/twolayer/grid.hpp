#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace twolayer {

class PeriodicGrid {
 public:
  PeriodicGrid() = default;

  static PeriodicGrid from_spacing(double length, double dx) {
    if (!(length > 0.0) || !(dx > 0.0)) throw std::invalid_argument("grid: L and dx must be positive");
    const double n = length / dx;
    const long rounded = std::lround(n);
    if (std::abs(n - static_cast<double>(rounded)) > 1e-9 * n)
      throw std::invalid_argument("grid: L/dx = " + std::to_string(n) + " is not an integer");
    return PeriodicGrid(length, static_cast<std::size_t>(rounded));
  }

  PeriodicGrid(double length, std::size_t n_points, double origin)
      : length_(length), n_(n_points), dx_(length / static_cast<double>(n_points)), origin_(origin) {
    if (n_ < 7) throw std::invalid_argument("grid: need at least 7 points");
  }
  PeriodicGrid(double length, std::size_t n_points) : PeriodicGrid(length, n_points, -length / 2) {}

  double length() const { return length_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double origin() const { return origin_; }
  double x(std::size_t i) const { return origin_ + static_cast<double>(i) * dx_; }

  // Map a coordinate into [origin, origin + L).
  double wrap(double x) const {
    double y = std::fmod(x - origin_, length_);
    if (y < 0.0) y += length_;
    return origin_ + y;
  }

  bool operator==(const PeriodicGrid& o) const {
    return n_ == o.n_ && length_ == o.length_ && origin_ == o.origin_;
  }

 private:
  double length_ = 1.0;
  std::size_t n_ = 0;
  double dx_ = 1.0;
  double origin_ = 0.0;
};

struct ScalarField {
  PeriodicGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const PeriodicGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  ScalarField(const PeriodicGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) throw std::invalid_argument("field size does not match grid");
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

// Point-major storage: values[i * components + c].
struct StateField {
  PeriodicGrid grid;
  int components = 4;
  std::vector<double> values;

  StateField() = default;
  StateField(const PeriodicGrid& g, int m) : grid(g), components(m), values(g.size() * m, 0.0) {}

  std::size_t points() const { return grid.size(); }
  double& at(std::size_t i, int c) { return values[i * components + c]; }
  double at(std::size_t i, int c) const { return values[i * components + c]; }
  const double* point(std::size_t i) const { return values.data() + i * components; }
  double* point(std::size_t i) { return values.data() + i * components; }

  ScalarField component(int c) const {
    ScalarField f(grid);
    for (std::size_t i = 0; i < points(); ++i) f[i] = at(i, c);
    return f;
  }
  void set_component(int c, const ScalarField& f) {
    if (!(f.grid == grid)) throw std::invalid_argument("component grid mismatch");
    for (std::size_t i = 0; i < points(); ++i) at(i, c) = f[i];
  }
};

inline void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

template <class Field>
void require_finite(const Field& f, const std::string& what) {
  for (double v : f.values)
    if (!std::isfinite(v)) throw std::runtime_error(what + ": non-finite value");
}

namespace stencil {

inline std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

}  // namespace stencil

inline ScalarField d1(const ScalarField& f) {
  const std::size_t n = f.size();
  const double s = 1.0 / (2.0 * f.grid.dx());
  ScalarField out(f.grid);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (f[stencil::wrap(i + 1, n)] - f[stencil::wrap(long(i) - 1, n)]) * s;
  return out;
}

inline ScalarField d2(const ScalarField& f) {
  const std::size_t n = f.size();
  const double s = 1.0 / (f.grid.dx() * f.grid.dx());
  ScalarField out(f.grid);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (f[stencil::wrap(i + 1, n)] - 2.0 * f[i] + f[stencil::wrap(long(i) - 1, n)]) * s;
  return out;
}

inline ScalarField d3(const ScalarField& f) {
  const std::size_t n = f.size();
  const double dx = f.grid.dx();
  const double s = 1.0 / (2.0 * dx * dx * dx);
  ScalarField out(f.grid);
  for (std::size_t i = 0; i < n; ++i) {
    const long j = static_cast<long>(i);
    out[i] = (f[stencil::wrap(j + 2, n)] - 2.0 * f[stencil::wrap(j + 1, n)] +
              2.0 * f[stencil::wrap(j - 1, n)] - f[stencil::wrap(j - 2, n)]) * s;
  }
  return out;
}

// Componentwise stencils on a multi-component field.
inline StateField d1(const StateField& f) {
  StateField out(f.grid, f.components);
  for (int c = 0; c < f.components; ++c) out.set_component(c, d1(f.component(c)));
  return out;
}
inline StateField d2(const StateField& f) {
  StateField out(f.grid, f.components);
  for (int c = 0; c < f.components; ++c) out.set_component(c, d2(f.component(c)));
  return out;
}
inline StateField d3(const StateField& f) {
  StateField out(f.grid, f.components);
  for (int c = 0; c < f.components; ++c) out.set_component(c, d3(f.component(c)));
  return out;
}

template <class Field>
double discrete_l2(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s * f.grid.dx());
}

template <class Field>
double relative_l2_error(const Field& f, const Field& g) {
  require_same_grid(f.grid, g.grid);
  if (f.values.size() != g.values.size()) throw std::invalid_argument("field shape mismatch");
  const double ref = discrete_l2(g);
  if (ref == 0.0) throw std::domain_error("relative error against a zero reference field");
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double e = f.values[i] - g.values[i];
    s += e * e;
  }
  return std::sqrt(s * f.grid.dx()) / ref;
}

}  // namespace twolayer
