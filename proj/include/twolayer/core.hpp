#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twolayer {

// Dense storage for the tiny per-point matrices (at most 4x4).
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;

inline constexpr double kDegeneracyTolerance = 1e-10;

class DegenerateRegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class PolarityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long step = -1)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

struct FluidRegime {
  double gamma = 0.25;
  double delta = 1.0;
  double epsilon = 0.1;

  static FluidRegime make(double gamma, double delta, double epsilon = 0.0) {
    FluidRegime r{gamma, delta, epsilon};
    r.validate();
    return r;
  }

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0))
      throw std::invalid_argument("gamma must lie in (0,1), got " + std::to_string(gamma));
    if (!(delta > 0.0) || !std::isfinite(delta))
      throw std::invalid_argument("delta must be positive, got " + std::to_string(delta));
    // epsilon = 0 is allowed so that the linear systems can be exercised.
    if (!(epsilon >= 0.0 && epsilon < 1.0))
      throw std::invalid_argument("epsilon must lie in [0,1), got " + std::to_string(epsilon));
  }
};

struct BoussinesqParameters {
  double a1 = 0.0;
  double a2 = 0.0;
  double b1 = 0.0;
  std::array<double, 4> lambda{1.0, 1.0, 0.0, 0.0};
  // Positivity shift; empty means "choose automatically".
  std::optional<double> K;
  double alpha_scheme = 2.0 / 3.0;

  void validate() const {
    if (a2 < 0.0) throw std::invalid_argument("a2 must be nonnegative");
    if (b1 < 0.0) throw std::invalid_argument("b1 must be nonnegative");
    for (double l : lambda)
      if (l < 0.0 || l > 1.0) throw std::invalid_argument("lambda_i must lie in [0,1]");
    if (K && *K < 0.0) throw std::invalid_argument("K must be nonnegative");
    if (std::abs(alpha_scheme - 2.0 / 3.0) > 1e-15)
      throw std::invalid_argument("alpha_scheme is fixed to 2/3");
  }
};

// Linear map U -> M(U), stored by its values on the canonical basis.
class LinearMatrixMap {
 public:
  LinearMatrixMap() = default;
  explicit LinearMatrixMap(int dim) : basis_(dim, SmallMatrix::Zero(dim, dim)) {}
  explicit LinearMatrixMap(std::vector<SmallMatrix> basis) : basis_(std::move(basis)) {}

  int dimension() const { return static_cast<int>(basis_.size()); }
  const SmallMatrix& on_basis(int c) const { return basis_[c]; }
  SmallMatrix& on_basis(int c) { return basis_[c]; }

  template <class Vec>
  SmallMatrix operator()(const Vec& u) const {
    const int m = dimension();
    SmallMatrix out = SmallMatrix::Zero(m, m);
    for (int c = 0; c < m; ++c) out += u[c] * basis_[c];
    return out;
  }

  // adjoint(V) U = (*this)(U) V
  template <class Vec>
  SmallMatrix adjoint(const Vec& v) const {
    const int m = dimension();
    SmallVector vv(m);
    for (int r = 0; r < m; ++r) vv[r] = v[r];
    SmallMatrix out(m, m);
    for (int c = 0; c < m; ++c) out.col(c) = basis_[c] * vv;
    return out;
  }

  bool is_zero() const {
    for (const auto& b : basis_)
      if (!b.isZero(0.0)) return false;
    return true;
  }

  LinearMatrixMap left_multiplied(const SmallMatrix& A) const {
    std::vector<SmallMatrix> b;
    for (const auto& m : basis_) b.push_back(A * m);
    return LinearMatrixMap(std::move(b));
  }
  LinearMatrixMap right_multiplied(const SmallMatrix& A) const {
    std::vector<SmallMatrix> b;
    for (const auto& m : basis_) b.push_back(m * A);
    return LinearMatrixMap(std::move(b));
  }
  LinearMatrixMap operator+(const LinearMatrixMap& o) const {
    std::vector<SmallMatrix> b;
    for (int c = 0; c < dimension(); ++c) b.push_back(basis_[c] + o.basis_[c]);
    return LinearMatrixMap(std::move(b));
  }

 private:
  std::vector<SmallMatrix> basis_;
};

inline double min_eigenvalue(const SmallMatrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<SmallMatrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double asymmetry(const SmallMatrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace twolayer
