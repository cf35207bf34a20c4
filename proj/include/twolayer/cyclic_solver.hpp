#pragma once

#include "twolayer/core.hpp"
#include "twolayer/grid.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace twolayer {

// Block matrix on a periodic ring: block row i couples to block columns
// (i + k - p) mod N for k = 0..2p, each coupling an m x m block.
class CyclicBlockBanded {
 public:
  CyclicBlockBanded() = default;
  CyclicBlockBanded(std::size_t n_blocks, int m, int p)
      : n_(n_blocks), m_(m), p_(p), data_(n_blocks * (2 * p + 1) * m * m, 0.0) {
    if (p < 0 || p > 2) throw std::invalid_argument("stencil half-width must be 0, 1 or 2");
    if (n_blocks < static_cast<std::size_t>(2 * p + 3))
      throw std::invalid_argument("too few blocks for the requested half-width");
  }

  std::size_t blocks() const { return n_; }
  int block_size() const { return m_; }
  int half_width() const { return p_; }
  std::size_t rows() const { return n_ * m_; }

  // offset in [-p, p]
  double& operator()(std::size_t i, int offset, int r, int c) {
    return data_[((i * (2 * p_ + 1)) + (offset + p_)) * m_ * m_ + r * m_ + c];
  }
  double operator()(std::size_t i, int offset, int r, int c) const {
    return data_[((i * (2 * p_ + 1)) + (offset + p_)) * m_ * m_ + r * m_ + c];
  }

  template <class Mat>
  void add_block(std::size_t i, int offset, const Mat& b, double scale = 1.0) {
    for (int r = 0; r < m_; ++r)
      for (int c = 0; c < m_; ++c) (*this)(i, offset, r, c) += scale * b(r, c);
  }

  void fill_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

  // this = alpha * this + beta * other
  void combine(double alpha, const CyclicBlockBanded& other, double beta) {
    if (other.n_ != n_ || other.m_ != m_ || other.p_ != p_)
      throw std::invalid_argument("operator shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] = alpha * data_[k] + beta * other.data_[k];
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(rows(), 0.0);
    apply_into(x, y);
    return y;
  }

  void apply_into(const std::vector<double>& x, std::vector<double>& y) const {
    if (x.size() != rows()) throw std::invalid_argument("operator/vector size mismatch");
    y.assign(rows(), 0.0);
    const long n = static_cast<long>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      double* yi = y.data() + i * m_;
      for (int k = -p_; k <= p_; ++k) {
        const std::size_t j = static_cast<std::size_t>(((long(i) + k) % n + n) % n);
        const double* xj = x.data() + j * m_;
        for (int r = 0; r < m_; ++r) {
          double s = 0.0;
          for (int c = 0; c < m_; ++c) s += (*this)(i, k, r, c) * xj[c];
          yi[r] += s;
        }
      }
    }
  }

  double max_abs() const {
    double s = 0.0;
    for (double v : data_) s = std::max(s, std::abs(v));
    return s;
  }

 private:
  std::size_t n_ = 0;
  int m_ = 1;
  int p_ = 0;
  std::vector<double> data_;
};

// Banded LU of the interior plus a dense Schur complement for the last p
// block rows, which absorb the periodic corner couplings.
class CyclicBlockSolver {
 public:
  static constexpr double kPivotThreshold = 1e-13;

  void factor(const CyclicBlockBanded& A) {
    m_ = A.block_size();
    p_ = std::max(A.half_width(), 1);
    nblk_ = A.blocks();
    const std::size_t nb_blocks = static_cast<std::size_t>(p_);
    na_ = (nblk_ - nb_blocks) * m_;
    nb_ = nb_blocks * m_;
    kl_ = (p_ + 1) * m_ - 1;
    ldab_ = 2 * kl_ + kl_ + 1;
    ab_.assign(static_cast<std::size_t>(ldab_) * na_, 0.0);
    ipiv_.assign(na_, 0);
    Aab_.setZero(static_cast<Eigen::Index>(na_), static_cast<Eigen::Index>(nb_));
    Aba_.setZero(static_cast<Eigen::Index>(nb_), static_cast<Eigen::Index>(na_));
    Abb_.setZero(static_cast<Eigen::Index>(nb_), static_cast<Eigen::Index>(nb_));
    const double scale = A.max_abs();
    if (scale == 0.0) throw SolverError("singular matrix: all entries zero");

    const long n = static_cast<long>(nblk_);
    const int hp = A.half_width();
    for (std::size_t i = 0; i < nblk_; ++i) {
      for (int k = -hp; k <= hp; ++k) {
        const std::size_t j = static_cast<std::size_t>(((long(i) + k) % n + n) % n);
        for (int r = 0; r < m_; ++r) {
          const std::size_t gr = i * m_ + r;
          for (int c = 0; c < m_; ++c) {
            const double v = A(i, k, r, c);
            if (v == 0.0) continue;
            const std::size_t gc = j * m_ + c;
            add_entry(gr, gc, v);
          }
        }
      }
    }

    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(na_),
                                           static_cast<lapack_int>(na_), kl_, kl_, ab_.data(),
                                           ldab_, ipiv_.data());
    if (info < 0) throw SolverError("banded LU: invalid argument " + std::to_string(-info));
    if (info > 0) throw SolverError("singular matrix: zero pivot at row " + std::to_string(info));
    for (std::size_t j = 0; j < na_; ++j) {
      const double piv = ab_[j * ldab_ + 2 * kl_];
      if (std::abs(piv) < kPivotThreshold * scale)
        throw SolverError("near-singular matrix: pivot " + std::to_string(piv) + " at row " +
                          std::to_string(j));
    }

    // Z = A_aa^{-1} A_ab, S = A_bb - A_ba Z
    Z_ = Aab_;
    banded_solve(Z_.data(), static_cast<lapack_int>(nb_));
    Eigen::MatrixXd S = Abb_ - Aba_ * Z_;
    schur_.compute(S);
    const double piv = schur_.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (piv < kPivotThreshold * scale)
      throw SolverError("near-singular matrix: corner pivot " + std::to_string(piv));
  }

  std::vector<double> solve(const std::vector<double>& rhs) const {
    if (rhs.size() != na_ + nb_) throw std::invalid_argument("rhs size mismatch");
    std::vector<double> ya(rhs.begin(), rhs.begin() + na_);
    banded_solve(ya.data(), 1);
    Eigen::Map<const Eigen::VectorXd> rb(rhs.data() + na_, static_cast<Eigen::Index>(nb_));
    Eigen::Map<const Eigen::VectorXd> yav(ya.data(), static_cast<Eigen::Index>(na_));
    const Eigen::VectorXd xb = schur_.solve(Eigen::VectorXd(rb - Aba_ * yav));
    std::vector<double> x(na_ + nb_);
    Eigen::Map<Eigen::VectorXd> xa(x.data(), static_cast<Eigen::Index>(na_));
    xa = yav - Z_ * xb;
    for (std::size_t k = 0; k < nb_; ++k) x[na_ + k] = xb[static_cast<Eigen::Index>(k)];
    return x;
  }

 private:
  void add_entry(std::size_t gr, std::size_t gc, double v) {
    const bool ra = gr < na_, ca = gc < na_;
    if (ra && ca) {
      ab_[gc * ldab_ + (2 * kl_ + gr - gc)] += v;
    } else if (ra) {
      Aab_(static_cast<Eigen::Index>(gr), static_cast<Eigen::Index>(gc - na_)) += v;
    } else if (ca) {
      Aba_(static_cast<Eigen::Index>(gr - na_), static_cast<Eigen::Index>(gc)) += v;
    } else {
      Abb_(static_cast<Eigen::Index>(gr - na_), static_cast<Eigen::Index>(gc - na_)) += v;
    }
  }

  void banded_solve(double* b, lapack_int nrhs) const {
    const lapack_int info =
        LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(na_), kl_, kl_, nrhs,
                       ab_.data(), ldab_, ipiv_.data(), b, static_cast<lapack_int>(na_));
    if (info != 0) throw SolverError("banded triangular solve failed");
  }

  int m_ = 1, p_ = 1;
  std::size_t nblk_ = 0, na_ = 0, nb_ = 0;
  lapack_int kl_ = 0, ldab_ = 0;
  std::vector<double> ab_;
  std::vector<lapack_int> ipiv_;
  Eigen::MatrixXd Aab_, Aba_, Abb_, Z_;
  Eigen::PartialPivLU<Eigen::MatrixXd> schur_;
};

inline double residual_ratio(const CyclicBlockBanded& A, const std::vector<double>& x,
                             const std::vector<double>& b) {
  const std::vector<double> ax = A.apply(x);
  double rn = 0.0, bn = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    rn += (ax[k] - b[k]) * (ax[k] - b[k]);
    bn += b[k] * b[k];
  }
  return bn == 0.0 ? std::sqrt(rn) : std::sqrt(rn / bn);
}

inline constexpr double kResidualTolerance = 1e-10;

// Solve with one round of iterative refinement when the residual check fails.
inline std::vector<double> solve_checked(const CyclicBlockBanded& A, const CyclicBlockSolver& lu,
                                         const std::vector<double>& b, bool check,
                                         double tol = kResidualTolerance) {
  std::vector<double> x = lu.solve(b);
  if (!check) return x;
  double res = residual_ratio(A, x, b);
  for (int round = 0; round < 2 && res > tol; ++round) {
    const std::vector<double> ax = A.apply(x);
    std::vector<double> r(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) r[k] = b[k] - ax[k];
    const std::vector<double> dx = lu.solve(r);
    for (std::size_t k = 0; k < b.size(); ++k) x[k] += dx[k];
    res = residual_ratio(A, x, b);
  }
  if (!(res <= tol)) throw SolverError("linear solve residual " + std::to_string(res) + " exceeds tolerance");
  return x;
}

inline StateField solve_cyclic_block(const CyclicBlockBanded& A, const StateField& rhs) {
  if (A.blocks() != rhs.points() || A.block_size() != rhs.components)
    throw std::invalid_argument("operator does not match right-hand side shape");
  CyclicBlockSolver lu;
  lu.factor(A);
  StateField x(rhs.grid, rhs.components);
  x.values = solve_checked(A, lu, rhs.values, true);
  return x;
}

inline ScalarField solve_cyclic_block(const CyclicBlockBanded& A, const ScalarField& rhs) {
  if (A.blocks() != rhs.size() || A.block_size() != 1)
    throw std::invalid_argument("operator does not match right-hand side shape");
  CyclicBlockSolver lu;
  lu.factor(A);
  return ScalarField(rhs.grid, solve_checked(A, lu, rhs.values, true));
}

}  // namespace twolayer
