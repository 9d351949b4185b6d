#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "admm4dvar/core/errors.hpp"
#include "admm4dvar/core/vector_ops.hpp"

namespace admm4dvar {

/// Tridiagonal matrix with sub-diagonal `lower`, main `diagonal` and super-diagonal `upper`.
/// lower[i] sits at (i+1, i), upper[i] at (i, i+1).
struct TridiagonalMatrix {
  std::vector<double> lower;
  std::vector<double> diagonal;
  std::vector<double> upper;

  TridiagonalMatrix() = default;
  TridiagonalMatrix(std::vector<double> lo, std::vector<double> diag, std::vector<double> up)
      : lower(std::move(lo)), diagonal(std::move(diag)), upper(std::move(up)) {
    if (diagonal.empty() || lower.size() + 1 != diagonal.size() || upper.size() + 1 != diagonal.size())
      throw ConfigError("TridiagonalMatrix: band lengths must be (n-1, n, n-1)");
  }

  /// Constant-band (Toeplitz) matrix.
  static TridiagonalMatrix constant(std::size_t n, double lo, double diag, double up) {
    return {std::vector<double>(n - 1, lo), std::vector<double>(n, diag), std::vector<double>(n - 1, up)};
  }

  std::size_t size() const noexcept { return diagonal.size(); }

  StateVector apply(ConstView x) const {
    const std::size_t n = size();
    StateVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diagonal[i] * x[i];
      if (i > 0) s += lower[i - 1] * x[i - 1];
      if (i + 1 < n) s += upper[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

  StateVector apply_transpose(ConstView x) const {
    const std::size_t n = size();
    StateVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diagonal[i] * x[i];
      if (i > 0) s += upper[i - 1] * x[i - 1];
      if (i + 1 < n) s += lower[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

  TridiagonalMatrix transposed() const { return {upper, diagonal, lower}; }

  DenseMatrix to_dense() const {
    const std::size_t n = size();
    DenseMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      d(i, i) = diagonal[i];
      if (i + 1 < n) {
        d(i, i + 1) = upper[i];
        d(i + 1, i) = lower[i];
      }
    }
    return d;
  }
};

inline constexpr double kTridiagonalPivotTolerance = 1e-14;

/// Thomas algorithm without pivoting. Intended for the diagonally dominant and
/// SPD systems the models produce.
inline StateVector tridiagonal_solve(const TridiagonalMatrix& a, ConstView b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw ConfigError("tridiagonal_solve: dimension mismatch");

  std::vector<double> c_prime(n);
  StateVector x(n);

  double pivot = a.diagonal[0];
  if (std::abs(pivot) < kTridiagonalPivotTolerance) throw SolverFailure("tridiagonal_solve: zero pivot at row 0");
  c_prime[0] = n > 1 ? a.upper[0] / pivot : 0.0;
  x[0] = b[0] / pivot;

  for (std::size_t i = 1; i < n; ++i) {
    pivot = a.diagonal[i] - a.lower[i - 1] * c_prime[i - 1];
    if (std::abs(pivot) < kTridiagonalPivotTolerance)
      throw SolverFailure("tridiagonal_solve: zero pivot at row " + std::to_string(i));
    c_prime[i] = i + 1 < n ? a.upper[i] / pivot : 0.0;
    x[i] = (b[i] - a.lower[i - 1] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c_prime[i] * x[i + 1];
  return x;
}

}  // namespace admm4dvar
