#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace admm4dvar {

/// Model degrees of freedom at one time level.
using StateVector = std::vector<double>;
using ConstView = std::span<const double>;

inline double dot(ConstView a, ConstView b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2_squared(ConstView a) { return dot(a, a); }

inline double norm2(ConstView a) { return std::sqrt(norm2_squared(a)); }

inline double norm_inf(ConstView a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

/// y += alpha * x
inline void axpy(double alpha, ConstView x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline StateVector add(ConstView a, ConstView b) {
  assert(a.size() == b.size());
  StateVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline StateVector subtract(ConstView a, ConstView b) {
  assert(a.size() == b.size());
  StateVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline StateVector scaled(double alpha, ConstView a) {
  StateVector r(a.begin(), a.end());
  for (double& x : r) x *= alpha;
  return r;
}

inline double distance_squared(ConstView a, ConstView b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline bool all_finite(ConstView a) {
  return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

/// Row-major dense matrix, used for materialized tangent maps and test oracles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  StateVector apply(ConstView x) const {
    assert(x.size() == cols_);
    StateVector y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const double* row = data_.data() + r * cols_;
      double s = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) s += row[c] * x[c];
      y[r] = s;
    }
    return y;
  }

  StateVector apply_transpose(ConstView x) const {
    assert(x.size() == rows_);
    StateVector y(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const double* row = data_.data() + r * cols_;
      const double xr = x[r];
      if (xr == 0.0) continue;
      for (std::size_t c = 0; c < cols_; ++c) y[c] += row[c] * xr;
    }
    return y;
  }

  DenseMatrix operator*(const DenseMatrix& other) const {
    assert(cols_ == other.rows_);
    DenseMatrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const double a = (*this)(i, k);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
      }
    return out;
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace admm4dvar
