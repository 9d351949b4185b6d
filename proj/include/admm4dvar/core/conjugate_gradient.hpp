#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>

#include "admm4dvar/core/errors.hpp"
#include "admm4dvar/core/vector_ops.hpp"

namespace admm4dvar {

template <typename Op>
concept LinearOperator = requires(const Op& op, ConstView x) {
  { op(x) } -> std::convertible_to<StateVector>;
};

/// Plain conjugate gradient for a symmetric positive definite operator.
/// Converges when ||A x - b|| <= tol * ||b||; at most 2 * dim iterations.
template <LinearOperator Op>
StateVector cg_spd_solve(const Op& apply_a, ConstView b, double tol) {
  const std::size_t n = b.size();
  StateVector x(n, 0.0);
  const double b_norm = norm2(b);
  if (b_norm == 0.0) return x;

  StateVector r(b.begin(), b.end());
  StateVector p = r;
  double rr = norm2_squared(r);
  const double target = tol * b_norm;
  const std::size_t cap = 2 * n;

  for (std::size_t it = 0; it < cap; ++it) {
    if (std::sqrt(rr) <= target) return x;
    const StateVector ap = apply_a(ConstView(p));
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) throw SolverFailure("cg_spd_solve: operator is not positive definite");
    const double step = rr / pap;
    axpy(step, p, x);
    axpy(-step, ap, r);
    const double rr_next = norm2_squared(r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (std::sqrt(rr) <= target) return x;
  throw NonConvergence("cg_spd_solve: iteration cap reached", std::sqrt(rr) / b_norm);
}

}  // namespace admm4dvar
