#pragma once

#include <optional>

#include "admm4dvar/core/conjugate_gradient.hpp"
#include "admm4dvar/core/poisson.hpp"
#include "admm4dvar/core/vector_ops.hpp"

namespace admm4dvar {

/// Inner product used for the data and background terms of the objective.
///
/// Euclidean: <a, b>.
/// Energy:    <a, M b> with M = (-Laplacian_h)^{-1} on a Grid2D, i.e. the
///            squared velocity magnitude of a vorticity difference.
class NormOperator {
 public:
  static NormOperator euclidean() { return NormOperator(); }

  static NormOperator energy(Grid2D grid, SorParams sor = {}, double cg_tol = 1e-12) {
    NormOperator n;
    n.energy_ = EnergyData{grid, sor, cg_tol};
    return n;
  }

  bool is_energy() const noexcept { return energy_.has_value(); }

  /// M x
  StateVector weight(ConstView x) const {
    if (!energy_) return StateVector(x.begin(), x.end());
    StateVector psi = sor_poisson_solve(x, energy_->grid, energy_->sor);
    for (double& v : psi) v = -v;
    return psi;
  }

  double inner(ConstView a, ConstView b) const { return dot(a, weight(b)); }

  double squared(ConstView a) const { return energy_ ? inner(a, a) : norm2_squared(a); }

  double distance_squared(ConstView a, ConstView b) const {
    if (!energy_) return admm4dvar::distance_squared(a, b);
    return squared(subtract(a, b));
  }

  /// Solves (data_weight * M + plain_weight * I) u = M data_rhs + plain_rhs.
  ///
  /// For the energy norm both sides are multiplied by A = -Laplacian_h, giving
  /// the SPD system (data_weight * I + plain_weight * A) u = data_rhs + A plain_rhs,
  /// which is solved by conjugate gradients.
  StateVector solve_weighted(double data_weight, ConstView data_rhs, double plain_weight, ConstView plain_rhs) const {
    const std::size_t n = plain_rhs.size();
    if (!energy_ || data_weight == 0.0) {
      StateVector u(n);
      if (data_weight == 0.0) {
        for (std::size_t i = 0; i < n; ++i) u[i] = plain_rhs[i] / plain_weight;
      } else {
        for (std::size_t i = 0; i < n; ++i) u[i] = (data_rhs[i] + plain_rhs[i]) / (data_weight + plain_weight);
      }
      return u;
    }
    const Grid2D& g = energy_->grid;
    StateVector rhs = laplacian_apply(plain_rhs, g);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = data_rhs[i] - rhs[i];
    auto op = [&](ConstView x) {
      StateVector y = laplacian_apply(x, g);
      for (std::size_t i = 0; i < n; ++i) y[i] = data_weight * x[i] - plain_weight * y[i];
      return y;
    };
    return cg_spd_solve(op, rhs, energy_->cg_tol);
  }

 private:
  struct EnergyData {
    Grid2D grid;
    SorParams sor;
    double cg_tol;
  };

  NormOperator() = default;

  std::optional<EnergyData> energy_;
};

}  // namespace admm4dvar
