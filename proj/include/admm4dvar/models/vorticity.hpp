#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "admm4dvar/core/errors.hpp"
#include "admm4dvar/core/poisson.hpp"
#include "admm4dvar/core/random.hpp"
#include "admm4dvar/core/vector_ops.hpp"

// Large-scale 2D vorticity dynamics
//
//   omega_t + J(psi, omega) = -kappa Laplacian^2 omega,   omega = Laplacian psi,
//
// on a square box with omega = psi = 0 on the boundary. The advection term
// uses the second-order Arakawa Jacobian; time stepping is a two-stage
// prediction-correction scheme that reuses psi_k in both stages.
namespace admm4dvar::vorticity {

/// Arakawa Jacobian J(u, v), the average of the three second-order forms,
/// evaluated with zero ghost values outside the interior.
inline StateVector arakawa_jacobian(ConstView u, ConstView v, const Grid2D& g) {
  const auto n = static_cast<std::ptrdiff_t>(g.m);
  const double scale = 1.0 / (12.0 * g.dx * g.dy);
  StateVector out(g.interior_dim());
  for (std::ptrdiff_t i = 1; i < n; ++i)
    for (std::ptrdiff_t j = 1; j < n; ++j) {
      auto U = [&](std::ptrdiff_t a, std::ptrdiff_t b) { return g.at(u, a, b); };
      auto V = [&](std::ptrdiff_t a, std::ptrdiff_t b) { return g.at(v, a, b); };
      const double j1 = (U(i + 1, j) - U(i - 1, j)) * (V(i, j + 1) - V(i, j - 1)) -
                        (U(i, j + 1) - U(i, j - 1)) * (V(i + 1, j) - V(i - 1, j));
      const double j2 = U(i + 1, j) * (V(i + 1, j + 1) - V(i + 1, j - 1)) -
                        U(i - 1, j) * (V(i - 1, j + 1) - V(i - 1, j - 1)) -
                        U(i, j + 1) * (V(i + 1, j + 1) - V(i - 1, j + 1)) +
                        U(i, j - 1) * (V(i + 1, j - 1) - V(i - 1, j - 1));
      const double j3 = (U(i + 1, j + 1) - U(i - 1, j + 1)) * V(i, j + 1) -
                        (U(i + 1, j - 1) - U(i - 1, j - 1)) * V(i, j - 1) -
                        (U(i + 1, j + 1) - U(i + 1, j - 1)) * V(i + 1, j) +
                        (U(i - 1, j + 1) - U(i - 1, j - 1)) * V(i - 1, j);
      out[g.index(i, j)] = scale * (j1 + j2 + j3);
    }
  return out;
}

/// The linear operator v -> J(a, v) for fixed a, stored as its 8-neighbour
/// stencil coefficients (the centre coefficient is always zero).
class ArakawaOperator {
 public:
  static constexpr std::array<std::array<int, 2>, 8> kOffsets{
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

  ArakawaOperator(ConstView a, const Grid2D& g) : grid_(g), coeff_(g.interior_dim()) {
    const auto n = static_cast<std::ptrdiff_t>(g.m);
    const double scale = 1.0 / (12.0 * g.dx * g.dy);
    for (std::ptrdiff_t i = 1; i < n; ++i)
      for (std::ptrdiff_t j = 1; j < n; ++j) {
        auto A = [&](std::ptrdiff_t p, std::ptrdiff_t q) { return g.at(a, p, q); };
        std::array<double, 8>& c = coeff_[g.index(i, j)];
        // v(i+1, j), v(i-1, j), v(i, j+1), v(i, j-1)
        c[0] = -(A(i, j + 1) - A(i, j - 1)) - (A(i + 1, j + 1) - A(i + 1, j - 1));
        c[1] = (A(i, j + 1) - A(i, j - 1)) + (A(i - 1, j + 1) - A(i - 1, j - 1));
        c[2] = (A(i + 1, j) - A(i - 1, j)) + (A(i + 1, j + 1) - A(i - 1, j + 1));
        c[3] = -(A(i + 1, j) - A(i - 1, j)) - (A(i + 1, j - 1) - A(i - 1, j - 1));
        // corners v(i+1, j+1), v(i+1, j-1), v(i-1, j+1), v(i-1, j-1)
        c[4] = A(i + 1, j) - A(i, j + 1);
        c[5] = A(i, j - 1) - A(i + 1, j);
        c[6] = A(i, j + 1) - A(i - 1, j);
        c[7] = A(i - 1, j) - A(i, j - 1);
        for (double& x : c) x *= scale;
      }
  }

  const Grid2D& grid() const noexcept { return grid_; }

  /// J(a, v)
  StateVector apply(ConstView v) const {
    const auto n = static_cast<std::ptrdiff_t>(grid_.m);
    StateVector out(grid_.interior_dim(), 0.0);
    for (std::ptrdiff_t i = 1; i < n; ++i)
      for (std::ptrdiff_t j = 1; j < n; ++j) {
        const std::array<double, 8>& c = coeff_[grid_.index(i, j)];
        double s = 0.0;
        for (std::size_t q = 0; q < kOffsets.size(); ++q) s += c[q] * grid_.at(v, i + kOffsets[q][0], j + kOffsets[q][1]);
        out[grid_.index(i, j)] = s;
      }
    return out;
  }

  /// Transpose, by scattering each row's coefficients into the columns they touch.
  StateVector apply_transpose(ConstView w) const {
    const auto n = static_cast<std::ptrdiff_t>(grid_.m);
    StateVector out(grid_.interior_dim(), 0.0);
    for (std::ptrdiff_t i = 1; i < n; ++i)
      for (std::ptrdiff_t j = 1; j < n; ++j) {
        const double wij = w[grid_.index(i, j)];
        if (wij == 0.0) continue;
        const std::array<double, 8>& c = coeff_[grid_.index(i, j)];
        for (std::size_t q = 0; q < kOffsets.size(); ++q) {
          const std::ptrdiff_t p = i + kOffsets[q][0];
          const std::ptrdiff_t r = j + kOffsets[q][1];
          if (p <= 0 || r <= 0 || p >= n || r >= n) continue;
          out[grid_.index(p, r)] += c[q] * wij;
        }
      }
    return out;
  }

  DenseMatrix materialize() const {
    const std::size_t d = grid_.interior_dim();
    DenseMatrix mat(d, d);
    StateVector e(d, 0.0);
    for (std::size_t col = 0; col < d; ++col) {
      e[col] = 1.0;
      const StateVector column = apply(e);
      for (std::size_t row = 0; row < d; ++row) mat(row, col) = column[row];
      e[col] = 0.0;
    }
    return mat;
  }

 private:
  Grid2D grid_;
  std::vector<std::array<double, 8>> coeff_;
};

/// Laplacian applied twice, with a zero ghost layer for both omega and Laplacian omega.
inline StateVector biharmonic_apply(ConstView w, const Grid2D& g) { return laplacian_apply(laplacian_apply(w, g), g); }

struct VorticityConfig {
  Grid2D grid{20, 0.2, 0.2};
  double dt = 3.0 * 0.2 * 0.2;
  double kappa = 0.001 * 0.2 * 0.2;
  SorParams sor{};

  /// The reference setup scaled to a given grid: dt = 3 dx dy, kappa = 0.001 dx dy.
  static VorticityConfig scaled(std::size_t m, double spacing) {
    VorticityConfig c;
    c.grid = Grid2D(m, spacing, spacing);
    c.dt = 3.0 * spacing * spacing;
    c.kappa = 0.001 * spacing * spacing;
    return c;
  }
};

class VorticityModel {
 public:
  explicit VorticityModel(VorticityConfig cfg = {}) : cfg_(cfg) {
    if (!(cfg_.dt > 0.0)) throw ConfigError("vorticity: dt must be positive");
    if (!(cfg_.kappa >= 0.0)) throw ConfigError("vorticity: kappa must be non-negative");
  }

  const VorticityConfig& config() const noexcept { return cfg_; }
  const Grid2D& grid() const noexcept { return cfg_.grid; }
  std::size_t dim() const noexcept { return cfg_.grid.interior_dim(); }

  /// psi = Laplacian^{-1} omega
  StateVector streamfunction(ConstView w) const { return sor_poisson_solve(w, cfg_.grid, cfg_.sor); }

  /// omega^p = omega - dt (J(psi, omega) + kappa Laplacian^2 omega)
  StateVector predict(ConstView w) const {
    check(w);
    return predict_with(w, streamfunction(w));
  }

  StateVector step(ConstView w) const {
    check(w);
    const StateVector psi = streamfunction(w);
    const StateVector wp = predict_with(w, psi);
    return advance(w, psi, wp);
  }

  StateVector tangent(ConstView w, ConstView dv) const {
    check(w);
    check(dv);
    const Grid2D& g = cfg_.grid;
    const double dt = cfg_.dt;
    const StateVector psi = streamfunction(w);
    const StateVector wp = predict_with(w, psi);
    const StateVector dpsi = streamfunction(dv);

    // d omega^p = dv - dt (J(psi, dv) + J(dpsi, omega) + kappa B dv)
    StateVector dwp(dv.begin(), dv.end());
    axpy(-dt, arakawa_jacobian(psi, dv, g), dwp);
    axpy(-dt, arakawa_jacobian(dpsi, w, g), dwp);
    axpy(-dt * cfg_.kappa, biharmonic_apply(dv, g), dwp);

    // d omega_{k+1} = dv - dt (J(psi, d omega^p) + J(dpsi, omega^p) + kappa B d omega^p)
    StateVector out(dv.begin(), dv.end());
    axpy(-dt, arakawa_jacobian(psi, dwp, g), out);
    axpy(-dt, arakawa_jacobian(dpsi, wp, g), out);
    axpy(-dt * cfg_.kappa, biharmonic_apply(dwp, g), out);
    return out;
  }

  /// Transpose of tangent(). With A = J[psi] + kappa B:
  ///   T^T w = w - dt (y - dt A^T y) + dt Lap^{-1} (J[omega^p]^T w - dt J[omega]^T y),  y = A^T w.
  StateVector adjoint(ConstView w, ConstView dw) const {
    check(w);
    check(dw);
    const Grid2D& g = cfg_.grid;
    const double dt = cfg_.dt;
    const StateVector psi = streamfunction(w);
    const StateVector wp = predict_with(w, psi);

    const ArakawaOperator adv(psi, g);
    auto a_transpose = [&](ConstView x) {
      StateVector r = adv.apply_transpose(x);
      axpy(cfg_.kappa, biharmonic_apply(x, g), r);
      return r;
    };

    const StateVector y = a_transpose(dw);
    const StateVector ay = a_transpose(y);

    StateVector src = ArakawaOperator(wp, g).apply_transpose(dw);
    axpy(-dt, ArakawaOperator(w, g).apply_transpose(y), src);
    const StateVector back = streamfunction(src);

    StateVector out(dw.begin(), dw.end());
    axpy(-dt, y, out);
    axpy(dt * dt, ay, out);
    axpy(dt, back, out);
    return out;
  }

  /// <a, (-Laplacian)^{-1} b>
  double energy_inner(ConstView a, ConstView b) const {
    check(a);
    check(b);
    return -dot(a, streamfunction(b));
  }

  /// omega_{0,ij} ~ 5 N(0, 1)
  StateVector random_initial_state(std::uint64_t seed, double amplitude = 5.0) const {
    RandomStream stream(seed);
    StateVector w = gaussian_draw(stream, dim());
    for (double& x : w) x *= amplitude;
    return w;
  }

 private:
  void check(ConstView w) const {
    if (w.size() != dim()) throw ConfigError("vorticity: field has wrong dimension");
  }

  StateVector predict_with(ConstView w, ConstView psi) const {
    StateVector wp(w.begin(), w.end());
    axpy(-cfg_.dt, arakawa_jacobian(psi, w, cfg_.grid), wp);
    axpy(-cfg_.dt * cfg_.kappa, biharmonic_apply(w, cfg_.grid), wp);
    return wp;
  }

  StateVector advance(ConstView w, ConstView psi, ConstView wp) const {
    StateVector out(w.begin(), w.end());
    axpy(-cfg_.dt, arakawa_jacobian(psi, wp, cfg_.grid), out);
    axpy(-cfg_.dt * cfg_.kappa, biharmonic_apply(wp, cfg_.grid), out);
    return out;
  }

  VorticityConfig cfg_;
};

}  // namespace admm4dvar::vorticity
