#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "admm4dvar/core/errors.hpp"
#include "admm4dvar/core/vector_ops.hpp"

namespace admm4dvar {

/// Uniform square-cell grid with m intervals per axis and a zero Dirichlet
/// boundary. Fields store only the (m-1)^2 interior nodes, row-major in (i, j)
/// with i the x index.
struct Grid2D {
  std::size_t m = 20;
  double dx = 0.2;
  double dy = 0.2;

  Grid2D() = default;
  Grid2D(std::size_t points, double spacing_x, double spacing_y) : m(points), dx(spacing_x), dy(spacing_y) {
    if (m < 3) throw ConfigError("Grid2D: m must be at least 3");
    if (!(dx > 0.0) || !(dy > 0.0)) throw ConfigError("Grid2D: spacings must be positive");
  }

  std::size_t side() const noexcept { return m - 1; }
  std::size_t interior_dim() const noexcept { return side() * side(); }

  /// Flat index for interior node (i, j), 1 <= i, j <= m-1.
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return (i - 1) * side() + (j - 1); }

  /// Value at (i, j) with the zero ghost layer for i, j in {0, m}.
  double at(ConstView f, std::ptrdiff_t i, std::ptrdiff_t j) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(m);
    if (i <= 0 || j <= 0 || i >= n || j >= n) return 0.0;
    return f[index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
  }
};

/// Standard 5-point Laplacian (negative definite) with zero ghost values.
inline StateVector laplacian_apply(ConstView f, const Grid2D& g) {
  const double cx = 1.0 / (g.dx * g.dx);
  const double cy = 1.0 / (g.dy * g.dy);
  const auto n = static_cast<std::ptrdiff_t>(g.m);
  StateVector out(g.interior_dim());
  for (std::ptrdiff_t i = 1; i < n; ++i)
    for (std::ptrdiff_t j = 1; j < n; ++j) {
      const double c = g.at(f, i, j);
      out[g.index(i, j)] = cx * (g.at(f, i + 1, j) - 2.0 * c + g.at(f, i - 1, j)) +
                           cy * (g.at(f, i, j + 1) - 2.0 * c + g.at(f, i, j - 1));
    }
  return out;
}

/// Eigenvalue of the 5-point Laplacian for mode sin(p pi i/m) sin(q pi j/m).
inline double laplacian_eigenvalue(const Grid2D& g, std::size_t p, std::size_t q) {
  const double sx = std::sin(std::numbers::pi * static_cast<double>(p) / (2.0 * static_cast<double>(g.m)));
  const double sy = std::sin(std::numbers::pi * static_cast<double>(q) / (2.0 * static_cast<double>(g.m)));
  return -4.0 * sx * sx / (g.dx * g.dx) - 4.0 * sy * sy / (g.dy * g.dy);
}

struct SorParams {
  double relax = 0.0;  ///< 0 selects 2 / (1 + sin(pi/m))
  double tol = 1e-10;  ///< absolute max-norm residual
  std::size_t max_sweeps = 20000;

  double effective_relax(const Grid2D& g) const {
    if (relax != 0.0) return relax;
    return 2.0 / (1.0 + std::sin(std::numbers::pi / static_cast<double>(g.m)));
  }
};

namespace detail {
inline double poisson_residual_inf(ConstView psi, ConstView rhs, const Grid2D& g) {
  const StateVector lap = laplacian_apply(psi, g);
  double r = 0.0;
  for (std::size_t i = 0; i < lap.size(); ++i) r = std::max(r, std::abs(lap[i] - rhs[i]));
  return r;
}
}  // namespace detail

/// Solves Delta_h psi = rhs with zero Dirichlet data by lexicographic SOR,
/// starting from psi = 0. The residual is checked every few sweeps, so the
/// sweep order and the result are deterministic.
inline StateVector sor_poisson_solve(ConstView rhs, const Grid2D& g, const SorParams& params = {}) {
  if (rhs.size() != g.interior_dim()) throw ConfigError("sor_poisson_solve: rhs has wrong dimension");
  const double omega = params.effective_relax(g);
  if (!(omega > 0.0 && omega < 2.0)) throw ConfigError("sor_poisson_solve: relaxation must lie in (0, 2)");

  const std::size_t s = g.side();
  const double cx = 1.0 / (g.dx * g.dx);
  const double cy = 1.0 / (g.dy * g.dy);
  const double inv_diag = 1.0 / (-2.0 * cx - 2.0 * cy);

  StateVector psi(g.interior_dim(), 0.0);
  if (norm_inf(rhs) <= params.tol) return psi;

  constexpr std::size_t kCheckEvery = 4;
  double residual = 0.0;
  for (std::size_t sweep = 1; sweep <= params.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < s; ++i) {
      const double* up = i + 1 < s ? &psi[(i + 1) * s] : nullptr;
      const double* down = i > 0 ? &psi[(i - 1) * s] : nullptr;
      double* row = &psi[i * s];
      const double* b = &rhs[i * s];
      for (std::size_t j = 0; j < s; ++j) {
        const double nx = (up ? up[j] : 0.0) + (down ? down[j] : 0.0);
        const double ny = (j + 1 < s ? row[j + 1] : 0.0) + (j > 0 ? row[j - 1] : 0.0);
        const double gs = (b[j] - cx * nx - cy * ny) * inv_diag;
        row[j] += omega * (gs - row[j]);
      }
    }
    if (sweep % kCheckEvery == 0 || sweep == params.max_sweeps) {
      residual = detail::poisson_residual_inf(psi, rhs, g);
      if (residual <= params.tol) return psi;
    }
  }
  throw NonConvergence("sor_poisson_solve: sweep budget exhausted", residual);
}

}  // namespace admm4dvar
