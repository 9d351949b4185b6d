#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "admm4dvar/core/errors.hpp"
#include "admm4dvar/core/tridiagonal.hpp"
#include "admm4dvar/core/vector_ops.hpp"

// Viscous Burgers' equation u_t + u u_x = gamma u_xx on [0, pi] with
// u(0) = u(pi) = 0, advanced by forward Euler under three spatial
// discretizations. Each model exposes one time step, its tangent and adjoint.
namespace admm4dvar::burgers {

/// Nodal samples sin(x_i), x_i = i pi / m, i = 1..m-1.
inline StateVector nodal_sine(std::size_t m) {
  StateVector s(m - 1);
  for (std::size_t i = 1; i < m; ++i) s[i - 1] = std::sin(static_cast<double>(i) * std::numbers::pi / static_cast<double>(m));
  return s;
}

// ---------------------------------------------------------------------------
// Central finite differences
// ---------------------------------------------------------------------------

struct FDConfig {
  std::size_t m = 100;
  double gamma = 0.05;
  double dt = 0.005;

  double dx() const { return std::numbers::pi / static_cast<double>(m); }
  double diffusion_ratio() const { return gamma * dt / (dx() * dx()); }
};

class FDModel {
 public:
  explicit FDModel(FDConfig cfg = {}) : cfg_(cfg) {
    if (cfg_.m < 3) throw ConfigError("burgers-fd: m must be at least 3");
    if (!(cfg_.dt > 0.0) || !(cfg_.gamma >= 0.0)) throw ConfigError("burgers-fd: dt > 0 and gamma >= 0 required");
    if (!(2.0 * cfg_.diffusion_ratio() < 1.0))
      throw ConfigError("burgers-fd: forward Euler unstable, need 2 gamma dt / dx^2 < 1 (got " +
                        std::to_string(2.0 * cfg_.diffusion_ratio()) + ")");
  }

  const FDConfig& config() const noexcept { return cfg_; }
  std::size_t dim() const noexcept { return cfg_.m - 1; }

  StateVector step(ConstView u) const { return step_impl(u, nullptr); }

  /// Same as step(); also adds the number of quadratic products evaluated.
  StateVector step_counting(ConstView u, std::size_t& quadratic_terms) const { return step_impl(u, &quadratic_terms); }

  StateVector tangent(ConstView u, ConstView v) const {
    check(u);
    check(v);
    const std::size_t n = dim();
    const double r = cfg_.diffusion_ratio();
    const double c = cfg_.dt / (2.0 * cfg_.dx());
    StateVector out(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = (1.0 - 2.0 * r) * v[i];
      if (i > 0) s += (r + c * u[i - 1]) * v[i - 1];
      if (i + 1 < n) s += (r - c * u[i + 1]) * v[i + 1];
      out[i] = s;
    }
    return out;
  }

  StateVector adjoint(ConstView u, ConstView w) const {
    check(u);
    check(w);
    const std::size_t n = dim();
    const double r = cfg_.diffusion_ratio();
    const double c = cfg_.dt / (2.0 * cfg_.dx());
    StateVector out(n);
    for (std::size_t j = 0; j < n; ++j) {
      // column j of the tangent: rows j-1 (super), j (diag), j+1 (sub)
      double s = (1.0 - 2.0 * r) * w[j];
      if (j > 0) s += (r - c * u[j]) * w[j - 1];
      if (j + 1 < n) s += (r + c * u[j]) * w[j + 1];
      out[j] = s;
    }
    return out;
  }

  /// u_{0,i} = sin(i pi / m)
  StateVector initial_state() const { return nodal_sine(cfg_.m); }

 private:
  void check(ConstView u) const {
    if (u.size() != dim()) throw ConfigError("burgers-fd: state has wrong dimension");
  }

  StateVector step_impl(ConstView u, std::size_t* count) const {
    check(u);
    const std::size_t n = dim();
    const double r = cfg_.diffusion_ratio();
    const double c = cfg_.dt / (4.0 * cfg_.dx());
    StateVector out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? u[i - 1] : 0.0;
      const double right = i + 1 < n ? u[i + 1] : 0.0;
      out[i] = (r * left + c * left * left) + (1.0 - 2.0 * r) * u[i] + (r * right - c * right * right);
    }
    if (count) *count += 2 * n;
    return out;
  }

  FDConfig cfg_;
};

// ---------------------------------------------------------------------------
// Galerkin finite elements with piecewise-linear hat functions
// ---------------------------------------------------------------------------

struct FEMConfig {
  std::size_t m = 100;
  double gamma = 0.05;
  double dt = 0.002;

  double dx() const { return std::numbers::pi / static_cast<double>(m); }
};

/// Mass matrix: dx * tridiag(1/6, 2/3, 1/6).
inline TridiagonalMatrix fem_mass_matrix(std::size_t m) {
  const double h = std::numbers::pi / static_cast<double>(m);
  return TridiagonalMatrix::constant(m - 1, h / 6.0, 2.0 * h / 3.0, h / 6.0);
}

/// Stiffness matrix: (1/dx) * tridiag(-1, 2, -1).
inline TridiagonalMatrix fem_stiffness_matrix(std::size_t m) {
  const double h = std::numbers::pi / static_cast<double>(m);
  return TridiagonalMatrix::constant(m - 1, -1.0 / h, 2.0 / h, -1.0 / h);
}

/// Convection matrix S1[u]: diagonal (u^{i+1} - u^{i-1})/3, off-diagonals
/// (u^{i+1} - u^i)/6 between rows i and i+1, with u^0 = u^m = 0. S1[u] u is the
/// Galerkin projection of u u_x onto the hat functions.
inline TridiagonalMatrix fem_assemble_s1(ConstView u) {
  const std::size_t n = u.size();
  auto at = [&](std::size_t node) { return node == 0 || node > n ? 0.0 : u[node - 1]; };  // node in 0..m
  std::vector<double> lo(n - 1), diag(n), up(n - 1);
  for (std::size_t i = 1; i <= n; ++i) diag[i - 1] = (at(i + 1) - at(i - 1)) / 3.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double off = (at(i + 1) - at(i)) / 6.0;
    up[i - 1] = off;
    lo[i - 1] = off;
  }
  return {std::move(lo), std::move(diag), std::move(up)};
}

/// S2[u] such that S1[u] + S2[u] is the Jacobian of u -> S1[u] u.
inline TridiagonalMatrix fem_assemble_s2(ConstView u) {
  const std::size_t n = u.size();
  auto at = [&](std::size_t node) { return node == 0 || node > n ? 0.0 : u[node - 1]; };
  std::vector<double> lo(n - 1), diag(n), up(n - 1);
  for (std::size_t i = 1; i <= n; ++i) diag[i - 1] = (at(i - 1) - at(i + 1)) / 6.0;
  for (std::size_t i = 1; i < n; ++i) {
    up[i - 1] = (2.0 * at(i) + at(i + 1)) / 6.0;   // (i, i+1)
    lo[i - 1] = -(at(i) + 2.0 * at(i + 1)) / 6.0;  // (i+1, i)
  }
  return {std::move(lo), std::move(diag), std::move(up)};
}

class FEMModel {
 public:
  explicit FEMModel(FEMConfig cfg = {})
      : cfg_(cfg), mass_(check_and_mass(cfg_)), stiffness_(fem_stiffness_matrix(cfg_.m)) {
    // Largest eigenvalue of R^{-1} T is below 12 / dx^2.
    const double h = cfg_.dx();
    if (!(cfg_.gamma * cfg_.dt * 12.0 / (h * h) < 2.0))
      throw ConfigError("burgers-fem: forward Euler unstable, need 12 gamma dt / dx^2 < 2");
  }

  const FEMConfig& config() const noexcept { return cfg_; }
  const TridiagonalMatrix& mass() const noexcept { return mass_; }
  const TridiagonalMatrix& stiffness() const noexcept { return stiffness_; }
  std::size_t dim() const noexcept { return cfg_.m - 1; }

  StateVector step(ConstView u) const {
    std::size_t unused = 0;
    return step_counting(u, unused);
  }

  StateVector step_counting(ConstView u, std::size_t& quadratic_terms) const {
    check(u);
    const TridiagonalMatrix s1 = fem_assemble_s1(u);
    StateVector rhs = s1.apply(u);
    quadratic_terms += 2 * (3 * dim() - 2);
    axpy(cfg_.gamma, stiffness_.apply(u), rhs);
    const StateVector incr = tridiagonal_solve(mass_, rhs);
    StateVector out(u.begin(), u.end());
    axpy(-cfg_.dt, incr, out);
    return out;
  }

  /// [I - dt (R^{-1} S1 + R^{-1} S2 + gamma R^{-1} T)] v
  StateVector tangent(ConstView u, ConstView v) const {
    check(u);
    check(v);
    StateVector rhs = fem_assemble_s1(u).apply(v);
    axpy(1.0, fem_assemble_s2(u).apply(v), rhs);
    axpy(cfg_.gamma, stiffness_.apply(v), rhs);
    StateVector out(v.begin(), v.end());
    axpy(-cfg_.dt, tridiagonal_solve(mass_, rhs), out);
    return out;
  }

  /// [I - dt (S1^T R^{-1} + S2^T R^{-1} + gamma T R^{-1})] w, using R = R^T.
  StateVector adjoint(ConstView u, ConstView w) const {
    check(u);
    check(w);
    const StateVector z = tridiagonal_solve(mass_, w);
    StateVector acc = fem_assemble_s1(u).apply_transpose(z);
    axpy(1.0, fem_assemble_s2(u).apply_transpose(z), acc);
    axpy(cfg_.gamma, stiffness_.apply(z), acc);
    StateVector out(w.begin(), w.end());
    axpy(-cfg_.dt, acc, out);
    return out;
  }

  /// u_0 = R^{-1} T sin[x]
  StateVector initial_state() const { return tridiagonal_solve(mass_, stiffness_.apply(nodal_sine(cfg_.m))); }

 private:
  static TridiagonalMatrix check_and_mass(const FEMConfig& c) {
    if (c.m < 3) throw ConfigError("burgers-fem: m must be at least 3");
    if (!(c.dt > 0.0) || !(c.gamma >= 0.0)) throw ConfigError("burgers-fem: dt > 0 and gamma >= 0 required");
    return fem_mass_matrix(c.m);
  }

  void check(ConstView u) const {
    if (u.size() != dim()) throw ConfigError("burgers-fem: state has wrong dimension");
  }

  FEMConfig cfg_;
  TridiagonalMatrix mass_;
  TridiagonalMatrix stiffness_;
};

// ---------------------------------------------------------------------------
// Sine-series Galerkin (spectral) method
// ---------------------------------------------------------------------------

struct SpectralConfig {
  std::size_t m = 99;  ///< number of sine modes sin(i x), i = 1..m
  double gamma = 0.05;
  double dt = 0.002;
};

class SpectralModel {
 public:
  explicit SpectralModel(SpectralConfig cfg = {}) : cfg_(cfg) {
    if (cfg_.m < 2) throw ConfigError("burgers-spectral: need at least 2 modes");
    if (!(cfg_.dt > 0.0) || !(cfg_.gamma >= 0.0))
      throw ConfigError("burgers-spectral: dt > 0 and gamma >= 0 required");
    const double mm = static_cast<double>(cfg_.m);
    if (!(cfg_.gamma * mm * mm * cfg_.dt < 2.0))
      throw ConfigError("burgers-spectral: forward Euler unstable, need gamma m^2 dt < 2");
  }

  const SpectralConfig& config() const noexcept { return cfg_; }
  std::size_t dim() const noexcept { return cfg_.m; }

  StateVector step(ConstView u) const {
    std::size_t unused = 0;
    return step_counting(u, unused);
  }

  StateVector step_counting(ConstView u, std::size_t& quadratic_terms) const {
    check(u);
    const std::size_t m = cfg_.m;
    const double dt = cfg_.dt;
    const double g = cfg_.gamma;
    // a(l) is mode l (1-based) with a(0) = 0.
    auto a = [&](std::size_t l) { return l == 0 ? 0.0 : u[l - 1]; };
    StateVector out(m);

    double first = 0.0;
    for (std::size_t l = 1; l <= m - 1; ++l) first += a(l) * a(l + 1);
    quadratic_terms += m - 1;
    out[0] = a(1) + dt * (0.5 * first - g * a(1));

    for (std::size_t i = 2; i <= m; ++i) {
      double conv = 0.0;
      for (std::size_t l = 1; l <= i; ++l) conv += a(l) * a(i - l);
      double corr = 0.0;
      for (std::size_t l = 1; l <= m - i; ++l) corr += a(l) * a(i + l);
      quadratic_terms += m;
      const double di = static_cast<double>(i);
      out[i - 1] = a(i) - dt * ((di / 4.0) * (conv - 2.0 * corr) + g * di * di * a(i));
    }
    return out;
  }

  /// Dense tangent matrix of step() at u.
  DenseMatrix tangent_matrix(ConstView u) const {
    check(u);
    const std::size_t m = cfg_.m;
    const double dt = cfg_.dt;
    const double g = cfg_.gamma;
    auto a = [&](std::size_t l) { return l == 0 || l > m ? 0.0 : u[l - 1]; };
    DenseMatrix jac(m, m);

    // Row for mode 1: derivative of (1/2) sum_{l=1}^{m-1} a_l a_{l+1}.
    for (std::size_t j = 1; j <= m; ++j) {
      double d = 0.0;
      if (j <= m - 1) d += a(j + 1);
      if (j >= 2) d += a(j - 1);
      jac(0, j - 1) = 0.5 * dt * d;
    }
    jac(0, 0) += 1.0 - dt * g;

    for (std::size_t i = 2; i <= m; ++i) {
      const double di = static_cast<double>(i);
      for (std::size_t j = 1; j <= m; ++j) {
        double d = 0.0;
        if (j <= i - 1) d += 2.0 * a(i - j);   // both convolution sums
        if (j <= m - i) d -= 2.0 * a(i + j);   // -2 sum a_l a_{i+l}, differentiated in a_l
        if (j >= i + 1) d -= 2.0 * a(j - i);   // -2 sum a_l a_{i+l}, differentiated in a_{i+l}
        jac(i - 1, j - 1) = -dt * (di / 4.0) * d;
      }
      jac(i - 1, i - 1) += 1.0 - dt * g * di * di;
    }
    return jac;
  }

  StateVector tangent(ConstView u, ConstView v) const {
    check(v);
    return tangent_matrix(u).apply(v);
  }

  StateVector adjoint(ConstView u, ConstView w) const {
    check(w);
    return tangent_matrix(u).apply_transpose(w);
  }

  /// u_0 = (1, 0, ..., 0): the coefficient vector of sin x.
  StateVector initial_state() const {
    StateVector u(cfg_.m, 0.0);
    u[0] = 1.0;
    return u;
  }

 private:
  void check(ConstView u) const {
    if (u.size() != dim()) throw ConfigError("burgers-spectral: state has wrong dimension");
  }

  SpectralConfig cfg_;
};

}  // namespace admm4dvar::burgers
