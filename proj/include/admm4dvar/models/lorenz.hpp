#pragma once

#include <array>
#include <cstddef>

#include "admm4dvar/core/errors.hpp"
#include "admm4dvar/core/vector_ops.hpp"

namespace admm4dvar::lorenz {

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  double dt = 0.01;
};

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

inline Mat3 identity3() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline Vec3 mul(const Mat3& a, const Vec3& v) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i) r[i] = a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2];
  return r;
}

inline Vec3 mul_transpose(const Mat3& a, const Vec3& w) {
  Vec3 r{};
  for (int j = 0; j < 3; ++j) r[j] = a[0][j] * w[0] + a[1][j] * w[1] + a[2][j] * w[2];
  return r;
}

inline Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return r;
}

inline Vec3 to_vec3(ConstView u) {
  if (u.size() != 3) throw ConfigError("lorenz: state must have dimension 3");
  return {u[0], u[1], u[2]};
}

inline StateVector to_state(const Vec3& v) { return {v[0], v[1], v[2]}; }

inline Vec3 lorenz_rhs(const Vec3& u, const LorenzParams& p) {
  const auto [x, y, z] = u;
  return {p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z};
}

/// Jacobian of the right-hand side; the first row never depends on the state.
inline Mat3 lorenz_jacobian(const Vec3& u, const LorenzParams& p) {
  const auto [x, y, z] = u;
  return {{{-p.sigma, p.sigma, 0.0}, {p.rho - z, -1.0, -x}, {y, x, -p.beta}}};
}

inline Vec3 rk4_step(const Vec3& u, const LorenzParams& p) {
  const double h = p.dt;
  const Vec3 k1 = lorenz_rhs(u, p);
  const Vec3 k2 = lorenz_rhs({u[0] + 0.5 * h * k1[0], u[1] + 0.5 * h * k1[1], u[2] + 0.5 * h * k1[2]}, p);
  const Vec3 k3 = lorenz_rhs({u[0] + 0.5 * h * k2[0], u[1] + 0.5 * h * k2[1], u[2] + 0.5 * h * k2[2]}, p);
  const Vec3 k4 = lorenz_rhs({u[0] + h * k3[0], u[1] + h * k3[1], u[2] + h * k3[2]}, p);
  Vec3 r{};
  for (int i = 0; i < 3; ++i) r[i] = u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return r;
}

/// Exact derivative of the discrete RK4 map at u (chain rule through the stages).
inline Mat3 rk4_tangent_matrix(const Vec3& u, const LorenzParams& p) {
  const double h = p.dt;
  const Mat3 id = identity3();

  const Vec3 k1 = lorenz_rhs(u, p);
  const Vec3 s2{u[0] + 0.5 * h * k1[0], u[1] + 0.5 * h * k1[1], u[2] + 0.5 * h * k1[2]};
  const Vec3 k2 = lorenz_rhs(s2, p);
  const Vec3 s3{u[0] + 0.5 * h * k2[0], u[1] + 0.5 * h * k2[1], u[2] + 0.5 * h * k2[2]};
  const Vec3 k3 = lorenz_rhs(s3, p);
  const Vec3 s4{u[0] + h * k3[0], u[1] + h * k3[1], u[2] + h * k3[2]};

  auto shifted = [&](const Mat3& dk, double c) {
    Mat3 r = id;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[i][j] += c * dk[i][j];
    return r;
  };

  const Mat3 dk1 = lorenz_jacobian(u, p);
  const Mat3 dk2 = mul(lorenz_jacobian(s2, p), shifted(dk1, 0.5 * h));
  const Mat3 dk3 = mul(lorenz_jacobian(s3, p), shifted(dk2, 0.5 * h));
  const Mat3 dk4 = mul(lorenz_jacobian(s4, p), shifted(dk3, h));

  Mat3 r = id;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] += h / 6.0 * (dk1[i][j] + 2.0 * dk2[i][j] + 2.0 * dk3[i][j] + dk4[i][j]);
  return r;
}

inline Vec3 rk4_tangent(const Vec3& u, const Vec3& v, const LorenzParams& p) {
  return mul(rk4_tangent_matrix(u, p), v);
}

inline Vec3 rk4_adjoint(const Vec3& u, const Vec3& w, const LorenzParams& p) {
  return mul_transpose(rk4_tangent_matrix(u, p), w);
}

/// Lorenz-63 advanced by one RK4 step of size params.dt.
class LorenzModel {
 public:
  explicit LorenzModel(LorenzParams params = {}) : params_(params) {
    if (!(params_.dt >= 0.0)) throw ConfigError("lorenz: dt must be non-negative");
  }

  const LorenzParams& params() const noexcept { return params_; }
  std::size_t dim() const noexcept { return 3; }

  StateVector step(ConstView u) const { return to_state(rk4_step(to_vec3(u), params_)); }
  StateVector tangent(ConstView u, ConstView v) const {
    return to_state(rk4_tangent(to_vec3(u), to_vec3(v), params_));
  }
  StateVector adjoint(ConstView u, ConstView w) const {
    return to_state(rk4_adjoint(to_vec3(u), to_vec3(w), params_));
  }

  static StateVector default_initial_state() { return {-0.5, 0.5, 20.5}; }

 private:
  LorenzParams params_;
};

}  // namespace admm4dvar::lorenz
