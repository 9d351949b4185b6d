#include <gtest/gtest.h>

#include <cmath>

#include "admm4dvar/models/lorenz.hpp"
#include "admm4dvar/models/model.hpp"
#include "test_support.hpp"

using namespace admm4dvar;
using namespace admm4dvar::lorenz;
using testing_support::max_abs_diff;
using testing_support::Rng;

static_assert(DynamicalModel<LorenzModel>);

namespace {

constexpr double kBeta = 8.0 / 3.0;

// Straight-line RK4 for the classical parameters, written without the library helpers.
StateVector reference_rk4(double x, double y, double z, double h) {
  auto f = [](double a, double b, double c, double out[3]) {
    out[0] = 10.0 * (b - a);
    out[1] = a * (28.0 - c) - b;
    out[2] = a * b - kBeta * c;
  };
  double k1[3], k2[3], k3[3], k4[3];
  f(x, y, z, k1);
  f(x + h / 2 * k1[0], y + h / 2 * k1[1], z + h / 2 * k1[2], k2);
  f(x + h / 2 * k2[0], y + h / 2 * k2[1], z + h / 2 * k2[2], k3);
  f(x + h * k3[0], y + h * k3[1], z + h * k3[2], k4);
  return {x + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]), y + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
          z + h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])};
}

StateVector random_state(Rng& rng) { return {rng.uniform(-15, 15), rng.uniform(-20, 20), rng.uniform(5, 45)}; }

}  // namespace

TEST(LorenzRhs, Examples) {
  const LorenzParams p;
  EXPECT_EQ(lorenz_rhs({0, 0, 0}, p), (Vec3{0, 0, 0}));
  const Vec3 r = lorenz_rhs({-0.5, 0.5, 20.5}, p);
  EXPECT_NEAR(r[0], 10.0, 1e-14);
  EXPECT_NEAR(r[1], -4.25, 1e-14);
  EXPECT_NEAR(r[2], -0.25 - kBeta * 20.5, 1e-13);
  EXPECT_NEAR(r[2], -54.916666666666667, 1e-12);
  const Vec3 e = lorenz_rhs({1, 1, 27}, p);
  EXPECT_EQ(e[0], 0.0);
  EXPECT_EQ(e[1], 0.0);
  EXPECT_NEAR(e[2], 1 - 27 * kBeta, 1e-13);
}

TEST(LorenzJacobian, ClassicalValuesAtOrigin) {
  const Mat3 j = lorenz_jacobian({0, 0, 0}, LorenzParams{});
  EXPECT_EQ(j[0], (Vec3{-10, 10, 0}));
  EXPECT_EQ(j[1], (Vec3{28, -1, 0}));
  EXPECT_EQ(j[2], (Vec3{0, 0, -kBeta}));
  const Mat3 k = lorenz_jacobian({1, 2, 3}, LorenzParams{});
  EXPECT_EQ(k[2], (Vec3{2, 1, -kBeta}));
}

TEST(LorenzJacobian, FirstRowIsStateIndependentAndMatchesFiniteDifference) {
  const LorenzParams p;
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const StateVector u = random_state(rng);
    const Mat3 j = lorenz_jacobian(to_vec3(u), p);
    EXPECT_EQ(j[0], (Vec3{-10, 10, 0}));
    for (int c = 0; c < 3; ++c) {
      StateVector e(3, 0.0);
      e[c] = 1.0;
      const StateVector fd = testing_support::central_difference(
          [&](ConstView x) { return to_state(lorenz_rhs(to_vec3(x), p)); }, u, e, 1e-7);
      for (int r = 0; r < 3; ++r) EXPECT_NEAR(fd[r], j[r][c], 1e-6 * (1 + std::abs(j[r][c])));
    }
  }
}

TEST(LorenzStep, TrivialCases) {
  LorenzParams zero;
  zero.dt = 0.0;
  const LorenzModel still(zero);
  const StateVector u{1.5, -2, 30};
  EXPECT_EQ(still.step(u), u);
  EXPECT_EQ(LorenzModel().step(StateVector{0, 0, 0}), (StateVector{0, 0, 0}));
  EXPECT_EQ(still.tangent(u, StateVector{1, 2, 3}), (StateVector{1, 2, 3}));
  EXPECT_EQ(still.adjoint(u, StateVector{4, 5, 6}), (StateVector{4, 5, 6}));
}

TEST(LorenzStep, MatchesStraightLineRk4) {
  const LorenzModel model;
  EXPECT_LE(max_abs_diff(model.step(LorenzModel::default_initial_state()), reference_rk4(-0.5, 0.5, 20.5, 0.01)),
            1e-14);
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const StateVector u = random_state(rng);
    EXPECT_LE(max_abs_diff(model.step(u), reference_rk4(u[0], u[1], u[2], 0.01)), 1e-13);
  }
}

TEST(LorenzStep, FourthOrderConvergence) {
  const StateVector u0 = LorenzModel::default_initial_state();
  auto integrate = [&](double dt) {
    LorenzParams p;
    p.dt = dt;
    return propagate(LorenzModel(p), u0, static_cast<std::size_t>(std::lround(0.1 / dt)));
  };
  const StateVector ref = integrate(0.00025);
  const double e1 = std::sqrt(distance_squared(integrate(0.01), ref));
  const double e2 = std::sqrt(distance_squared(integrate(0.005), ref));
  EXPECT_GE(e1 / e2, 12.0);
  EXPECT_LE(e1 / e2, 20.0);
}

TEST(LorenzTangent, ZeroAndFiniteDifference) {
  const LorenzModel model;
  const StateVector u = LorenzModel::default_initial_state();
  EXPECT_EQ(model.tangent(u, StateVector{0, 0, 0}), (StateVector{0, 0, 0}));
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    StateVector v = rng.normal(3);
    v = scaled(1.0 / norm2(v), v);
    const double eps = 1e-7;
    StateVector up = u;
    axpy(eps, v, up);
    const StateVector fd = scaled(1.0 / eps, subtract(model.step(up), model.step(u)));
    EXPECT_LE(testing_support::rel_error(fd, model.tangent(u, v)), 1e-5);
  }
}

TEST(LorenzTangent, Linearity) {
  const LorenzModel model;
  Rng rng(4);
  const StateVector u = random_state(rng), a = rng.normal(3), b = rng.normal(3);
  const StateVector lhs = model.tangent(u, add(scaled(2.5, a), scaled(-1.5, b)));
  const StateVector rhs = add(scaled(2.5, model.tangent(u, a)), scaled(-1.5, model.tangent(u, b)));
  EXPECT_LE(max_abs_diff(lhs, rhs), 1e-13);
}

TEST(LorenzAdjoint, DotProductIdentityOnRandomTriples) {
  const LorenzModel model;
  EXPECT_EQ(model.adjoint(StateVector{1, 2, 3}, StateVector{0, 0, 0}), (StateVector{0, 0, 0}));
  Rng rng(5);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const StateVector u = random_state(rng), v = rng.normal(3), w = rng.normal(3);
    const double lhs = dot(model.tangent(u, v), w);
    const double rhs = dot(v, model.adjoint(u, w));
    worst = std::max(worst, std::abs(lhs - rhs) / (norm2(v) * norm2(w)));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(LorenzTangent, ComposedMapEqualsMatrixChain) {
  const LorenzModel model;
  const LorenzParams p;
  const auto traj = rollout(model, LorenzModel::default_initial_state(), 5);
  Mat3 chain = identity3();
  for (std::size_t k = 0; k < 5; ++k) chain = mul(rk4_tangent_matrix(to_vec3(traj[k]), p), chain);
  const StateVector v{0.3, -1.2, 0.7};
  StateVector dv = v;
  for (std::size_t k = 0; k < 5; ++k) dv = model.tangent(traj[k], dv);
  EXPECT_LE(max_abs_diff(dv, to_state(mul(chain, to_vec3(v)))), 1e-12 * norm_inf(dv));
}

TEST(LorenzModel, RejectsWrongDimension) {
  EXPECT_THROW(LorenzModel().step(StateVector{1, 2}), ConfigError);
  LorenzParams bad;
  bad.dt = -1;
  EXPECT_THROW(LorenzModel{bad}, ConfigError);
}
