#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "admm4dvar/assim/norm.hpp"
#include "admm4dvar/core/errors.hpp"
#include "admm4dvar/core/random.hpp"
#include "admm4dvar/core/vector_ops.hpp"
#include "admm4dvar/models/model.hpp"

namespace admm4dvar {

/// States u_0 .. u_N at every model time step.
using Trajectory = std::vector<StateVector>;

/// Twin-experiment observations: full-state snapshots at steps 0, q, 2q, ..., nq.
struct ObservationSet {
  std::vector<StateVector> observations;  ///< n + 1 entries
  StateVector background;                 ///< prior for u_0
  std::size_t q = 1;                      ///< model steps per observation interval
  double t_obs = 1.0;                     ///< observation interval T_o
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  std::size_t n() const noexcept { return observations.empty() ? 0 : observations.size() - 1; }
  std::size_t total_steps() const noexcept { return n() * q; }
  bool is_observation_step(std::size_t k) const noexcept { return k % q == 0 && k / q < observations.size(); }
  const StateVector& at_step(std::size_t k) const { return observations.at(k / q); }
};

/// Rolls `model` forward N steps from u0_true, records every q-th state and
/// adds noise_std * N(0,1) noise drawn in (observation, component) order.
/// The background defaults to the (noisy) first observation.
template <DynamicalModel M>
ObservationSet generate_observations(const M& model, ConstView u0_true, std::size_t total_steps, std::size_t q,
                                     double t_obs, double noise_std, std::uint64_t seed,
                                     Trajectory* truth_out = nullptr) {
  if (q == 0 || total_steps % q != 0) throw ConfigError("generate_observations: q must divide N");
  if (u0_true.size() != model.dim()) throw ConfigError("generate_observations: initial state has wrong dimension");
  ObservationSet obs;
  obs.q = q;
  obs.t_obs = t_obs;
  obs.noise_std = noise_std;
  obs.seed = seed;

  RandomStream stream(seed);
  Trajectory truth = rollout(model, u0_true, total_steps);
  for (std::size_t k = 0; k <= total_steps; k += q) {
    StateVector o = truth[k];
    if (noise_std != 0.0)
      for (double& x : o) x += noise_std * stream.normal();
    obs.observations.push_back(std::move(o));
  }
  obs.background = obs.observations.front();
  if (truth_out) *truth_out = std::move(truth);
  return obs;
}

/// Model, observations and objective weights of one 4D-Var instance.
template <DynamicalModel M>
struct AssimilationProblem {
  M model;
  ObservationSet obs;
  double alpha = 0.1;  ///< background weight
  double mu = 1.0;     ///< uniform scaling of every sub-objective (ADMM only)
  NormOperator norm = NormOperator::euclidean();

  std::size_t total_steps() const noexcept { return obs.total_steps(); }
  std::size_t dim() const { return model.dim(); }

  void validate() const {
    if (!(alpha >= 0.0)) throw ConfigError("problem: alpha must be non-negative");
    if (!(mu > 0.0)) throw ConfigError("problem: mu must be positive");
    if (obs.observations.empty()) throw ConfigError("problem: no observations");
    for (const auto& o : obs.observations)
      if (o.size() != model.dim()) throw ConfigError("problem: observation dimension mismatch");
    if (obs.background.size() != model.dim()) throw ConfigError("problem: background dimension mismatch");
  }
};

/// f_k(u_k), scaled by mu.
template <DynamicalModel M>
double sub_objective(std::size_t k, ConstView uk, const AssimilationProblem<M>& prob) {
  const ObservationSet& obs = prob.obs;
  if (!obs.is_observation_step(k)) return 0.0;
  double value = 0.5 * obs.t_obs * prob.norm.distance_squared(uk, obs.at_step(k));
  if (k == 0) value += 0.5 * prob.alpha * prob.norm.distance_squared(uk, obs.background);
  return prob.mu * value;
}

template <DynamicalModel M>
double total_objective(const Trajectory& traj, const AssimilationProblem<M>& prob) {
  if (traj.size() != prob.total_steps() + 1) throw ConfigError("total_objective: trajectory length mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) sum += sub_objective(k, traj[k], prob);
  return sum;
}

/// Square-completed augmented Lagrangian
///   sum f_k + 1/(2s) sum ||u_{k+1} - H(u_k) - s lambda_k||^2 - s/2 sum ||lambda_k||^2.
template <DynamicalModel M>
double augmented_lagrangian(const Trajectory& traj, const std::vector<StateVector>& duals,
                            const AssimilationProblem<M>& prob, double s) {
  if (duals.size() + 1 != traj.size()) throw ConfigError("augmented_lagrangian: need N duals");
  double value = total_objective(traj, prob);
  for (std::size_t k = 0; k < duals.size(); ++k) {
    StateVector r = subtract(traj[k + 1], prob.model.step(traj[k]));
    axpy(-s, duals[k], r);
    value += norm2_squared(r) / (2.0 * s) - 0.5 * s * norm2_squared(duals[k]);
  }
  return value;
}

/// F(u0) = T_o/2 sum_k ||H^{kq}(u0) - obs_k||^2 + alpha/2 ||u0 - background||^2 (no mu).
template <DynamicalModel M>
double shooting_objective(ConstView u0, const AssimilationProblem<M>& prob) {
  const ObservationSet& obs = prob.obs;
  StateVector u(u0.begin(), u0.end());
  double value = 0.5 * prob.alpha * prob.norm.distance_squared(u, obs.background);
  for (std::size_t j = 0; j < obs.observations.size(); ++j) {
    if (j > 0)
      for (std::size_t s = 0; s < obs.q; ++s) u = prob.model.step(u);
    value += 0.5 * obs.t_obs * prob.norm.distance_squared(u, obs.observations[j]);
  }
  return value;
}

/// sqrt(sum_k ||u_k - ref_k||^2)
inline double total_error(const Trajectory& traj, const Trajectory& reference) {
  if (traj.size() != reference.size()) throw ConfigError("total_error: length mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) sum += distance_squared(traj[k], reference[k]);
  return std::sqrt(sum);
}

/// sum_k ||u_{k+1} - H(u_k)||^2
template <DynamicalModel M>
double constraint_error(const Trajectory& traj, const M& model) {
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) sum += distance_squared(traj[k + 1], model.step(traj[k]));
  return sum;
}

}  // namespace admm4dvar
