#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "admm4dvar/assim/problem.hpp"
#include "admm4dvar/core/errors.hpp"

// First-order shooting baselines: the control variable is u_0 alone and every
// evaluation integrates the model over the whole window.
namespace admm4dvar {

/// Gradient of shooting_objective by one stored forward rollout and a reverse
/// adjoint sweep.
template <DynamicalModel M>
StateVector shooting_gradient(ConstView u0, const AssimilationProblem<M>& prob) {
  const ObservationSet& obs = prob.obs;
  const std::size_t n_steps = obs.total_steps();
  const Trajectory traj = rollout(prob.model, u0, n_steps);

  auto misfit = [&](std::size_t k) { return scaled(obs.t_obs, prob.norm.weight(subtract(traj[k], obs.at_step(k)))); };

  StateVector lambda = misfit(n_steps);
  for (std::size_t k = n_steps; k-- > 0;) {
    lambda = prob.model.adjoint(traj[k], lambda);
    if (obs.is_observation_step(k)) axpy(1.0, misfit(k), lambda);
  }
  if (prob.alpha != 0.0) axpy(prob.alpha, prob.norm.weight(subtract(traj[0], obs.background)), lambda);
  return lambda;
}

enum class BaselineMethod { GradientDescent, FletcherReeves, PolakRibiere };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::GradientDescent;
  std::size_t max_iters = 500;
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  double grad_tol = 1e-8;
  std::size_t max_halvings = 60;

  void validate() const {
    if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("baseline: shrink must lie in (0,1)");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease <= 0.5))
      throw ConfigError("baseline: sufficient-decrease constant must lie in (0,0.5]");
    if (!(initial_step > 0.0)) throw ConfigError("baseline: initial step must be positive");
    if (!(grad_tol >= 0.0)) throw ConfigError("baseline: gradient tolerance must be non-negative");
  }
};

struct BaselineRecord {
  std::size_t iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step_size = 0.0;              ///< 0 for the initial record
  double directional_derivative = 0.0; ///< g^T d of the accepted step
};

struct BaselineResult {
  StateVector u0;
  std::vector<BaselineRecord> history;
  bool converged = false;  ///< gradient tolerance reached
};

/// Armijo backtracking failed; carries the last accepted iterate.
class BaselineStall : public LineSearchStall {
 public:
  BaselineStall(const std::string& what, BaselineResult partial)
      : LineSearchStall(what), partial_(std::move(partial)) {}
  const BaselineResult& partial() const noexcept { return partial_; }

 private:
  BaselineResult partial_;
};

namespace detail {

template <DynamicalModel M>
BaselineResult run_baseline(ConstView u0_init, const AssimilationProblem<M>& prob, const BaselineConfig& cfg) {
  cfg.validate();
  prob.validate();
  if (u0_init.size() != prob.dim()) throw ConfigError("baseline: initial state has wrong dimension");

  BaselineResult res;
  res.u0.assign(u0_init.begin(), u0_init.end());
  double f = shooting_objective(res.u0, prob);
  StateVector g = shooting_gradient(res.u0, prob);
  res.history.push_back({0, f, norm2(g), 0.0, 0.0});

  StateVector d = scaled(-1.0, g);
  double step_guess = cfg.initial_step;

  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    if (norm2(g) <= cfg.grad_tol) {
      res.converged = true;
      return res;
    }
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      d = scaled(-1.0, g);
      slope = -norm2_squared(g);
    }

    double t = step_guess;
    StateVector trial;
    double f_trial = 0.0;
    bool accepted = false;
    for (std::size_t h = 0; h <= cfg.max_halvings; ++h) {
      trial = res.u0;
      axpy(t, d, trial);
      f_trial = shooting_objective(trial, prob);
      if (std::isfinite(f_trial) && f_trial <= f + cfg.sufficient_decrease * t * slope) {
        accepted = true;
        break;
      }
      t *= cfg.shrink;
    }
    if (!accepted) throw BaselineStall("baseline: line search found no decrease", res);

    const StateVector g_new = shooting_gradient(trial, prob);
    double beta = 0.0;
    const double gg_old = norm2_squared(g);
    switch (cfg.method) {
      case BaselineMethod::GradientDescent:
        break;
      case BaselineMethod::FletcherReeves:
        beta = norm2_squared(g_new) / gg_old;
        break;
      case BaselineMethod::PolakRibiere:
        beta = std::max(0.0, dot(g_new, subtract(g_new, g)) / gg_old);
        break;
    }
    StateVector d_new = scaled(-1.0, g_new);
    axpy(beta, d, d_new);

    res.u0 = std::move(trial);
    f = f_trial;
    g = g_new;
    d = std::move(d_new);
    res.history.push_back({it, f, norm2(g), t, slope});
    step_guess = std::min(cfg.initial_step, t / cfg.shrink);
  }
  res.converged = norm2(g) <= cfg.grad_tol;
  return res;
}

}  // namespace detail

template <DynamicalModel M>
BaselineResult gradient_descent(ConstView u0_init, const AssimilationProblem<M>& prob, BaselineConfig cfg) {
  cfg.method = BaselineMethod::GradientDescent;
  return detail::run_baseline(u0_init, prob, cfg);
}

/// cfg.method selects Fletcher-Reeves or Polak-Ribiere (beta clamped at 0);
/// a non-descent direction restarts along the negative gradient.
template <DynamicalModel M>
BaselineResult nonlinear_cg(ConstView u0_init, const AssimilationProblem<M>& prob, const BaselineConfig& cfg) {
  if (cfg.method == BaselineMethod::GradientDescent) throw ConfigError("nonlinear_cg: choose FR or PR");
  return detail::run_baseline(u0_init, prob, cfg);
}

}  // namespace admm4dvar
