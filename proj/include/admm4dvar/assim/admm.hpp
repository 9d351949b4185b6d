#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "admm4dvar/assim/problem.hpp"
#include "admm4dvar/core/errors.hpp"
#include "admm4dvar/core/parallel.hpp"

// Linearized multi-block ADMM with proximal regularization for
//
//   min sum_k f_k(u_k)   s.t.  u_{k+1} = H(u_k),  k = 0 .. N-1.
//
// Every block u_k minimizes a quadratic model: the exact penalty coupling to
// u_{k-1}, the penalty coupling to u_{k+1} linearized at u_k^l through the
// adjoint, and a proximal term ||u_k - u_k^l||^2 / (2 eta). Duals follow
// s lambda_k <- s lambda_k - (u_{k+1} - H(u_k)).
namespace admm4dvar {

enum class AdmmSchedule {
  Jacobi,       ///< every block reads iteration-l data only
  GaussSeidel,  ///< experimental: block k reads the already updated u_{k-1}
};

struct AdmmParams {
  double s = 2.0 / 3.0;  ///< penalty parameter
  double eta = 0.1;      ///< proximal weight
  std::size_t max_outer = 600;
  std::optional<double> constraint_tol;
  std::size_t threads = 1;
  AdmmSchedule schedule = AdmmSchedule::Jacobi;

  void validate() const {
    if (!(s > 0.0)) throw ConfigError("admm: s must be positive");
    if (!(eta > 0.0)) throw ConfigError("admm: eta must be positive");
  }
};

struct AdmmState {
  Trajectory primal;                ///< u_0 .. u_N
  std::vector<StateVector> duals;   ///< lambda_0 .. lambda_{N-1}
  std::size_t outer_iter = 0;
  std::vector<StateVector> images;  ///< cached H(u_k), k < N; empty when stale
};

struct IterationRecord {
  std::size_t iter = 0;
  double total_error = std::numeric_limits<double>::quiet_NaN();
  double constraint_error = 0.0;
  double objective = 0.0;
};

namespace init {
struct Zeros {};
struct Rollout {
  StateVector u0;
};
struct Given {
  Trajectory trajectory;
};
}  // namespace init

using InitMode = std::variant<init::Zeros, init::Rollout, init::Given>;

/// Raised by admm_solve when a model or inner solver fails mid-run.
class AdmmAborted : public std::runtime_error {
 public:
  AdmmAborted(const std::string& what, AdmmState state, std::vector<IterationRecord> history)
      : std::runtime_error(what), state_(std::move(state)), history_(std::move(history)) {}
  const AdmmState& state() const noexcept { return state_; }
  const std::vector<IterationRecord>& partial_history() const noexcept { return history_; }

 private:
  AdmmState state_;
  std::vector<IterationRecord> history_;
};

template <DynamicalModel M>
AdmmState init_state(const AssimilationProblem<M>& prob, const InitMode& mode) {
  const std::size_t n_steps = prob.total_steps();
  const std::size_t d = prob.dim();
  AdmmState st;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, init::Zeros>) {
          st.primal.assign(n_steps + 1, StateVector(d, 0.0));
        } else if constexpr (std::is_same_v<T, init::Rollout>) {
          st.primal = rollout(prob.model, m.u0, n_steps);
        } else {
          if (m.trajectory.size() != n_steps + 1) throw ConfigError("init_state: given trajectory has wrong length");
          st.primal = m.trajectory;
        }
      },
      mode);
  for (const auto& u : st.primal)
    if (u.size() != d) throw ConfigError("init_state: state dimension mismatch");
  st.duals.assign(n_steps, StateVector(d, 0.0));
  return st;
}

namespace detail {

/// r_k = u_{k+1} - H(u_k) - s lambda_k
inline StateVector shifted_residual(ConstView next, ConstView image, ConstView dual, double s) {
  StateVector r = subtract(next, image);
  axpy(-s, dual, r);
  return r;
}

/// Minimizer of  f_k(u) + [coupled] 1/(2s) ||u - a||^2 - (1/s) <g, u> + ||u - u_prev||^2 / (2 eta).
/// `a` is absent for k = 0, `g` for k = N.
template <DynamicalModel M>
StateVector closed_form_block(std::size_t k, const StateVector* a, const StateVector* g, ConstView u_prev,
                              const AssimilationProblem<M>& prob, const AdmmParams& params) {
  const ObservationSet& obs = prob.obs;
  const std::size_t d = u_prev.size();
  const double inv_s = 1.0 / params.s;
  const double inv_eta = 1.0 / params.eta;

  double data_weight = 0.0;
  StateVector data_rhs(d, 0.0);
  if (obs.is_observation_step(k)) {
    data_weight = prob.mu * obs.t_obs;
    axpy(prob.mu * obs.t_obs, obs.at_step(k), data_rhs);
    if (k == 0) {
      data_weight += prob.mu * prob.alpha;
      axpy(prob.mu * prob.alpha, obs.background, data_rhs);
    }
  }

  double plain_weight = inv_eta;
  StateVector plain_rhs = scaled(inv_eta, u_prev);
  if (a) {
    plain_weight += inv_s;
    axpy(inv_s, *a, plain_rhs);
  }
  if (g) axpy(inv_s, *g, plain_rhs);
  return prob.norm.solve_weighted(data_weight, data_rhs, plain_weight, plain_rhs);
}

}  // namespace detail

/// g_k = dH(u_k)^T (u_{k+1} - H(u_k) - s lambda_k), for k < N.
template <DynamicalModel M>
StateVector linearized_coupling(std::size_t k, const AdmmState& st, const AssimilationProblem<M>& prob,
                                const AdmmParams& params) {
  const StateVector image = prob.model.step(st.primal[k]);
  return prob.model.adjoint(st.primal[k], detail::shifted_residual(st.primal[k + 1], image, st.duals[k], params.s));
}

/// a_k = H(u_{k-1}) + s lambda_{k-1}, for k >= 1.
template <DynamicalModel M>
StateVector forward_anchor(std::size_t k, const AdmmState& st, const AssimilationProblem<M>& prob,
                           const AdmmParams& params) {
  StateVector a = prob.model.step(st.primal[k - 1]);
  axpy(params.s, st.duals[k - 1], a);
  return a;
}

template <DynamicalModel M>
StateVector primal_update_first(const AdmmState& st, const AssimilationProblem<M>& prob, const AdmmParams& params) {
  const StateVector g = linearized_coupling(0, st, prob, params);
  return detail::closed_form_block(0, nullptr, &g, st.primal[0], prob, params);
}

template <DynamicalModel M>
StateVector primal_update_interior(std::size_t k, const AdmmState& st, const AssimilationProblem<M>& prob,
                                   const AdmmParams& params) {
  if (k == 0 || k >= prob.total_steps()) throw ConfigError("primal_update_interior: need 1 <= k <= N-1");
  const StateVector a = forward_anchor(k, st, prob, params);
  const StateVector g = linearized_coupling(k, st, prob, params);
  return detail::closed_form_block(k, &a, &g, st.primal[k], prob, params);
}

template <DynamicalModel M>
StateVector primal_update_last(const AdmmState& st, const AssimilationProblem<M>& prob, const AdmmParams& params) {
  const std::size_t n = prob.total_steps();
  const StateVector a = forward_anchor(n, st, prob, params);
  return detail::closed_form_block(n, &a, nullptr, st.primal[n], prob, params);
}

/// lambda_k <- lambda_k - (1/s)(u_{k+1} - H(u_k)) using the current primal.
template <DynamicalModel M>
std::vector<StateVector> dual_update(const AdmmState& st, const AssimilationProblem<M>& prob,
                                     const AdmmParams& params) {
  std::vector<StateVector> out(st.duals.size());
  parallel_for(0, out.size(), params.threads, [&](std::size_t k) {
    out[k] = st.duals[k];
    axpy(-1.0 / params.s, subtract(st.primal[k + 1], prob.model.step(st.primal[k])), out[k]);
  });
  return out;
}

/// One full sweep: all primal blocks from iteration-l data, then all duals.
/// On return `images` holds H(u_k^{l+1}).
template <DynamicalModel M>
AdmmState outer_iteration(const AdmmState& st, const AssimilationProblem<M>& prob, const AdmmParams& params) {
  const std::size_t n = prob.total_steps();
  const std::size_t threads = params.threads;

  std::vector<StateVector> images = st.images;
  if (images.size() != n) {
    images.assign(n, {});
    parallel_for(0, n, threads, [&](std::size_t k) { images[k] = prob.model.step(st.primal[k]); });
  }

  AdmmState next;
  next.outer_iter = st.outer_iter + 1;
  next.primal.resize(n + 1);

  if (params.schedule == AdmmSchedule::Jacobi) {
    parallel_for(0, n + 1, threads, [&](std::size_t k) {
      std::optional<StateVector> a, g;
      if (k > 0) {
        a = images[k - 1];
        axpy(params.s, st.duals[k - 1], *a);
      }
      if (k < n)
        g = prob.model.adjoint(st.primal[k],
                               detail::shifted_residual(st.primal[k + 1], images[k], st.duals[k], params.s));
      next.primal[k] = detail::closed_form_block(k, a ? &*a : nullptr, g ? &*g : nullptr, st.primal[k], prob, params);
    });
  } else {
    for (std::size_t k = 0; k <= n; ++k) {
      std::optional<StateVector> a, g;
      if (k > 0) {
        a = prob.model.step(next.primal[k - 1]);
        axpy(params.s, st.duals[k - 1], *a);
      }
      if (k < n)
        g = prob.model.adjoint(st.primal[k],
                               detail::shifted_residual(st.primal[k + 1], images[k], st.duals[k], params.s));
      next.primal[k] = detail::closed_form_block(k, a ? &*a : nullptr, g ? &*g : nullptr, st.primal[k], prob, params);
    }
  }

  next.images.assign(n, {});
  next.duals.assign(n, {});
  parallel_for(0, n, threads, [&](std::size_t k) {
    next.images[k] = prob.model.step(next.primal[k]);
    next.duals[k] = st.duals[k];
    axpy(-1.0 / params.s, subtract(next.primal[k + 1], next.images[k]), next.duals[k]);
  });
  return next;
}

namespace detail {
template <DynamicalModel M>
IterationRecord measure(const AdmmState& st, const AssimilationProblem<M>& prob, const Trajectory* reference) {
  IterationRecord rec;
  rec.iter = st.outer_iter;
  double c = 0.0;
  for (std::size_t k = 0; k + 1 < st.primal.size(); ++k) {
    if (st.images.size() == st.duals.size())
      c += distance_squared(st.primal[k + 1], st.images[k]);
    else
      c += distance_squared(st.primal[k + 1], prob.model.step(st.primal[k]));
  }
  rec.constraint_error = c;
  rec.objective = total_objective(st.primal, prob);
  if (reference) rec.total_error = total_error(st.primal, *reference);
  return rec;
}
}  // namespace detail

struct AdmmResult {
  AdmmState state;
  std::vector<IterationRecord> history;  ///< iter 0 (initial metrics) .. last sweep
  bool reached_tolerance = false;
};

/// Runs up to params.max_outer sweeps, stopping early once the constraint
/// error drops to params.constraint_tol. `on_record` (optional) sees every record.
template <DynamicalModel M, typename Observer = std::nullptr_t>
AdmmResult admm_solve(const AssimilationProblem<M>& prob, const AdmmParams& params, const InitMode& mode,
                      const Trajectory* reference = nullptr, Observer on_record = nullptr) {
  prob.validate();
  params.validate();
  if (prob.total_steps() == 0) throw ConfigError("admm: need at least one model step");
  if (reference && reference->size() != prob.total_steps() + 1)
    throw ConfigError("admm: reference trajectory has wrong length");

  AdmmResult result;
  result.state = init_state(prob, mode);
  auto push = [&](IterationRecord rec) {
    if constexpr (!std::is_same_v<Observer, std::nullptr_t>) on_record(rec);
    result.history.push_back(rec);
  };

  try {
    push(detail::measure(result.state, prob, reference));
    for (std::size_t it = 0; it < params.max_outer; ++it) {
      result.state = outer_iteration(result.state, prob, params);
      push(detail::measure(result.state, prob, reference));
      if (params.constraint_tol && result.history.back().constraint_error <= *params.constraint_tol) {
        result.reached_tolerance = true;
        break;
      }
    }
  } catch (const std::exception& e) {
    throw AdmmAborted(e.what(), result.state, result.history);
  }
  return result;
}

}  // namespace admm4dvar
