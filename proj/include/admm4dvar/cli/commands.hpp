#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "admm4dvar/assim/admm.hpp"
#include "admm4dvar/assim/baselines.hpp"
#include "admm4dvar/assim/landscape.hpp"
#include "admm4dvar/cli/run_config.hpp"
#include "admm4dvar/io/csv.hpp"
#include "admm4dvar/models/burgers.hpp"
#include "admm4dvar/models/lorenz.hpp"
#include "admm4dvar/models/vorticity.hpp"

// The four experiment subcommands. Each returns a process exit code and
// writes its artifacts under cfg.output_dir.
namespace admm4dvar::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kSolverStall = 3, kIoError = 4, kVerificationFailure = 5 };

namespace detail {

namespace fs = std::filesystem;

/// Calls fn(model, true_initial_state, norm) with the configured model.
template <typename Fn>
decltype(auto) with_model(const ResolvedConfig& r, Fn&& fn, double sor_tol_override = 0.0) {
  if (r.model == "lorenz") {
    lorenz::LorenzParams p;
    p.dt = r.dt;
    return fn(lorenz::LorenzModel(p), r.truth_u0, NormOperator::euclidean());
  }
  if (r.model == "burgers-fd") {
    burgers::FDModel model(burgers::FDConfig{r.m, r.gamma, r.dt});
    return fn(model, model.initial_state(), NormOperator::euclidean());
  }
  if (r.model == "burgers-fem") {
    burgers::FEMModel model(burgers::FEMConfig{r.m, r.gamma, r.dt});
    return fn(model, model.initial_state(), NormOperator::euclidean());
  }
  if (r.model == "burgers-spectral") {
    burgers::SpectralModel model(burgers::SpectralConfig{r.m, r.gamma, r.dt});
    return fn(model, model.initial_state(), NormOperator::euclidean());
  }
  vorticity::VorticityConfig vc;
  vc.grid = Grid2D(r.m, r.dx, r.dx);
  vc.dt = r.dt;
  vc.kappa = r.kappa;
  vc.sor.tol = sor_tol_override > 0.0 ? sor_tol_override : r.sor_tol;
  vorticity::VorticityModel model(vc);
  const NormOperator norm = r.energy_norm ? NormOperator::energy(vc.grid, vc.sor) : NormOperator::euclidean();
  return fn(model, model.random_initial_state(r.truth_seed), norm);
}

inline std::string join(ConstView v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_real(v[i]);
  return s;
}

inline io::MetaEntries echo(const ResolvedConfig& r, const std::string& command) {
  io::MetaEntries e{
      {"command", command},
      {"model", r.model},
      {"dt", io::format_real(r.dt)},
      {"T", io::format_real(r.T)},
      {"T_obs", io::format_real(r.T_obs)},
      {"N", std::to_string(r.total_steps)},
      {"q", std::to_string(r.stride)},
      {"n", std::to_string(r.total_steps / r.stride)},
  };
  if (r.model != "lorenz") e.push_back({"m", std::to_string(r.m)});
  if (r.model.rfind("burgers", 0) == 0) e.push_back({"gamma", io::format_real(r.gamma)});
  if (r.model == "vorticity2d") {
    e.push_back({"dx", io::format_real(r.dx)});
    e.push_back({"kappa", io::format_real(r.kappa)});
    e.push_back({"truth_seed", std::to_string(r.truth_seed)});
    e.push_back({"sor_tol", io::format_real(r.sor_tol)});
  }
  if (r.model == "lorenz") e.push_back({"truth_u0", join(r.truth_u0)});
  e.insert(e.end(), {
                        {"norm", r.energy_norm ? "energy" : "euclidean"},
                        {"alpha", io::format_real(r.alpha)},
                        {"noise_std", io::format_real(r.noise_std)},
                        {"seed", std::to_string(r.seed)},
                        {"background", "first observation"},
                        {"total_error", "sqrt(sum_k ||u_k - truth_k||^2) over all N+1 states"},
                    });
  if (r.observations) e.push_back({"observations", *r.observations});
  if (r.truth) e.push_back({"truth", *r.truth});
  return e;
}

inline void add_solver_meta(io::MetaEntries& e, const ResolvedConfig& r) {
  e.insert(e.end(), {
                        {"solver", r.solver},
                        {"init", r.init_text},
                        {"max_iters", std::to_string(r.max_iters)},
                        {"threads", std::to_string(r.threads)},
                    });
  if (r.solver == "admm") {
    e.insert(e.end(), {
                          {"mu", io::format_real(r.mu)},
                          {"eta", io::format_real(r.eta)},
                          {"s", io::format_real(r.s)},
                          {"schedule", r.schedule},
                          {"constraint_tol", io::format_real(r.constraint_tol)},
                          {"objective_scaling", "mu multiplies every f_k"},
                      });
  } else {
    e.insert(e.end(), {
                          {"ls_step", io::format_real(r.ls_step)},
                          {"ls_shrink", io::format_real(r.ls_shrink)},
                          {"ls_c1", io::format_real(r.ls_c1)},
                          {"grad_tol", io::format_real(r.grad_tol)},
                          {"objective_scaling", "unscaled shooting objective"},
                      });
  }
}

/// Observations (generated or read) plus the reference trajectory when known.
struct TwinData {
  ObservationSet obs;
  std::optional<Trajectory> truth;
};

template <DynamicalModel M>
TwinData twin_data(const ResolvedConfig& r, const M& model, ConstView truth0) {
  TwinData d;
  if (!r.observations) {
    Trajectory truth;
    d.obs = generate_observations(model, truth0, r.total_steps, r.stride, r.T_obs, r.noise_std, r.seed, &truth);
    d.truth = std::move(truth);
    return d;
  }
  d.obs.observations = io::read_states(*r.observations);
  d.obs.q = r.stride;
  d.obs.t_obs = r.T_obs;
  d.obs.noise_std = r.noise_std;
  d.obs.seed = r.seed;
  if (d.obs.observations.size() != r.total_steps / r.stride + 1)
    throw ConfigError("observations: expected " + std::to_string(r.total_steps / r.stride + 1) + " records, found " +
                      std::to_string(d.obs.observations.size()));
  if (d.obs.observations.front().size() != model.dim())
    throw ConfigError("observations: state dimension does not match the model");
  d.obs.background = d.obs.observations.front();
  if (r.truth) {
    d.truth = io::read_states(*r.truth);
    if (d.truth->size() != r.total_steps + 1 || d.truth->front().size() != model.dim())
      throw ConfigError("truth: trajectory shape does not match the configuration");
  }
  return d;
}

/// Fault injection for check-adjoint: flips the sign of the first adjoint entry.
template <DynamicalModel M>
struct CorruptedAdjoint {
  M inner;
  std::size_t dim() const { return inner.dim(); }
  StateVector step(ConstView u) const { return inner.step(u); }
  StateVector tangent(ConstView u, ConstView v) const { return inner.tangent(u, v); }
  StateVector adjoint(ConstView u, ConstView w) const {
    StateVector out = inner.adjoint(u, w);
    out[0] = -out[0];
    return out;
  }
};

struct AdjointReport {
  double max_dot_error = 0.0;
  double max_tangent_error = 0.0;
};

template <DynamicalModel M>
AdjointReport adjoint_checks(const M& model, ConstView base, double base_spread, std::size_t trials,
                             std::uint64_t seed) {
  RandomStream stream(seed);
  AdjointReport rep;
  const std::size_t d = model.dim();
  const double h = 1e-6;
  for (std::size_t t = 0; t < trials; ++t) {
    StateVector u(base.begin(), base.end());
    axpy(base_spread, gaussian_draw(stream, d), u);
    const StateVector v = gaussian_draw(stream, d);
    const StateVector w = gaussian_draw(stream, d);

    const StateVector tv = model.tangent(u, v);
    const double lhs = dot(tv, w);
    const double rhs = dot(v, model.adjoint(u, w));
    rep.max_dot_error = std::max(rep.max_dot_error, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));

    StateVector up = u, um = u;
    axpy(h, v, up);
    axpy(-h, v, um);
    StateVector fd = subtract(model.step(up), model.step(um));
    for (double& x : fd) x /= 2.0 * h;
    rep.max_tangent_error = std::max(rep.max_tangent_error, std::sqrt(distance_squared(fd, tv)) / std::max(norm2(tv), 1e-300));
  }
  return rep;
}

}  // namespace detail

inline int cmd_generate_obs(const ResolvedConfig& r, std::ostream& log) {
  return detail::with_model(r, [&](const auto& model, const StateVector& truth0, const NormOperator&) {
    Trajectory truth;
    const ObservationSet obs =
        generate_observations(model, truth0, r.total_steps, r.stride, r.T_obs, r.noise_std, r.seed, &truth);
    const detail::fs::path dir(r.output_dir);
    io::write_states(dir / "observations.csv", obs.observations);
    io::write_states(dir / "truth_trajectory.csv", truth);
    auto meta = detail::echo(r, "generate-obs");
    meta.push_back({"observation_records", std::to_string(obs.observations.size())});
    meta.push_back({"state_dim", std::to_string(model.dim())});
    io::write_meta(dir / "meta.txt", meta);
    log << "wrote " << obs.observations.size() << " observations of dimension " << model.dim() << " to "
        << dir.string() << "\n";
    return int{kSuccess};
  });
}

inline int cmd_solve(const ResolvedConfig& r, std::ostream& log) {
  return detail::with_model(r, [&](const auto& model, const StateVector& truth0, const NormOperator& norm) {
    using M = std::decay_t<decltype(model)>;
    const detail::fs::path dir(r.output_dir);
    detail::TwinData data = detail::twin_data(r, model, truth0);
    AssimilationProblem<M> prob{model, data.obs, r.alpha, r.mu, norm};
    const Trajectory* reference = data.truth ? &*data.truth : nullptr;

    auto meta = detail::echo(r, "solve");
    detail::add_solver_meta(meta, r);
    if (!r.observations) io::write_states(dir / "observations.csv", data.obs.observations);

    if (r.solver == "admm") {
      AdmmParams p;
      p.s = r.s;
      p.eta = r.eta;
      p.max_outer = r.max_iters;
      p.threads = r.threads;
      if (r.constraint_tol > 0.0) p.constraint_tol = r.constraint_tol;
      p.schedule = r.schedule == "jacobi" ? AdmmSchedule::Jacobi : AdmmSchedule::GaussSeidel;

      InitMode mode = init::Zeros{};
      if (r.init == InitKind::Rollout) {
        if (r.init_u0.size() != model.dim()) throw ConfigError("init: rollout state has the wrong dimension");
        mode = init::Rollout{r.init_u0};
      } else if (r.init == InitKind::File) {
        mode = init::Given{io::read_states(r.init_path)};
      }

      AdmmResult result;
      try {
        result = admm_solve(prob, p, mode, reference);
      } catch (const AdmmAborted& e) {
        io::write_history(dir / "history.csv", e.partial_history());
        meta.push_back({"status", std::string("aborted: ") + e.what()});
        io::write_meta(dir / "meta.txt", meta);
        log << "solver aborted: " << e.what() << "\n";
        return int{kSolverStall};
      }
      io::write_history(dir / "history.csv", result.history);
      io::write_states(dir / "recovered_trajectory.csv", result.state.primal);
      const IterationRecord& last = result.history.back();
      meta.push_back({"status", result.reached_tolerance ? "constraint tolerance reached" : "sweep budget completed"});
      meta.push_back({"sweeps", std::to_string(last.iter)});
      meta.push_back({"final_constraint_error", io::format_real(last.constraint_error)});
      meta.push_back({"final_total_error", io::format_real(last.total_error)});
      meta.push_back({"final_objective", io::format_real(last.objective)});
      if constexpr (std::is_same_v<M, vorticity::VorticityModel>) {
        io::write_field(dir / "recovered_final_field.csv", result.state.primal.back(), model.grid());
        if (reference) io::write_field(dir / "truth_final_field.csv", reference->back(), model.grid());
      }
      io::write_meta(dir / "meta.txt", meta);
      log << "admm: " << last.iter << " sweeps, constraint error " << io::format_real(last.constraint_error)
          << ", total error " << io::format_real(last.total_error) << "\n";
      return int{kSuccess};
    }

    BaselineConfig bc;
    bc.method = r.solver == "gd"      ? BaselineMethod::GradientDescent
                : r.solver == "cg-fr" ? BaselineMethod::FletcherReeves
                                      : BaselineMethod::PolakRibiere;
    bc.max_iters = r.max_iters;
    bc.initial_step = r.ls_step;
    bc.shrink = r.ls_shrink;
    bc.sufficient_decrease = r.ls_c1;
    bc.grad_tol = r.grad_tol;

    StateVector u0(model.dim(), 0.0);
    if (r.init == InitKind::Rollout) {
      if (r.init_u0.size() != model.dim()) throw ConfigError("init: rollout state has the wrong dimension");
      u0 = r.init_u0;
    } else if (r.init == InitKind::File) {
      u0 = io::read_states(r.init_path).at(0);
      if (u0.size() != model.dim()) throw ConfigError("init: file state has the wrong dimension");
    }

    BaselineResult result;
    int code = kSuccess;
    try {
      result = bc.method == BaselineMethod::GradientDescent ? gradient_descent(u0, prob, bc) : nonlinear_cg(u0, prob, bc);
      meta.push_back({"status", result.converged ? "gradient tolerance reached" : "iteration budget completed"});
    } catch (const BaselineStall& e) {
      result = e.partial();
      code = kSolverStall;
      meta.push_back({"status", std::string("stalled: ") + e.what()});
    }
    io::write_history(dir / "history.csv", result.history);
    const Trajectory traj = rollout(model, result.u0, r.total_steps);
    io::write_states(dir / "recovered_trajectory.csv", traj);
    meta.push_back({"iterations", std::to_string(result.history.back().iter)});
    meta.push_back({"final_u0", detail::join(result.u0)});
    meta.push_back({"final_objective", io::format_real(result.history.back().objective)});
    meta.push_back({"final_grad_norm", io::format_real(result.history.back().grad_norm)});
    if (reference) meta.push_back({"final_total_error", io::format_real(total_error(traj, *reference))});
    io::write_meta(dir / "meta.txt", meta);
    log << r.solver << ": " << result.history.back().iter << " iterations, objective "
        << io::format_real(result.history.back().objective) << ", u0 = (" << detail::join(result.u0) << ")\n";
    return code;
  });
}

inline int cmd_check_adjoint(const ResolvedConfig& r, std::ostream& log) {
  const bool vort = r.model == "vorticity2d";
  const double threshold = vort ? 1e-8 : 1e-10;
  const double tangent_threshold = 1e-4;
  // Both maps of the vorticity model contain Poisson solves; a tight SOR
  // tolerance keeps the check about the algebra rather than the solver.
  const double sor_tol = vort ? std::min(r.sor_tol, 1e-12) : 0.0;
  return detail::with_model(
      r,
      [&](const auto& model, const StateVector& truth0, const NormOperator&) {
        using M = std::decay_t<decltype(model)>;
        const double spread = r.model == "lorenz" ? 5.0 : r.model.rfind("burgers", 0) == 0 ? 0.1 : 0.0;
        StateVector base = truth0;
        if (vort) base.assign(model.dim(), 0.0);
        const double vort_spread = vort ? 5.0 : spread;
        detail::AdjointReport rep =
            r.corrupt_adjoint
                ? detail::adjoint_checks(detail::CorruptedAdjoint<M>{model}, base, vort_spread, r.trials, r.seed)
                : detail::adjoint_checks(model, base, vort_spread, r.trials, r.seed);
        log << "model " << r.model << ": " << r.trials << " random triples\n"
            << "  max dot-product relative error " << io::format_real(rep.max_dot_error) << " (threshold "
            << threshold << ")\n"
            << "  max tangent finite-difference relative error " << io::format_real(rep.max_tangent_error)
            << " (threshold " << tangent_threshold << ")\n";
        int code = kSuccess;
        if (!(rep.max_dot_error <= threshold)) {
          log << "FAILED: adjoint dot-product test\n";
          code = kVerificationFailure;
        }
        if (!(rep.max_tangent_error <= tangent_threshold)) {
          log << "FAILED: tangent finite-difference test\n";
          code = kVerificationFailure;
        }
        return code;
      },
      sor_tol);
}

inline int cmd_landscape(const ResolvedConfig& r, std::ostream& log) {
  if (r.model != "lorenz") throw ConfigError("landscape: only the three-dimensional lorenz model can be scanned");
  return detail::with_model(r, [&](const auto& model, const StateVector& truth0, const NormOperator& norm) {
    using M = std::decay_t<decltype(model)>;
    detail::TwinData data = detail::twin_data(r, model, truth0);
    AssimilationProblem<M> prob{model, data.obs, r.alpha, 1.0, norm};
    LandscapeBox box{{r.box[0], r.box[1], r.resolution}, {r.box[2], r.box[3], r.resolution}, {r.box[4], r.box[5], r.resolution}};
    const auto cells = scan_landscape(prob, box, r.threads);
    const detail::fs::path dir(r.output_dir);
    io::write_landscape(dir / "landscape.csv", cells);
    auto meta = detail::echo(r, "landscape");
    meta.push_back({"box", detail::join(r.box)});
    meta.push_back({"resolution", std::to_string(r.resolution)});
    io::write_meta(dir / "meta.txt", meta);
    const auto best = std::min_element(cells.begin(), cells.end(),
                                       [](const LandscapeCell& a, const LandscapeCell& b) { return a.value < b.value; });
    log << "scanned " << cells.size() << " points; minimum F = " << io::format_real(best->value) << " at ("
        << io::format_real(best->x0) << "," << io::format_real(best->y0) << "," << io::format_real(best->z0) << ")\n";
    return int{kSuccess};
  });
}

/// Runs one subcommand and maps failures onto the exit-code contract.
inline int run_command(const std::string& command, const RunConfig& raw, std::ostream& log, std::ostream& err) {
  try {
    const ResolvedConfig r = resolve(raw);
    if (command == "generate-obs") return cmd_generate_obs(r, log);
    if (command == "solve") return cmd_solve(r, log);
    if (command == "check-adjoint") return cmd_check_adjoint(r, log);
    if (command == "landscape") return cmd_landscape(r, log);
    err << "unknown command: " << command << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const LineSearchStall& e) {
    err << "solver stall: " << e.what() << "\n";
    return kSolverStall;
  } catch (const NonConvergence& e) {
    err << "solver stall: " << e.what() << "\n";
    return kSolverStall;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverStall;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace admm4dvar::cli
