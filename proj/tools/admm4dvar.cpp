#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "admm4dvar/cli/commands.hpp"

using admm4dvar::cli::RunConfig;

namespace {

void register_options(CLI::App& app, RunConfig& c) {
  app.add_option("--model", c.model, "lorenz | burgers-fd | burgers-fem | burgers-spectral | vorticity2d")->required();
  app.add_option("--dt", c.dt, "time step");
  app.add_option("--T", c.T, "assimilation window length");
  app.add_option("--T_obs", c.T_obs, "observation interval");
  app.add_option("--m", c.m, "grid points (Burgers: intervals, spectral: modes, vorticity: points per axis)");
  app.add_option("--gamma", c.gamma, "Burgers viscosity");
  app.add_option("--kappa", c.kappa, "vorticity biharmonic coefficient");
  app.add_option("--dx", c.dx, "vorticity grid spacing");
  app.add_option("--mu", c.mu, "ADMM objective scaling");
  app.add_option("--eta", c.eta, "ADMM proximal weight");
  app.add_option("--s", c.s, "ADMM penalty parameter");
  app.add_option("--alpha", c.alpha, "background weight");
  app.add_option("--noise_std", c.noise_std, "observation noise standard deviation");
  app.add_option("--seed", c.seed, "observation noise seed");
  app.add_option("--truth_seed", c.truth_seed, "vorticity initial-field seed");
  app.add_option("--truth_u0", c.truth_u0, "lorenz true initial state x,y,z");
  app.add_option("--norm", c.norm, "euclidean | energy");
  app.add_option("--solver", c.solver, "admm | gd | cg-fr | cg-pr");
  app.add_option("--init", c.init, "zeros | rollout:<components> | file:<path>");
  app.add_option("--max_iters", c.max_iters, "outer sweeps (admm) or iterations (baselines)");
  app.add_option("--constraint_tol", c.constraint_tol, "stop once the constraint error is below this (0 = off)");
  app.add_option("--threads", c.threads, "worker threads");
  app.add_option("--schedule", c.schedule, "jacobi | gauss-seidel (experimental)");
  app.add_option("--ls_step", c.ls_step, "initial line-search step");
  app.add_option("--ls_shrink", c.ls_shrink, "line-search shrink factor");
  app.add_option("--ls_c1", c.ls_c1, "sufficient-decrease constant");
  app.add_option("--grad_tol", c.grad_tol, "baseline gradient tolerance");
  app.add_option("--sor_tol", c.sor_tol, "SOR residual tolerance");
  app.add_option("--observations", c.observations, "read observations from this CSV instead of generating them");
  app.add_option("--truth", c.truth, "reference trajectory CSV for total_error");
  app.add_option("--box", c.box, "landscape box xlo,xhi,ylo,yhi,zlo,zhi");
  app.add_option("--resolution", c.resolution, "landscape points per axis");
  app.add_option("--trials", c.trials, "random triples for check-adjoint");
  app.add_option("--corrupt_adjoint", c.corrupt_adjoint, "debug: sabotage the adjoint in check-adjoint");
  app.add_option("--output_dir", c.output_dir, "artifact directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"4D-Var data assimilation by linearized multi-block ADMM"};
  app.set_config("--config", "", "key = value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  RunConfig cfg;
  register_options(app, cfg);

  std::string command;
  for (const char* name : {"generate-obs", "solve", "check-adjoint", "landscape"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return admm4dvar::cli::kConfigError;
  }
  return admm4dvar::cli::run_command(command, cfg, std::cout, std::cerr);
}
