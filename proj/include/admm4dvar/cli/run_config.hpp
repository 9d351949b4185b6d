#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "admm4dvar/core/errors.hpp"
#include "admm4dvar/core/vector_ops.hpp"

namespace admm4dvar::cli {

/// Raw experiment configuration. Unset optionals take per-model defaults in resolve().
struct RunConfig {
  std::string model;  ///< lorenz | burgers-fd | burgers-fem | burgers-spectral | vorticity2d

  std::optional<double> dt, T, T_obs, gamma, kappa, dx;
  std::optional<std::size_t> m;

  std::optional<double> mu, alpha, noise_std;
  double eta = 0.1;
  double s = 2.0 / 3.0;
  std::uint64_t seed = 1;
  std::uint64_t truth_seed = 2024;  ///< vorticity2d random initial field
  std::optional<std::string> truth_u0;
  std::optional<std::string> norm;  ///< euclidean | energy

  std::string solver = "admm";  ///< admm | gd | cg-fr | cg-pr
  std::optional<std::string> init;
  std::optional<std::size_t> max_iters;
  double constraint_tol = 0.0;  ///< 0 disables early stopping
  std::size_t threads = 1;
  std::string schedule = "jacobi";  ///< jacobi | gauss-seidel (experimental)

  double ls_step = 1.0;
  double ls_shrink = 0.5;
  double ls_c1 = 1e-4;
  double grad_tol = 1e-8;

  double sor_tol = 1e-10;
  std::optional<std::string> observations;  ///< read instead of generating
  std::optional<std::string> truth;         ///< reference trajectory file

  std::string box = "-6,6,-6,6,14,26";
  std::size_t resolution = 49;

  std::size_t trials = 100;
  bool corrupt_adjoint = false;

  std::string output_dir = "out";
};

enum class InitKind { Zeros, Rollout, File };

/// Every field concrete, checked and with the derived step counts.
struct ResolvedConfig {
  std::string model;
  double dt = 0, T = 0, T_obs = 0, gamma = 0, kappa = 0, dx = 0;
  std::size_t m = 0;
  double mu = 0, alpha = 0, noise_std = 0, eta = 0, s = 0;
  std::uint64_t seed = 0, truth_seed = 0;
  StateVector truth_u0;  ///< lorenz only
  bool energy_norm = false;
  std::string solver;
  InitKind init = InitKind::Zeros;
  StateVector init_u0;
  std::string init_path;
  std::size_t max_iters = 0;
  double constraint_tol = 0;
  std::size_t threads = 1;
  std::string schedule;
  double ls_step = 0, ls_shrink = 0, ls_c1 = 0, grad_tol = 0, sor_tol = 0;
  std::optional<std::string> observations, truth;
  std::vector<double> box;
  std::size_t resolution = 0;
  std::size_t trials = 0;
  bool corrupt_adjoint = false;
  std::string output_dir;

  std::size_t total_steps = 0;  ///< N = T / dt
  std::size_t stride = 0;       ///< q = T_obs / dt
  std::string init_text;
};

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"lorenz", "burgers-fd", "burgers-fem", "burgers-spectral", "vorticity2d"};
  return names;
}

inline std::vector<double> parse_reals(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string field = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(field, &used));
      if (field.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw ConfigError(key + ": cannot parse '" + field + "' as a number");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

namespace detail {
inline std::size_t integral_ratio(double num, double den, const std::string& what) {
  const double r = num / den;
  const double rounded = std::round(r);
  if (!(rounded >= 1.0) || std::abs(r - rounded) > 1e-9 * std::max(1.0, rounded))
    throw ConfigError(what + " must be a positive integer multiple of dt");
  return static_cast<std::size_t>(rounded);
}
}  // namespace detail

inline ResolvedConfig resolve(const RunConfig& c) {
  ResolvedConfig r;
  r.model = c.model;
  bool known = false;
  for (const auto& n : model_names()) known = known || n == c.model;
  if (!known) throw ConfigError("model: unknown model '" + c.model + "'");

  const bool lorenz = c.model == "lorenz";
  const bool vort = c.model == "vorticity2d";
  const bool spectral = c.model == "burgers-spectral";

  // Per-model defaults.
  double dt = 0.01, T = 3.0, T_obs = 0.3, mu = 100.0, noise = 0.0;
  std::size_t m = 0, iters = 600;
  std::string init = "rollout:-3,-3,10";
  if (c.model == "burgers-fd") {
    dt = 0.005, T = 2.0, T_obs = 0.2, mu = 20.0, noise = 0.1, m = 100, iters = 1000, init = "zeros";
  } else if (c.model == "burgers-fem") {
    dt = 0.002, T = 2.0, T_obs = 0.2, mu = 20.0, noise = 0.1, m = 100, iters = 1000, init = "zeros";
  } else if (spectral) {
    dt = 0.002, T = 2.0, T_obs = 0.2, mu = 20.0, noise = 0.1 * std::sqrt(2.0) * 0.1, m = 99, iters = 1000,
    init = "zeros";
  } else if (vort) {
    m = 20, mu = 20.0, noise = 0.5, iters = 1000, init = "zeros";
  }
  r.dx = c.dx.value_or(0.2);
  r.m = c.m.value_or(m);
  if (vort) {
    dt = 3.0 * r.dx * r.dx;
    T = 300 * dt;
    T_obs = 30 * dt;
  }
  r.dt = c.dt.value_or(dt);
  r.T = c.T.value_or(T);
  r.T_obs = c.T_obs.value_or(T_obs);
  r.gamma = c.gamma.value_or(0.05);
  r.kappa = c.kappa.value_or(0.001 * r.dx * r.dx);
  r.mu = c.mu.value_or(mu);
  r.alpha = c.alpha.value_or(0.1);
  r.noise_std = c.noise_std.value_or(noise);
  r.eta = c.eta;
  r.s = c.s;
  r.seed = c.seed;
  r.truth_seed = c.truth_seed;
  r.solver = c.solver;
  r.max_iters = c.max_iters.value_or(iters);
  r.constraint_tol = c.constraint_tol;
  r.threads = c.threads;
  r.schedule = c.schedule;
  r.ls_step = c.ls_step;
  r.ls_shrink = c.ls_shrink;
  r.ls_c1 = c.ls_c1;
  r.grad_tol = c.grad_tol;
  r.sor_tol = c.sor_tol;
  r.observations = c.observations;
  r.truth = c.truth;
  r.resolution = c.resolution;
  r.trials = c.trials;
  r.corrupt_adjoint = c.corrupt_adjoint;
  r.output_dir = c.output_dir;

  const std::string norm = c.norm.value_or(vort ? "energy" : "euclidean");
  if (norm != "euclidean" && norm != "energy") throw ConfigError("norm: expected euclidean or energy");
  if (norm == "energy" && !vort) throw ConfigError("norm: the energy norm needs a two-dimensional grid (vorticity2d)");
  r.energy_norm = norm == "energy";

  if (lorenz) {
    r.truth_u0 = parse_reals(c.truth_u0.value_or("-0.5,0.5,20.5"), "truth_u0");
    if (r.truth_u0.size() != 3) throw ConfigError("truth_u0: expected three components");
  } else if (c.truth_u0) {
    throw ConfigError("truth_u0: only used by the lorenz model");
  }

  if (!(r.dt > 0.0)) throw ConfigError("dt: must be positive");
  if (!(r.T > 0.0)) throw ConfigError("T: must be positive");
  if (!(r.T_obs > 0.0)) throw ConfigError("T_obs: must be positive");
  r.total_steps = detail::integral_ratio(r.T, r.dt, "T");
  r.stride = detail::integral_ratio(r.T_obs, r.dt, "T_obs");
  if (r.total_steps % r.stride != 0) throw ConfigError("T: must be an integer multiple of T_obs");
  if (!(r.mu > 0.0)) throw ConfigError("mu: must be positive");
  if (!(r.eta > 0.0)) throw ConfigError("eta: must be positive");
  if (!(r.s > 0.0)) throw ConfigError("s: must be positive");
  if (!(r.alpha >= 0.0)) throw ConfigError("alpha: must be non-negative");
  if (!(r.noise_std >= 0.0)) throw ConfigError("noise_std: must be non-negative");
  if (!(r.constraint_tol >= 0.0)) throw ConfigError("constraint_tol: must be non-negative");
  if (r.threads == 0) throw ConfigError("threads: must be at least 1");
  if (r.schedule != "jacobi" && r.schedule != "gauss-seidel") throw ConfigError("schedule: expected jacobi or gauss-seidel");
  if (r.solver != "admm" && r.solver != "gd" && r.solver != "cg-fr" && r.solver != "cg-pr")
    throw ConfigError("solver: expected admm, gd, cg-fr or cg-pr");
  if (!(r.sor_tol > 0.0)) throw ConfigError("sor_tol: must be positive");

  r.init_text = c.init.value_or(init);
  if (r.init_text == "zeros") {
    r.init = InitKind::Zeros;
  } else if (r.init_text.rfind("rollout:", 0) == 0) {
    r.init = InitKind::Rollout;
    r.init_u0 = parse_reals(r.init_text.substr(8), "init");
  } else if (r.init_text.rfind("file:", 0) == 0) {
    r.init = InitKind::File;
    r.init_path = r.init_text.substr(5);
    if (r.init_path.empty()) throw ConfigError("init: file: needs a path");
  } else {
    throw ConfigError("init: expected zeros, rollout:<components> or file:<path>");
  }

  r.box = parse_reals(c.box, "box");
  if (r.box.size() != 6) throw ConfigError("box: expected six numbers xlo,xhi,ylo,yhi,zlo,zhi");
  if (r.resolution == 0) throw ConfigError("resolution: must be at least 1");
  return r;
}

}  // namespace admm4dvar::cli
