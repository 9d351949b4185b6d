// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "admm4dvar/cli/commands.hpp"

using namespace admm4dvar;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int n, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", n, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const fs::path& work_root() {
  static const fs::path root = [] {
    fs::path r = fs::temp_directory_path() / "admm4dvar_acceptance";
    fs::remove_all(r);
    fs::create_directories(r);
    return r;
  }();
  return root;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Columns of an ADMM history.csv.
struct History {
  std::vector<double> total_error, constraint_error, objective;
};

History read_history(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  History h;
  while (std::getline(in, line)) {
    std::vector<double> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(std::stod(cell));
    h.total_error.push_back(f.at(1));
    h.constraint_error.push_back(f.at(2));
    h.objective.push_back(f.at(3));
  }
  return h;
}

struct CliRun {
  fs::path dir;
  int code = -1;
  double seconds = 0.0;
};

/// generate-obs (for the truth trajectory) followed by solve in the same directory.
CliRun solve_run(cli::RunConfig c, const std::string& tag, bool with_truth = true) {
  CliRun run;
  run.dir = work_root() / tag;
  c.output_dir = run.dir.string();
  std::ostringstream log, err;
  if (with_truth && cli::run_command("generate-obs", c, log, err) != 0) {
    std::printf("  %s generate-obs failed: %s\n", tag.c_str(), err.str().c_str());
    return run;
  }
  const auto t0 = Clock::now();
  run.code = cli::run_command("solve", c, log, err);
  run.seconds = seconds_since(t0);
  if (run.code != 0) std::printf("  %s solve exited %d: %s\n", tag.c_str(), run.code, err.str().c_str());
  return run;
}

cli::RunConfig config_for(const std::string& model) {
  cli::RunConfig c;
  c.model = model;
  return c;
}

cli::RunConfig lorenz_precise() { return config_for("lorenz"); }

cli::RunConfig lorenz_noisy() {
  cli::RunConfig c = config_for("lorenz");
  c.noise_std = 1.0;
  c.max_iters = 1000;
  return c;
}

const std::vector<std::string> kBurgers{"burgers-fd", "burgers-fem", "burgers-spectral"};

/// Samples sum_i a_i sin(i x) at the m interior nodes x_j = j pi / (m + 1).
StateVector sine_synthesis(ConstView a) {
  const std::size_t m = a.size();
  StateVector u(m, 0.0);
  for (std::size_t j = 1; j <= m; ++j) {
    const double x = std::numbers::pi * static_cast<double>(j) / static_cast<double>(m + 1);
    for (std::size_t i = 1; i <= m; ++i) u[j - 1] += a[i - 1] * std::sin(static_cast<double>(i) * x);
  }
  return u;
}

double rms(ConstView a, ConstView b) { return std::sqrt(distance_squared(a, b) / static_cast<double>(a.size())); }

AssimilationProblem<lorenz::LorenzModel> lorenz_problem(double noise_std) {
  AssimilationProblem<lorenz::LorenzModel> p;
  p.obs = generate_observations(p.model, lorenz::LorenzModel::default_initial_state(), 300, 30, 0.3, noise_std, 1);
  p.alpha = 0.1;
  p.mu = 100.0;
  return p;
}

void criteria_1_2() {
  const auto t0 = Clock::now();
  double worst_dot = 0.0, worst_dot_vort = 0.0, worst_tangent = 0.0;
  std::string detail;
  for (const std::string name : {"lorenz", "burgers-fd", "burgers-fem", "burgers-spectral", "vorticity2d"}) {
    cli::RunConfig c = config_for(name);
    const bool vort = name == "vorticity2d";
    if (vort) c.m = 11;
    const cli::ResolvedConfig r = cli::resolve(c);
    const cli::detail::AdjointReport rep = cli::detail::with_model(
        r,
        [&](const auto& model, const StateVector& truth0, const NormOperator&) {
          const double spread = name == "lorenz" ? 5.0 : vort ? 5.0 : 0.1;
          StateVector base = vort ? StateVector(model.dim(), 0.0) : truth0;
          return cli::detail::adjoint_checks(model, base, spread, 100, 1);
        },
        vort ? 1e-12 : 0.0);
    (vort ? worst_dot_vort : worst_dot) = std::max(vort ? worst_dot_vort : worst_dot, rep.max_dot_error);
    worst_tangent = std::max(worst_tangent, rep.max_tangent_error);
    detail += " " + name + fmt("=%.2e", rep.max_dot_error) + "/" + fmt("%.2e", rep.max_tangent_error);
  }
  const double secs = seconds_since(t0);
  std::printf("  adjoint/tangent errors:%s (%.1f s)\n", detail.c_str(), secs);
  report(1, worst_dot <= 1e-10 && worst_dot_vort <= 1e-8 && secs < 10.0,
         "max dot-product error " + fmt("%.2e", worst_dot) + " (vorticity " + fmt("%.2e", worst_dot_vort) + "), " +
             fmt("%.1f s", secs));
  report(2, worst_tangent <= 1e-4 && secs < 10.0,
         "max tangent finite-difference error " + fmt("%.2e", worst_tangent) + fmt(", %.1f s", secs));
}

void criterion_3() {
  const auto t0 = Clock::now();
  const auto p = lorenz_problem(0.0);
  const StateVector u0{-3, -3, 10};
  const StateVector g = shooting_gradient(u0, p);
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    StateVector up = u0, um = u0;
    up[i] += 1e-6;
    um[i] -= 1e-6;
    const double fd = (shooting_objective(up, p) - shooting_objective(um, p)) / 2e-6;
    worst = std::max(worst, std::abs(g[i] - fd) / std::abs(fd));
  }
  const double secs = seconds_since(t0);
  report(3, worst <= 1e-4 && secs < 5.0, "max componentwise relative error " + fmt("%.2e", worst) + fmt(", %.2f s", secs));
}

void criterion_4() {
  const auto t0 = Clock::now();
  auto p = lorenz_problem(0.0);
  p.mu = 1.0;
  const LandscapeBox box;
  const auto cells = scan_landscape(p, box, 1);
  const auto best = std::min_element(cells.begin(), cells.end(),
                                     [](const LandscapeCell& a, const LandscapeCell& b) { return a.value < b.value; });
  const double hx = 12.0 / 48.0, hz = 12.0 / 48.0;
  const bool near = std::abs(best->x0 + 0.5) <= hx + 1e-12 && std::abs(best->y0 - 0.5) <= hx + 1e-12 &&
                    std::abs(best->z0 - 20.5) <= hz + 1e-12;
  const std::size_t n = box.x.points;
  std::size_t kz = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(box.z.value(k) - 20.5) < std::abs(box.z.value(kz) - 20.5)) kz = k;
  std::vector<double> slice(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) slice[i * n + j] = cells[(i * n + j) * n + kz].value;
  const std::size_t minima = count_strict_local_minima(slice, n, n);
  const double secs = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "grid minimum F=%.3g at (%g,%g,%g); %zu strict local minima on z=%g; %.1f s",
                best->value, best->x0, best->y0, best->z0, minima, box.z.value(kz), secs);
  report(4, near && minima >= 2 && secs < 300.0, buf);
}

void criterion_5(const CliRun& admm_run) {
  const auto t0 = Clock::now();
  auto p = lorenz_problem(0.0);
  p.mu = 1.0;
  const StateVector truth = lorenz::LorenzModel::default_initial_state();
  const double f_truth = shooting_objective(truth, p);
  double f_admm = 0.0;
  if (admm_run.code == 0) f_admm = shooting_objective(io::read_states(admm_run.dir / "recovered_trajectory.csv").at(0), p);
  const double reference = std::max(f_truth, f_admm);

  bool pass = admm_run.code == 0;
  std::string detail;
  for (BaselineMethod m : {BaselineMethod::GradientDescent, BaselineMethod::FletcherReeves, BaselineMethod::PolakRibiere}) {
    BaselineConfig cfg;
    cfg.method = m;
    BaselineResult r;
    try {
      r = m == BaselineMethod::GradientDescent ? gradient_descent(StateVector{-3, -3, 10}, p, cfg)
                                               : nonlinear_cg(StateVector{-3, -3, 10}, p, cfg);
    } catch (const BaselineStall& e) {
      r = e.partial();
    }
    const double dist = std::sqrt(distance_squared(r.u0, truth));
    const double f = r.history.back().objective;
    pass = pass && dist > 1.0 && f > 10.0 * reference;
    const char* name = m == BaselineMethod::GradientDescent ? "gd" : m == BaselineMethod::FletcherReeves ? "cg-fr" : "cg-pr";
    char buf[120];
    std::snprintf(buf, sizeof buf, " %s: |u0-truth|=%.3g F=%.4g;", name, dist, f);
    detail += buf;
  }
  const double secs = seconds_since(t0);
  pass = pass && secs < 60.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, " F(truth)=%.3g, F(ADMM u0)=%.4g; %.1f s", f_truth, f_admm, secs);
  report(5, pass, detail + buf);
}

void criterion_6(const CliRun& run) {
  if (run.code != 0) return report(6, false, "solve failed");
  const History h = read_history(run.dir / "history.csv");
  const double ratio = h.constraint_error.at(1) / h.constraint_error.back();
  const StateVector u0 = io::read_states(run.dir / "recovered_trajectory.csv").at(0);
  const double dist = std::sqrt(distance_squared(u0, lorenz::LorenzModel::default_initial_state()));
  char buf[200];
  std::snprintf(buf, sizeof buf, "constraint error %.6g -> %.6g (%.2f orders) over %zu sweeps; |u0-truth|=%.3g; %.1f s",
                h.constraint_error.at(1), h.constraint_error.back(), std::log10(ratio), h.constraint_error.size() - 1,
                dist, run.seconds);
  report(6, ratio >= 1e4 && dist <= 0.1 && run.seconds < 120.0, buf);
}

void criterion_7(const CliRun& run) {
  if (run.code != 0) return report(7, false, "solve failed");
  const History h = read_history(run.dir / "history.csv");
  const std::size_t burn = 50, last = h.constraint_error.size() - 1;
  std::size_t increases = 0;
  for (std::size_t k = burn + 1; k <= last; ++k)
    if (h.constraint_error[k] > h.constraint_error[k - 1]) ++increases;
  const std::size_t steps = last - burn;
  const double final_total = h.total_error.back();
  const double earlier_total = h.total_error.at(last - 100);
  const bool plateau = final_total > 0.0 && std::abs(final_total - earlier_total) <= 0.05 * final_total;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "constraint error rose on %zu of %zu post-burn-in sweeps (allowed %zu); total error %.4g at sweep %zu, "
                "%.4g at sweep %zu; %.1f s",
                increases, steps, steps / 100, earlier_total, last - 100, final_total, last, run.seconds);
  report(7, increases <= steps / 100 && plateau && run.seconds < 180.0, buf);
}

void criteria_8_9(const std::map<std::string, CliRun>& runs) {
  bool pass = true;
  double total_secs = 0.0;
  std::string detail;
  for (const auto& name : kBurgers) {
    const CliRun& run = runs.at(name);
    total_secs += run.seconds;
    if (run.code != 0) {
      pass = false;
      detail += " " + name + ": solve failed;";
      continue;
    }
    const History h = read_history(run.dir / "history.csv");
    const double ratio = h.constraint_error.back() / h.constraint_error.at(1);
    StateVector rec = io::read_states(run.dir / "recovered_trajectory.csv").back();
    StateVector truth = io::read_states(run.dir / "truth_trajectory.csv").back();
    if (name == "burgers-spectral") {
      rec = sine_synthesis(rec);
      truth = sine_synthesis(truth);
    }
    const double err = rms(rec, truth);
    pass = pass && ratio < 0.01 && err <= 0.1;
    char buf[160];
    std::snprintf(buf, sizeof buf, " %s: constraint ratio %.2e, final RMS %.4f, %.1f s;", name.c_str(), ratio, err,
                  run.seconds);
    detail += buf;
  }
  report(8, pass && total_secs < 900.0, detail + fmt(" total %.1f s", total_secs));

  const double fd = runs.at("burgers-fd").seconds, fem = runs.at("burgers-fem").seconds,
               sp = runs.at("burgers-spectral").seconds;
  char buf[160];
  std::snprintf(buf, sizeof buf, "ADMM wall clock FD %.2f s < FEM %.2f s < spectral %.2f s", fd, fem, sp);
  report(9, fd < fem && fem < sp, buf);
}

void criterion_10() {
  const auto t0 = Clock::now();
  const Grid2D g(20, 0.2, 0.2);
  // Zero-boundary fields of g sit one node deeper in `wide`, so the sum of J includes the ring
  // of boundary nodes of g that interior values still reach.
  const Grid2D wide(22, 0.2, 0.2);
  RandomStream stream(10);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const StateVector u = gaussian_draw(stream, g.interior_dim()), v = gaussian_draw(stream, g.interior_dim());
    StateVector uw(wide.interior_dim(), 0.0), vw(wide.interior_dim(), 0.0);
    for (std::size_t i = 1; i < g.m; ++i)
      for (std::size_t j = 1; j < g.m; ++j) {
        uw[wide.index(i + 1, j + 1)] = u[g.index(i, j)];
        vw[wide.index(i + 1, j + 1)] = v[g.index(i, j)];
      }
    const StateVector jac = vorticity::arakawa_jacobian(uw, vw, wide);
    double sum = 0.0;
    for (double x : jac) sum += x;
    const double scale = norm2(u) * norm2(v) / (g.dx * g.dy);
    worst = std::max({worst, std::abs(sum) / scale, std::abs(dot(uw, jac)) / scale, std::abs(dot(vw, jac)) / scale});
  }
  const double secs = seconds_since(t0);
  report(10, worst <= 1e-10 && secs < 5.0,
         "max |sum J|, |sum uJ|, |sum vJ| relative to |u||v|/(dx dy): " + fmt("%.2e", worst) + fmt(", %.2f s", secs));
}

void criterion_11(const CliRun& run) {
  if (run.code != 0) return report(11, false, "solve failed");
  const History h = read_history(run.dir / "history.csv");
  const double orders = std::log10(h.constraint_error.at(1) / h.constraint_error.back());
  const vorticity::VorticityModel model{vorticity::VorticityConfig{}};
  const StateVector rec = io::read_states(run.dir / "recovered_trajectory.csv").back();
  const StateVector truth = io::read_states(run.dir / "truth_trajectory.csv").back();
  const StateVector obs = io::read_states(run.dir / "observations.csv").back();
  const StateVector err = subtract(rec, truth), noise = subtract(obs, truth);
  const double err_energy = std::sqrt(model.energy_inner(err, err));
  const double noise_energy = std::sqrt(model.energy_inner(noise, noise));
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "constraint error %.4g -> %.4g (%.2f orders) over %zu sweeps; final energy error %.4g vs noise %.4g; "
                "%.1f s",
                h.constraint_error.at(1), h.constraint_error.back(), orders, h.constraint_error.size() - 1, err_energy,
                noise_energy, run.seconds);
  report(11, orders >= 3.0 && err_energy < noise_energy && run.seconds < 3600.0, buf);
}

void criterion_12(const std::vector<std::pair<std::string, CliRun>>& first,
                  const std::vector<std::pair<std::string, cli::RunConfig>>& configs) {
  bool pass = true;
  std::string detail;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const CliRun again = solve_run(configs[i].second, configs[i].first + "_rerun", false);
    const std::string a = slurp(first[i].second.dir / "history.csv");
    const std::string b = slurp(again.dir / "history.csv");
    const bool same = again.code == 0 && !a.empty() && a == b;
    pass = pass && same;
    detail += " " + configs[i].first + (same ? " identical;" : " DIFFERS;");
  }
  report(12, pass, "rerun history.csv bytes:" + detail);
}

}  // namespace

int main() {
  std::printf("acceptance working directory: %s\n", work_root().string().c_str());
  criteria_1_2();
  criterion_3();
  criterion_4();

  const CliRun precise = solve_run(lorenz_precise(), "lorenz_precise");
  criterion_5(precise);
  criterion_6(precise);

  const CliRun noisy = solve_run(lorenz_noisy(), "lorenz_noisy");
  criterion_7(noisy);

  std::map<std::string, CliRun> burgers;
  for (const auto& name : kBurgers) burgers[name] = solve_run(config_for(name), name);
  criteria_8_9(burgers);

  criterion_10();
  criterion_11(solve_run(config_for("vorticity2d"), "vorticity"));

  std::vector<std::pair<std::string, CliRun>> first{{"lorenz_precise", precise}, {"lorenz_noisy", noisy}};
  std::vector<std::pair<std::string, cli::RunConfig>> configs{{"lorenz_precise", lorenz_precise()},
                                                              {"lorenz_noisy", lorenz_noisy()}};
  for (const auto& name : kBurgers) {
    first.push_back({name, burgers[name]});
    configs.push_back({name, config_for(name)});
  }
  criterion_12(first, configs);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
