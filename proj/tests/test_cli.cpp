#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "admm4dvar/cli/commands.hpp"

using namespace admm4dvar;
using namespace admm4dvar::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("admm4dvar_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

int run(const std::string& command, const RunConfig& c, std::string* log_out = nullptr) {
  std::ostringstream log, err;
  const int code = run_command(command, c, log, err);
  if (log_out) *log_out = log.str() + err.str();
  return code;
}

RunConfig lorenz_config(const fs::path& out) {
  RunConfig c;
  c.model = "lorenz";
  c.output_dir = out.string();
  return c;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(ADMM4DVAR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(CliResolve, DefaultsAndDerivedCounts) {
  RunConfig c;
  c.model = "lorenz";
  const ResolvedConfig r = resolve(c);
  EXPECT_EQ(r.total_steps, 300u);
  EXPECT_EQ(r.stride, 30u);
  EXPECT_EQ(r.mu, 100.0);
  EXPECT_EQ(r.init, InitKind::Rollout);
  EXPECT_EQ(r.init_u0, (StateVector{-3, -3, 10}));

  c.model = "vorticity2d";
  const ResolvedConfig v = resolve(c);
  EXPECT_TRUE(v.energy_norm);
  EXPECT_EQ(v.total_steps, 300u);
  EXPECT_EQ(v.stride, 30u);
}

TEST(CliResolve, RejectsBadConfigurations) {
  auto bad = [](auto mutate) {
    RunConfig c;
    c.model = "lorenz";
    mutate(c);
    EXPECT_THROW(resolve(c), ConfigError);
  };
  bad([](RunConfig& c) { c.model = "shallow-water"; });
  bad([](RunConfig& c) { c.T_obs = 0.005; });
  bad([](RunConfig& c) { c.T_obs = 0.7; });
  bad([](RunConfig& c) { c.norm = "energy"; });
  bad([](RunConfig& c) { c.mu = 0.0; });
  bad([](RunConfig& c) { c.solver = "newton"; });
  bad([](RunConfig& c) { c.init = "ones"; });
  bad([](RunConfig& c) { c.truth_u0 = "1,2"; });
  bad([](RunConfig& c) { c.box = "0,1,0,1"; });
  bad([](RunConfig& c) { c.schedule = "random"; });
}

TEST(CliCommands, GenerateObsBurgersFd) {
  const fs::path out = fresh_dir("gen_fd");
  RunConfig c;
  c.model = "burgers-fd";
  c.output_dir = out.string();
  ASSERT_EQ(run("generate-obs", c), 0);
  const auto obs = io::read_states(out / "observations.csv");
  ASSERT_EQ(obs.size(), 11u);
  for (const auto& o : obs) EXPECT_EQ(o.size(), 99u);
  EXPECT_EQ(io::read_states(out / "truth_trajectory.csv").size(), 401u);
  EXPECT_TRUE(fs::exists(out / "meta.txt"));
}

TEST(CliCommands, ZeroIterationsWritesOneHistoryRow) {
  const fs::path out = fresh_dir("zero_iters");
  RunConfig c = lorenz_config(out);
  c.max_iters = 0;
  ASSERT_EQ(run("solve", c), 0);
  EXPECT_EQ(line_count(out / "history.csv"), 2u);
  EXPECT_EQ(io::read_states(out / "recovered_trajectory.csv").size(), 301u);
}

TEST(CliCommands, SolveIsDeterministic) {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  RunConfig c = lorenz_config(a);
  c.max_iters = 25;
  c.noise_std = 0.5;
  ASSERT_EQ(run("solve", c), 0);
  c.output_dir = b.string();
  c.threads = 3;
  ASSERT_EQ(run("solve", c), 0);
  EXPECT_EQ(slurp(a / "history.csv"), slurp(b / "history.csv"));
  EXPECT_EQ(slurp(a / "recovered_trajectory.csv"), slurp(b / "recovered_trajectory.csv"));
}

TEST(CliCommands, ReadingBackGeneratedObservationsGivesSameRun) {
  const fs::path gen = fresh_dir("rt_gen"), direct = fresh_dir("rt_direct"), reread = fresh_dir("rt_reread");
  RunConfig c = lorenz_config(gen);
  c.noise_std = 0.3;
  ASSERT_EQ(run("generate-obs", c), 0);

  c.max_iters = 15;
  c.output_dir = direct.string();
  ASSERT_EQ(run("solve", c), 0);

  c.output_dir = reread.string();
  c.observations = (gen / "observations.csv").string();
  c.truth = (gen / "truth_trajectory.csv").string();
  ASSERT_EQ(run("solve", c), 0);
  EXPECT_EQ(slurp(direct / "history.csv"), slurp(reread / "history.csv"));
}

TEST(CliCommands, BaselineSolversWriteHistory) {
  for (const char* solver : {"gd", "cg-fr", "cg-pr"}) {
    const fs::path out = fresh_dir(std::string("baseline_") + solver);
    RunConfig c = lorenz_config(out);
    c.solver = solver;
    c.max_iters = 10;
    ASSERT_EQ(run("solve", c), 0) << solver;
    EXPECT_EQ(line_count(out / "history.csv"), 12u) << solver;
    EXPECT_NE(slurp(out / "meta.txt").find("final_u0 = "), std::string::npos);
  }
}

TEST(CliCommands, CheckAdjointPassesAndDetectsCorruption) {
  const fs::path out = fresh_dir("adjoint");
  for (const char* model : {"lorenz", "burgers-fd", "burgers-fem", "burgers-spectral"}) {
    RunConfig c;
    c.model = model;
    c.output_dir = out.string();
    c.trials = 10;
    std::string log;
    EXPECT_EQ(run("check-adjoint", c, &log), 0) << model << "\n" << log;
    c.corrupt_adjoint = true;
    EXPECT_EQ(run("check-adjoint", c), 5) << model;
  }
  RunConfig v;
  v.model = "vorticity2d";
  v.m = 11;
  v.trials = 5;
  v.output_dir = out.string();
  EXPECT_EQ(run("check-adjoint", v), 0);
}

TEST(CliCommands, LandscapeWritesGrid) {
  const fs::path out = fresh_dir("landscape");
  RunConfig c = lorenz_config(out);
  c.resolution = 4;
  ASSERT_EQ(run("landscape", c), 0);
  EXPECT_EQ(line_count(out / "landscape.csv"), 65u);

  c.model = "burgers-fd";
  EXPECT_EQ(run("landscape", c), 2);
}

TEST(CliCommands, ExitCodesForFailures) {
  const fs::path out = fresh_dir("codes");
  RunConfig c = lorenz_config(out);
  EXPECT_EQ(run("frobnicate", c), 2);

  c.observations = (out / "missing.csv").string();
  EXPECT_EQ(run("solve", c), 4);

  // Observations with the wrong record count are a configuration mismatch.
  io::write_states(out / "short.csv", {StateVector{1, 2, 3}});
  c.observations = (out / "short.csv").string();
  EXPECT_EQ(run("solve", c), 2);

  // A file in place of the output directory cannot be written to.
  RunConfig blocked = lorenz_config(out / "short.csv");
  blocked.max_iters = 0;
  EXPECT_EQ(run("solve", blocked), 4);
}

TEST(CliBinary, ExitCodesAndConfigFile) {
  const fs::path out = fresh_dir("binary");
  const std::string dir = " --output_dir " + out.string();
  EXPECT_EQ(run_binary("solve --model lorenz --max_iters 2" + dir), 0);
  EXPECT_EQ(line_count(out / "history.csv"), 4u);
  EXPECT_EQ(run_binary("solve --model nonsense" + dir), 2);
  EXPECT_EQ(run_binary("solve" + dir), 2);
  EXPECT_EQ(run_binary("--model lorenz" + dir), 2);
  EXPECT_EQ(run_binary("check-adjoint --model lorenz --trials 5 --corrupt_adjoint true" + dir), 5);
  EXPECT_EQ(run_binary("solve --model lorenz --observations " + (out / "nope.csv").string() + dir), 4);

  const fs::path good = out / "good.ini";
  std::ofstream(good) << "model = burgers-fd\nmax_iters = 3\nnoise_std = 0.2\noutput_dir = " << out.string() << "\n";
  EXPECT_EQ(run_binary("solve --config " + good.string()), 0);
  EXPECT_EQ(line_count(out / "history.csv"), 5u);

  const fs::path bad = out / "bad.ini";
  std::ofstream(bad) << "model = lorenz\nlearning_rate = 3\n";
  EXPECT_EQ(run_binary("solve --config " + bad.string() + dir), 2);
}
