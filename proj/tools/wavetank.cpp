// Command-line front end: run / check / selftest / resume.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wavetank/config.hpp"
#include "wavetank/evolution.hpp"
#include "wavetank/selftest.hpp"

namespace {

using namespace wavetank;

void write_trajectory_header(std::ostream& out, int j_max) {
  out << "# time e0 e1";
  for (int j = 2; j <= j_max; ++j) out << " e" << j;
  out << " total chord_arc depth min_gap residual mu_abs\n";
}

void write_trajectory_row(std::ostream& out, const TrajectoryRecord& rec) {
  out << std::setprecision(17) << rec.time << " " << rec.energy.e0 << " " << rec.energy.e1;
  for (Real e : rec.energy.ej) out << " " << e;
  out << " " << rec.energy.total << " " << rec.chord_arc << " " << rec.depth << " " << rec.min_gap << " "
      << rec.residual << " " << rec.mu_abs << "\n";
}

struct RunOverrides {
  std::string out_dir;
  std::string mode;
  std::string damping;
};

void apply_overrides(RunConfig& cfg, const RunOverrides& ov) {
  if (!ov.out_dir.empty()) cfg.output.directory = ov.out_dir;
  if (ov.mode == "full") cfg.numerics.solver_mode = SolverMode::kFull;
  else if (ov.mode == "model") cfg.numerics.solver_mode = SolverMode::kModelProblem;
  else if (!ov.mode.empty()) throw ConfigError("--mode must be full or model");
  if (ov.damping == "on") cfg.damping.enabled = true;
  else if (ov.damping == "off") cfg.damping.enabled = false;
  else if (!ov.damping.empty()) throw ConfigError("--damping must be on or off");
}

int execute(const RunConfig& cfg, const FullState& initial) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output.directory);
  {
    std::ofstream manifest(fs::path(cfg.output.directory) / "manifest.txt");
    manifest << emit_manifest(cfg);
  }
  Problem problem = build_problem(cfg);

  std::ofstream traj_file(fs::path(cfg.output.directory) / "trajectory.txt");
  write_trajectory_header(traj_file, cfg.numerics.energy_jmax);
  NumericsConfig numerics = cfg.numerics;
  numerics.record_every = cfg.output.cadence;
  RunObserver observer = [&](const FullState& state, const TrajectoryRecord& rec, std::size_t step) {
    write_trajectory_row(traj_file, rec);
    std::ostringstream name;
    name << "checkpoint_" << std::setw(6) << std::setfill('0') << step << ".txt";
    write_checkpoint(state, (fs::path(cfg.output.directory) / name.str()).string());
  };

  Trajectory traj = run(initial, problem, numerics, observer);
  write_checkpoint(traj.final_state, (fs::path(cfg.output.directory) / "checkpoint_final.txt").string());
  {
    std::ofstream term(fs::path(cfg.output.directory) / "termination.txt");
    term << traj.termination << "\n";
  }
  std::cout << "steps: " << traj.steps << "\n";
  std::cout << "termination: " << traj.termination << "\n";
  if (traj.termination != "t_end") return 2;
  return 0;
}

FullState initial_from_config(const RunConfig& cfg) {
  FullState state = build_initial_data(cfg);
  if (cfg.initial.solve_densities) {
    Problem problem = build_problem(cfg);
    solve_initial_densities(state, problem);
  }
  return state;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavetank: spectral boundary-integral solver for periodic gravity-capillary waves"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_path;
  RunOverrides overrides;
  std::vector<std::string> suites;

  CLI::App* cmd_run = app.add_subcommand("run", "integrate a configuration and emit trajectory + diagnostics");
  cmd_run->add_option("--config", config_path, "configuration file")->required();
  cmd_run->add_option("--out", overrides.out_dir, "output directory override");
  cmd_run->add_option("--mode", overrides.mode, "solver mode override: full | model");
  cmd_run->add_option("--damping", overrides.damping, "damping override: on | off");

  CLI::App* cmd_check = app.add_subcommand("check", "parse and validate a configuration");
  cmd_check->add_option("--config", config_path, "configuration file")->required();

  CLI::App* cmd_selftest = app.add_subcommand("selftest", "run the verification suites");
  cmd_selftest->add_option("suites", suites, "subset of suites to run (default: all)");

  CLI::App* cmd_resume = app.add_subcommand("resume", "continue a run from a checkpoint");
  cmd_resume->add_option("--config", config_path, "configuration file")->required();
  cmd_resume->add_option("--checkpoint", checkpoint_path, "checkpoint to resume from")->required();
  cmd_resume->add_option("--out", overrides.out_dir, "output directory override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      RunConfig cfg = wavetank::parse_config_file(config_path);
      apply_overrides(cfg, overrides);
      return execute(cfg, initial_from_config(cfg));
    }
    if (cmd_check->parsed()) {
      RunConfig cfg = wavetank::parse_config_file(config_path);
      std::cout << wavetank::emit_manifest(cfg);
      std::cout << "ok\n";
      return 0;
    }
    if (cmd_selftest->parsed()) {
      std::vector<wavetank::SelfTestResult> results = wavetank::run_selftests(suites);
      int failures = 0;
      for (const wavetank::SelfTestResult& r : results) {
        std::printf("%s %-18s %6.1fs  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                    r.detail.c_str());
        if (!r.pass) ++failures;
      }
      std::printf("%zu/%zu suites passed\n", results.size() - failures, results.size());
      return failures == 0 ? 0 : 1;
    }
    if (cmd_resume->parsed()) {
      RunConfig cfg = wavetank::parse_config_file(config_path);
      apply_overrides(cfg, overrides);
      wavetank::FullState state = wavetank::read_checkpoint(checkpoint_path);
      if (state.n() != cfg.numerics.n) throw wavetank::ConfigError("checkpoint grid size does not match config");
      return execute(cfg, state);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
