// Drives the built command-line binary end to end; its path is baked in at
// configure time.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include "doctest.h"

namespace {

namespace fs = std::filesystem;

const char* kBinary = WAVETANK_BIN;

int run_cmd(const std::string& args, std::string* output = nullptr) {
  const std::string redirect = " > cli_out.txt 2>&1";
  const int rc = std::system((std::string(kBinary) + " " + args + redirect).c_str());
  if (output) {
    std::ifstream in("cli_out.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    *output = ss.str();
  }
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_config(const fs::path& path, const std::string& extra) {
  std::ofstream out(path);
  out << "[physics]\n"
         "gravity = 1.0\n"
         "surface_tension = 0.25\n"
         "\n[numerics]\n"
         "n = 32\n"
         "dt = 0.01\n"
         "chord_arc_floor = 0.05\n"
         "\n[initial]\n"
         "type = cosine\n"
         "amplitude = 0.02\n"
         "wavenumber = 1\n"
      << extra;
}

}  // namespace

TEST_CASE("check validates a config and echoes the manifest") {
  write_config("cli_check.cfg", "\n[numerics]\nt_end = 0.1\n");
  std::string out;
  CHECK(run_cmd("check --config cli_check.cfg", &out) == 0);
  CHECK(out.find("[physics]") != std::string::npos);
  CHECK(out.find("surface_tension = 0.25") != std::string::npos);
  CHECK(out.find("ok") != std::string::npos);

  std::ofstream bad("cli_bad.cfg");
  bad << "[physics]\nsurface_tension = 0\n";
  bad.close();
  std::string err;
  CHECK(run_cmd("check --config cli_bad.cfg", &err) != 0);
  CHECK(err.find("surface_tension") != std::string::npos);
}

TEST_CASE("run emits manifest, trajectory, checkpoints and is deterministic") {
  write_config("cli_run.cfg", "\n[numerics]\nt_end = 0.1\n\n[output]\ndirectory = cli_out_a\ncadence = 5\n");
  std::string out;
  REQUIRE(run_cmd("run --config cli_run.cfg", &out) == 0);
  CHECK(out.find("termination: t_end") != std::string::npos);
  CHECK(fs::exists("cli_out_a/manifest.txt"));
  CHECK(fs::exists("cli_out_a/trajectory.txt"));
  CHECK(fs::exists("cli_out_a/checkpoint_final.txt"));
  CHECK(fs::exists("cli_out_a/checkpoint_000010.txt"));

  // trajectory rows: header plus t=0, step 5, step 10
  {
    std::ifstream traj("cli_out_a/trajectory.txt");
    std::string line;
    int rows = 0, cols = 0;
    while (std::getline(traj, line)) {
      if (line.empty() || line[0] == '#') continue;
      ++rows;
      std::istringstream ss(line);
      std::string tok;
      cols = 0;
      while (ss >> tok) ++cols;
    }
    CHECK(rows == 3);
    CHECK(cols == 11);  // time e0 e1 e2 e3 total chord_arc depth min_gap residual mu_abs
  }

  REQUIRE(run_cmd("run --config cli_run.cfg --out cli_out_b") == 0);
  CHECK(slurp("cli_out_a/trajectory.txt") == slurp("cli_out_b/trajectory.txt"));
  CHECK(slurp("cli_out_a/checkpoint_final.txt") == slurp("cli_out_b/checkpoint_final.txt"));
}

TEST_CASE("t_end = 0 emits only the initial record") {
  write_config("cli_t0.cfg", "\n[numerics]\nt_end = 0\n\n[output]\ndirectory = cli_out_t0\n");
  REQUIRE(run_cmd("run --config cli_t0.cfg") == 0);
  std::ifstream traj("cli_out_t0/trajectory.txt");
  std::string line;
  int rows = 0;
  while (std::getline(traj, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  CHECK(rows == 1);
}

TEST_CASE("resume from a mid-run checkpoint reproduces the uninterrupted run bitwise") {
  write_config("cli_full.cfg", "\n[numerics]\nt_end = 0.2\n\n[output]\ndirectory = cli_full_out\ncadence = 10\n");
  REQUIRE(run_cmd("run --config cli_full.cfg") == 0);
  REQUIRE(fs::exists("cli_full_out/checkpoint_000010.txt"));

  REQUIRE(run_cmd("resume --config cli_full.cfg --checkpoint cli_full_out/checkpoint_000010.txt "
                  "--out cli_resume_out") == 0);
  CHECK(slurp("cli_resume_out/checkpoint_final.txt") == slurp("cli_full_out/checkpoint_final.txt"));
}

TEST_CASE("model-mode override is reflected in the manifest") {
  write_config("cli_mode.cfg", "\n[numerics]\nt_end = 0.02\n\n[output]\ndirectory = cli_mode_out\n");
  REQUIRE(run_cmd("run --config cli_mode.cfg --mode model") == 0);
  CHECK(slurp("cli_mode_out/manifest.txt").find("solver_mode = model") != std::string::npos);
}

TEST_CASE("selftest subcommand runs a named fast suite") {
  std::string out;
  CHECK(run_cmd("selftest mollifier", &out) == 0);
  CHECK(out.find("PASS mollifier") != std::string::npos);
  CHECK(run_cmd("selftest no_such_suite", &out) != 0);
}

TEST_CASE("a gate violation exits with status 2 and a machine-readable reason") {
  // an energy ceiling below the initial wave energy trips on the first step
  write_config("cli_gate.cfg",
               "\n[numerics]\nt_end = 1.0\nenergy_ceiling = 1e-12\n\n[output]\ndirectory = cli_gate_out\n");
  std::string out;
  CHECK(run_cmd("run --config cli_gate.cfg", &out) == 1);  // initial state already inadmissible
  CHECK(out.find("energy") != std::string::npos);

  // admissible at t = 0, tripped mid-run: a current dragging still water past
  // an obstacle collapses the clearance in O(1) time; exit 2 with the reason
  write_config("cli_gate2.cfg",
               "\n[physics]\nbackground_current = 0.9\n\n[numerics]\nt_end = 4.0\n"
               "\n[geometry]\nobstacle = circle\nobstacle_y = -0.55\nobstacle_radius = 0.2\n"
               "\n[initial]\ntype = rest\nsolve_densities = true\n"
               "\n[output]\ndirectory = cli_gate2_out\n");
  CHECK(run_cmd("run --config cli_gate2.cfg", &out) == 2);
  CHECK(out.find("termination:") != std::string::npos);
  // the collapse trips the energy ceiling or the clearance gate, whichever
  // crosses first at this resolution; both name the violated gate
  CHECK(slurp("cli_gate2_out/termination.txt").find("admissibility gate violated") != std::string::npos);
}
