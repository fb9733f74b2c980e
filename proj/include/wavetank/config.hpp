// Run configuration: strict sectioned key = value parsing, initial-data
// builders, solid-boundary construction and the effective-parameter manifest.
#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>
#include "wavetank/common.hpp"
#include "wavetank/damping.hpp"
#include "wavetank/evolution.hpp"
#include "wavetank/fft.hpp"
#include "wavetank/fredholm.hpp"
#include "wavetank/geometry.hpp"

namespace wavetank {

struct GeometryConfig {
  std::string bottom = "flat";  // flat | fourier | file | none
  Real depth = 1.0;
  std::vector<Real> bottom_amplitudes;
  std::string bottom_file;
  std::string obstacle = "none";  // none | circle | file
  Real obstacle_x = kPi;
  Real obstacle_y = -0.5;
  Real obstacle_radius = 0.2;
  std::string obstacle_file;
};

struct InitialConfig {
  std::string type = "rest";  // rest | cosine | file
  Real amplitude = 0.0;
  int wavenumber = 1;
  bool solve_densities = false;  // static no-penetration solve at t = 0
  std::string file;
};

struct OutputConfig {
  std::string directory = "out";
  std::size_t cadence = 10;
};

struct RunConfig {
  PhysicsParams physics;
  NumericsConfig numerics;
  DampingConfig damping;
  GeometryConfig geometry;
  InitialConfig initial;
  OutputConfig output;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline Real parse_real(const std::string& v, int line) {
  std::size_t used = 0;
  Real out;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("line " + std::to_string(line) + ": trailing junk in number '" + v + "'");
  return out;
}

inline std::size_t parse_size(const std::string& v, int line) {
  const Real r = parse_real(v, line);
  if (r < 0.0 || r != std::floor(r)) {
    throw ConfigError("line " + std::to_string(line) + ": expected a nonnegative integer, got '" + v + "'");
  }
  return static_cast<std::size_t>(r);
}

inline bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ConfigError("line " + std::to_string(line) + ": expected a boolean, got '" + v + "'");
}

inline std::vector<Real> parse_list(const std::string& v, int line) {
  std::vector<Real> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(parse_real(tok, line));
  return out;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = detail::trim(line);
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = detail::trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = s.substr(1, s.size() - 2);
      if (section != "physics" && section != "numerics" && section != "geometry" && section != "initial" &&
          section != "damping" && section != "output") {
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");

    auto unknown = [&]() {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "' in [" + section + "]");
    };
    if (section == "physics") {
      if (key == "gravity") cfg.physics.gravity = detail::parse_real(value, lineno);
      else if (key == "surface_tension") cfg.physics.surface_tension = detail::parse_real(value, lineno);
      else if (key == "background_current") cfg.physics.background_current = detail::parse_real(value, lineno);
      else if (key == "circulation") cfg.physics.circulation = detail::parse_real(value, lineno);
      else unknown();
    } else if (section == "numerics") {
      if (key == "n") cfg.numerics.n = detail::parse_size(value, lineno);
      else if (key == "dt") cfg.numerics.dt = detail::parse_real(value, lineno);
      else if (key == "cfl_factor") cfg.numerics.cfl_factor = detail::parse_real(value, lineno);
      else if (key == "t_end") cfg.numerics.t_end = detail::parse_real(value, lineno);
      else if (key == "filter_threshold") cfg.numerics.filter_threshold = detail::parse_real(value, lineno);
      else if (key == "mollifier_delta") cfg.numerics.mollifier_delta = detail::parse_real(value, lineno);
      else if (key == "solver_mode") {
        if (value == "full") cfg.numerics.solver_mode = SolverMode::kFull;
        else if (value == "model") cfg.numerics.solver_mode = SolverMode::kModelProblem;
        else throw ConfigError("line " + std::to_string(lineno) + ": solver_mode must be full or model");
      } else if (key == "chord_arc_floor") cfg.numerics.chord_arc_floor = detail::parse_real(value, lineno);
      else if (key == "energy_ceiling") cfg.numerics.energy_ceiling = detail::parse_real(value, lineno);
      else if (key == "record_every") cfg.numerics.record_every = detail::parse_size(value, lineno);
      else if (key == "apply_mu") cfg.numerics.apply_mu = detail::parse_bool(value, lineno);
      else if (key == "energy_jmax") cfg.numerics.energy_jmax = static_cast<int>(detail::parse_size(value, lineno));
      else unknown();
    } else if (section == "geometry") {
      if (key == "bottom") cfg.geometry.bottom = value;
      else if (key == "depth") cfg.geometry.depth = detail::parse_real(value, lineno);
      else if (key == "bottom_amplitudes") cfg.geometry.bottom_amplitudes = detail::parse_list(value, lineno);
      else if (key == "bottom_file") cfg.geometry.bottom_file = value;
      else if (key == "obstacle") cfg.geometry.obstacle = value;
      else if (key == "obstacle_x") cfg.geometry.obstacle_x = detail::parse_real(value, lineno);
      else if (key == "obstacle_y") cfg.geometry.obstacle_y = detail::parse_real(value, lineno);
      else if (key == "obstacle_radius") cfg.geometry.obstacle_radius = detail::parse_real(value, lineno);
      else if (key == "obstacle_file") cfg.geometry.obstacle_file = value;
      else unknown();
    } else if (section == "initial") {
      if (key == "type") cfg.initial.type = value;
      else if (key == "amplitude") cfg.initial.amplitude = detail::parse_real(value, lineno);
      else if (key == "wavenumber") cfg.initial.wavenumber = static_cast<int>(detail::parse_size(value, lineno));
      else if (key == "solve_densities") cfg.initial.solve_densities = detail::parse_bool(value, lineno);
      else if (key == "file") cfg.initial.file = value;
      else unknown();
    } else if (section == "damping") {
      if (key == "enabled") cfg.damping.enabled = detail::parse_bool(value, lineno);
      else if (key == "interval_start") cfg.damping.interval_start = detail::parse_real(value, lineno);
      else if (key == "interval_end") cfg.damping.interval_end = detail::parse_real(value, lineno);
      else if (key == "ramp") cfg.damping.ramp = detail::parse_real(value, lineno);
      else unknown();
    } else if (section == "output") {
      if (key == "directory") cfg.output.directory = value;
      else if (key == "cadence") cfg.output.cadence = detail::parse_size(value, lineno);
      else unknown();
    }
  }

  // semantic validation
  if (!(cfg.physics.surface_tension > 0.0)) {
    throw ConfigError("the formulation requires surface_tension > 0");
  }
  if (cfg.numerics.n < 8 || cfg.numerics.n % 2 != 0) {
    throw ConfigError("numerics.n must be an even integer >= 8");
  }
  if (cfg.physics.background_current != 0.0 && cfg.geometry.obstacle == "none") {
    throw ConfigError("a background current requires an obstacle (the cylinder potential needs z_c inside it)");
  }
  if (cfg.geometry.bottom != "flat" && cfg.geometry.bottom != "fourier" && cfg.geometry.bottom != "file" &&
      cfg.geometry.bottom != "none") {
    throw ConfigError("geometry.bottom must be flat, fourier, file or none");
  }
  if (cfg.geometry.obstacle != "none" && cfg.geometry.obstacle != "circle" && cfg.geometry.obstacle != "file") {
    throw ConfigError("geometry.obstacle must be none, circle or file");
  }
  if (cfg.initial.type != "rest" && cfg.initial.type != "cosine" && cfg.initial.type != "file") {
    throw ConfigError("initial.type must be rest, cosine or file");
  }
  cfg.physics.obstacle_center = Complex(cfg.geometry.obstacle_x, cfg.geometry.obstacle_y);
  return cfg;
}

inline RunConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

// Every effective parameter, defaults included; reparses to an identical
// configuration.
inline std::string emit_manifest(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "[physics]\n";
  out << "gravity = " << c.physics.gravity << "\n";
  out << "surface_tension = " << c.physics.surface_tension << "\n";
  out << "background_current = " << c.physics.background_current << "\n";
  out << "circulation = " << c.physics.circulation << "\n";
  out << "\n[numerics]\n";
  out << "n = " << c.numerics.n << "\n";
  out << "dt = " << c.numerics.dt << "\n";
  out << "cfl_factor = " << c.numerics.cfl_factor << "\n";
  out << "t_end = " << c.numerics.t_end << "\n";
  out << "filter_threshold = " << c.numerics.filter_threshold << "\n";
  out << "mollifier_delta = " << c.numerics.mollifier_delta << "\n";
  out << "solver_mode = " << (c.numerics.solver_mode == SolverMode::kFull ? "full" : "model") << "\n";
  out << "chord_arc_floor = " << c.numerics.chord_arc_floor << "\n";
  out << "energy_ceiling = " << c.numerics.energy_ceiling << "\n";
  out << "record_every = " << c.numerics.record_every << "\n";
  out << "apply_mu = " << (c.numerics.apply_mu ? "true" : "false") << "\n";
  out << "energy_jmax = " << c.numerics.energy_jmax << "\n";
  out << "\n[geometry]\n";
  out << "bottom = " << c.geometry.bottom << "\n";
  out << "depth = " << c.geometry.depth << "\n";
  if (!c.geometry.bottom_amplitudes.empty()) {
    out << "bottom_amplitudes =";
    for (Real a : c.geometry.bottom_amplitudes) out << " " << a;
    out << "\n";
  }
  if (!c.geometry.bottom_file.empty()) out << "bottom_file = " << c.geometry.bottom_file << "\n";
  out << "obstacle = " << c.geometry.obstacle << "\n";
  out << "obstacle_x = " << c.geometry.obstacle_x << "\n";
  out << "obstacle_y = " << c.geometry.obstacle_y << "\n";
  out << "obstacle_radius = " << c.geometry.obstacle_radius << "\n";
  if (!c.geometry.obstacle_file.empty()) out << "obstacle_file = " << c.geometry.obstacle_file << "\n";
  out << "\n[initial]\n";
  out << "type = " << c.initial.type << "\n";
  out << "amplitude = " << c.initial.amplitude << "\n";
  out << "wavenumber = " << c.initial.wavenumber << "\n";
  out << "solve_densities = " << (c.initial.solve_densities ? "true" : "false") << "\n";
  if (!c.initial.file.empty()) out << "file = " << c.initial.file << "\n";
  out << "\n[damping]\n";
  out << "enabled = " << (c.damping.enabled ? "true" : "false") << "\n";
  out << "interval_start = " << c.damping.interval_start << "\n";
  out << "interval_end = " << c.damping.interval_end << "\n";
  out << "ramp = " << c.damping.ramp << "\n";
  out << "\n[output]\n";
  out << "directory = " << c.output.directory << "\n";
  out << "cadence = " << c.output.cadence << "\n";
  return out.str();
}

inline std::vector<SolidBoundary> build_solids(const RunConfig& cfg) {
  std::vector<SolidBoundary> solids;
  const std::size_t n = cfg.numerics.n;
  if (cfg.geometry.bottom == "flat") {
    solids.push_back(flat_bottom(n, cfg.geometry.depth));
  } else if (cfg.geometry.bottom == "fourier") {
    solids.push_back(fourier_bottom(n, cfg.geometry.depth, cfg.geometry.bottom_amplitudes));
  } else if (cfg.geometry.bottom == "file") {
    solids.push_back(read_boundary_table(SolidKind::kBottom, cfg.geometry.bottom_file));
  }
  if (cfg.geometry.obstacle == "circle") {
    solids.push_back(circle_obstacle(n, Complex(cfg.geometry.obstacle_x, cfg.geometry.obstacle_y),
                                     cfg.geometry.obstacle_radius));
  } else if (cfg.geometry.obstacle == "file") {
    solids.push_back(read_boundary_table(SolidKind::kObstacle, cfg.geometry.obstacle_file));
  }
  return solids;
}

inline Problem build_problem(const RunConfig& cfg) {
  return Problem::build(build_solids(cfg), cfg.physics, cfg.damping);
}

// Cosine surface wave of amplitude a and wavenumber k, converted to the
// uniform-arclength frame: x(alpha) solves s(x) = (L / 2 pi) alpha by Newton
// on a spectrally evaluated arclength integral, to 1e-12.
inline FullState build_cosine_wave(std::size_t n, Real amplitude, int wavenumber) {
  FullState out;
  out.surface.theta.assign(n, 0.0);
  out.gamma.assign(n, 0.0);
  out.omega.assign(n, 0.0);
  if (amplitude == 0.0) {
    out.surface.length = kTwoPi;
    out.surface.base = Complex(0.0, 0.0);
    return out;
  }
  const Real a = amplitude;
  const Real k = static_cast<Real>(wavenumber);
  auto slope = [&](Real x) { return -a * k * std::sin(k * x); };
  auto warc = [&](Real x) {
    const Real hp = slope(x);
    return std::sqrt(1.0 + hp * hp);
  };
  // arclength s(x) through the spectrum of w on a fine grid
  const std::size_t fine = 4096;
  RealGrid w(fine);
  const RealGrid xs = grid_nodes(fine);
  for (std::size_t i = 0; i < fine; ++i) w[i] = warc(xs[i]);
  ComplexGrid spec = fft_forward(w);
  const Real wbar = spec[0].real();
  auto arc = [&](Real x) {
    Real s = wbar * x;
    for (std::size_t j = 1; j < fine; ++j) {
      const int kk = bin_wavenumber(j, fine);
      if (kk == 0) continue;
      if (std::abs(spec[j]) < 1e-17) continue;
      const Complex term = spec[j] * (std::exp(Complex(0.0, kk * x)) - 1.0) / Complex(0.0, kk);
      s += term.real();
    }
    return s;
  };
  const Real length = wbar * kTwoPi;
  const Real sa = length / kTwoPi;  // = wbar

  const RealGrid alpha = grid_nodes(n);
  RealGrid x_of_alpha(n, 0.0);
  for (std::size_t m = 1; m <= n / 2; ++m) {
    Real x = alpha[m];
    for (int it = 0; it < 60; ++it) {
      const Real f = arc(x) - sa * alpha[m];
      x -= f / warc(x);
      if (std::abs(f) < 1e-13) break;
    }
    if (std::abs(arc(x) - sa * alpha[m]) > 1e-12) {
      throw ConfigError("cosine initial data: arclength reparameterization did not converge (amplitude too large?)");
    }
    x_of_alpha[m] = x;
    if (m < n / 2) x_of_alpha[n - m] = kTwoPi - x;  // mirror symmetry keeps theta odd
  }
  for (std::size_t m = 0; m < n; ++m) out.surface.theta[m] = std::atan(slope(x_of_alpha[m]));
  // pin the discrete periodicity exactly
  Real csum = 0.0;
  for (Real t : out.surface.theta) csum += std::cos(t);
  out.surface.length = kTwoPi * static_cast<Real>(n) / csum;
  out.surface.base = Complex(0.0, a);
  return out;
}

inline FullState build_initial_data(const RunConfig& cfg) {
  FullState state;
  if (cfg.initial.type == "rest") {
    state.surface.theta.assign(cfg.numerics.n, 0.0);
    state.gamma.assign(cfg.numerics.n, 0.0);
    state.omega.assign(cfg.numerics.n, 0.0);
  } else if (cfg.initial.type == "cosine") {
    state = build_cosine_wave(cfg.numerics.n, cfg.initial.amplitude, cfg.initial.wavenumber);
  } else {
    state = read_checkpoint(cfg.initial.file);
    if (state.n() != cfg.numerics.n) throw ConfigError("initial file grid size does not match numerics.n");
  }
  const bool has_bottom = cfg.geometry.bottom != "none";
  const std::size_t obstacles = cfg.geometry.obstacle == "none" ? 0 : 1;
  if (!has_bottom) state.omega.assign(cfg.numerics.n, 0.0);
  while (state.betas.size() < obstacles) state.betas.push_back(RealGrid(cfg.numerics.n, 0.0));
  return state;
}

}  // namespace wavetank
