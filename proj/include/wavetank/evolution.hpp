// Explicit time integration of the full state: CFL control, the classical
// 4-stage scheme, admissibility gates, spectrum filtering, periodicity
// maintenance and trajectory recording. Checkpoint text format lives here too.
#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>
#include "wavetank/common.hpp"
#include "wavetank/diagnostics.hpp"
#include "wavetank/fredholm.hpp"
#include "wavetank/geometry.hpp"
#include "wavetank/spectral.hpp"

namespace wavetank {

struct NumericsConfig {
  std::size_t n = 128;
  Real dt = 0.0;  // fixed step when > 0, otherwise cfl_factor drives it
  Real cfl_factor = 0.5;
  Real t_end = 1.0;
  Real filter_threshold = 1e-13;
  Real mollifier_delta = 0.0;
  SolverMode solver_mode = SolverMode::kFull;
  Real chord_arc_floor = 0.05;
  Real energy_ceiling = 1e3;
  std::size_t record_every = 10;
  bool apply_mu = true;
  int energy_jmax = 3;

  SolveOptions solve_options() const {
    SolveOptions o;
    o.mode = solver_mode;
    o.mollifier_delta = mollifier_delta;
    o.chord_arc_floor = chord_arc_floor;
    o.apply_mu = apply_mu;
    return o;
  }
};

// Step bound from the third-order dispersive stiffness of the capillary
// term, capped by gravity-wave and advective bounds.
inline Real cfl_dt(const FullState& state, const PhysicsParams& params, const NumericsConfig& config) {
  const Real sa = state.surface.s_alpha();
  const Real dal = kTwoPi / static_cast<Real>(state.n());
  const Real h = sa * dal;
  Real dt = config.cfl_factor * std::pow(h, 1.5) / std::sqrt(kPi * params.surface_tension);
  if (params.gravity > 0.0) dt = std::min(dt, config.cfl_factor * std::sqrt(h / params.gravity));
  const Real v0 = std::abs(params.background_current);
  if (v0 > 0.0) dt = std::min(dt, config.cfl_factor * h / v0);
  return dt;
}

struct TrajectoryRecord {
  Real time = 0.0;
  EnergyBreakdown energy;
  Real chord_arc = 0.0;
  Real depth = 0.0;
  Real min_gap = 0.0;
  Real residual = 0.0;
  Real condition = 0.0;
  Real mu_abs = 0.0;
  Real defect = 0.0;  // |zeta(2 pi) - zeta(0) - 2 pi|
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  FullState final_state;
  std::string termination;  // "t_end" or the violated gate
  std::size_t steps = 0;
};

// Gate order: clearance, chord-arc, energy (cheapest first). Returns the name
// of the violated gate, empty if admissible.
inline std::string admissibility_violation(const FullState& state, const Problem& problem,
                                           const NumericsConfig& config) {
  ComplexGrid zeta = reconstruct_curve(state.surface);
  Clearances c = clearances(zeta, problem.solids);
  if (!problem.solids.empty() && !(c.depth > 0.0 && c.min_gap() > 0.0)) return "clearance";
  if (!(chord_arc_constant(zeta) >= config.chord_arc_floor)) return "chord-arc";
  if (!(energy(state, problem.params, config.energy_jmax).total < config.energy_ceiling)) return "energy";
  return {};
}

namespace detail {

inline FullState advance(const FullState& s, const StateRates& r, Real dt) {
  FullState out = s;
  for (std::size_t m = 0; m < s.n(); ++m) {
    out.surface.theta[m] += dt * r.theta_t[m];
    out.gamma[m] += dt * r.gamma_t[m];
  }
  for (std::size_t m = 0; m < s.omega.size(); ++m) out.omega[m] += dt * r.omega_t[m];
  for (std::size_t b = 0; b < s.betas.size(); ++b) {
    for (std::size_t m = 0; m < s.betas[b].size(); ++m) out.betas[b][m] += dt * r.beta_t[b][m];
  }
  out.surface.length += dt * r.length_t;
  out.surface.base += dt * r.base_t;
  out.surface.time += dt;
  return out;
}

inline void accumulate(StateRates& acc, const StateRates& r, Real w) {
  for (std::size_t m = 0; m < acc.theta_t.size(); ++m) {
    acc.theta_t[m] += w * r.theta_t[m];
    acc.gamma_t[m] += w * r.gamma_t[m];
  }
  for (std::size_t m = 0; m < acc.omega_t.size(); ++m) acc.omega_t[m] += w * r.omega_t[m];
  for (std::size_t b = 0; b < acc.beta_t.size(); ++b) {
    for (std::size_t m = 0; m < acc.beta_t[b].size(); ++m) acc.beta_t[b][m] += w * r.beta_t[b][m];
  }
  acc.length_t += w * r.length_t;
  acc.base_t += w * r.base_t;
  acc.residual = std::max(acc.residual, r.residual);
  acc.condition = std::max(acc.condition, r.condition);
  if (std::abs(r.mu) > std::abs(acc.mu)) acc.mu = r.mu;
}

}  // namespace detail

// One classical 4-stage step. The periodicity correction acts inside each
// stage rate; the spectrum filter is applied once per full step (per-stage
// filtering degrades the order-4 convergence).
inline FullState step(const FullState& state, Real dt, const Problem& problem, const NumericsConfig& config,
                      StateRates* diagnostics = nullptr) {
  const std::string gate = admissibility_violation(state, problem, config);
  if (!gate.empty()) throw SimulationError("admissibility gate violated: " + gate);

  const SolveOptions opts = config.solve_options();
  StateRates k1 = solve_step(state, problem, opts);
  StateRates k2 = solve_step(detail::advance(state, k1, 0.5 * dt), problem, opts);
  StateRates k3 = solve_step(detail::advance(state, k2, 0.5 * dt), problem, opts);
  StateRates k4 = solve_step(detail::advance(state, k3, dt), problem, opts);

  StateRates total = k1;
  for (std::size_t m = 0; m < total.theta_t.size(); ++m) {
    total.theta_t[m] /= 6.0;
    total.gamma_t[m] /= 6.0;
  }
  for (std::size_t m = 0; m < total.omega_t.size(); ++m) total.omega_t[m] /= 6.0;
  for (auto& bt : total.beta_t) {
    for (Real& v : bt) v /= 6.0;
  }
  total.length_t /= 6.0;
  total.base_t /= 6.0;
  detail::accumulate(total, k2, 1.0 / 3.0);
  detail::accumulate(total, k3, 1.0 / 3.0);
  detail::accumulate(total, k4, 1.0 / 6.0);

  FullState out = detail::advance(state, total, dt);
  if (config.filter_threshold > 0.0) {
    out.surface.theta = krasny_filter(out.surface.theta, config.filter_threshold);
    out.gamma = krasny_filter(out.gamma, config.filter_threshold);
  }
  if (diagnostics) *diagnostics = total;
  return out;
}

inline TrajectoryRecord make_record(const FullState& state, const Problem& problem, const NumericsConfig& config,
                                    const StateRates* rates) {
  TrajectoryRecord rec;
  rec.time = state.surface.time;
  rec.energy = energy(state, problem.params, config.energy_jmax);
  ComplexGrid zeta = reconstruct_curve(state.surface);
  rec.chord_arc = chord_arc_constant(zeta);
  Clearances c = clearances(zeta, problem.solids);
  rec.depth = c.depth;
  rec.min_gap = c.obstacle_gap.empty() ? std::numeric_limits<Real>::infinity() : c.min_gap();
  rec.defect = periodicity_defect(state.surface);
  if (rates) {
    rec.residual = rates->residual;
    rec.condition = rates->condition;
    rec.mu_abs = std::abs(rates->mu);
  }
  return rec;
}

// Integrates to t_end or the first gate violation; records diagnostics at the
// configured cadence; a violation terminates cleanly with the reason stored.
// The observer, when given, sees every recorded (state, record) pair.
using RunObserver = std::function<void(const FullState&, const TrajectoryRecord&, std::size_t step)>;

inline Trajectory run(const FullState& initial, const Problem& problem, const NumericsConfig& config,
                      const RunObserver& observe = {}) {
  Trajectory traj;
  FullState state = initial;
  {
    const std::string gate = admissibility_violation(state, problem, config);
    if (!gate.empty()) throw SimulationError("initial state inadmissible: " + gate);
  }
  auto emit = [&](const StateRates* rates) {
    traj.records.push_back(make_record(state, problem, config, rates));
    if (observe) observe(state, traj.records.back(), traj.steps);
  };
  emit(nullptr);

  StateRates diag;
  while (state.surface.time < config.t_end - 1e-14) {
    Real dt = (config.dt > 0.0) ? config.dt : cfl_dt(state, problem.params, config);
    dt = std::min(dt, config.t_end - state.surface.time);
    try {
      state = step(state, dt, problem, config, &diag);
    } catch (const SimulationError& e) {
      traj.termination = e.what();
      traj.final_state = state;
      if (traj.records.back().time < state.surface.time) emit(&diag);
      return traj;
    }
    ++traj.steps;
    if (config.record_every > 0 && traj.steps % config.record_every == 0) emit(&diag);
  }
  if (config.record_every == 0 || traj.steps % config.record_every != 0) emit(&diag);
  traj.termination = "t_end";
  traj.final_state = state;
  return traj;
}

// --- checkpoint text format ----------------------------------------------------
//
//   wavetank-checkpoint v1
//   n <N> obstacles <count> time <t> length <L> base <re> <im>
//   theta gamma omega beta... (one row per node, 17 significant digits)
//
// Round trip is bit exact for finite doubles.

inline void write_checkpoint(const FullState& state, std::ostream& out) {
  out << "wavetank-checkpoint v1\n";
  out << std::setprecision(17);
  out << "n " << state.n() << " obstacles " << state.betas.size() << " time " << state.surface.time
      << " length " << state.surface.length << " base " << state.surface.base.real() << " "
      << state.surface.base.imag() << "\n";
  for (std::size_t m = 0; m < state.n(); ++m) {
    out << state.surface.theta[m] << " " << state.gamma[m] << " "
        << (m < state.omega.size() ? state.omega[m] : 0.0);
    for (const RealGrid& beta : state.betas) out << " " << beta[m];
    out << "\n";
  }
}

inline void write_checkpoint(const FullState& state, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write checkpoint " + path);
  write_checkpoint(state, f);
}

inline FullState read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "wavetank-checkpoint v1") {
    throw ConfigError("not a wavetank checkpoint (bad header)");
  }
  std::string tag;
  std::size_t n = 0, obstacles = 0;
  Real time = 0.0, length = 0.0, re = 0.0, im = 0.0;
  in >> tag >> n;
  if (tag != "n") throw ConfigError("checkpoint: expected grid size");
  in >> tag >> obstacles >> tag >> time >> tag >> length >> tag >> re >> im;
  if (!in) throw ConfigError("checkpoint: malformed scalar header");
  FullState state;
  state.surface.theta.resize(n);
  state.surface.length = length;
  state.surface.base = Complex(re, im);
  state.surface.time = time;
  state.gamma.resize(n);
  state.omega.resize(n);
  state.betas.assign(obstacles, RealGrid(n));
  for (std::size_t m = 0; m < n; ++m) {
    in >> state.surface.theta[m] >> state.gamma[m] >> state.omega[m];
    for (std::size_t b = 0; b < obstacles; ++b) in >> state.betas[b][m];
  }
  if (!in) throw ConfigError("checkpoint: truncated node rows");
  return state;
}

inline FullState read_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read checkpoint " + path);
  return read_checkpoint(f);
}

}  // namespace wavetank
