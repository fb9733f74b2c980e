// Pneumatic sponge-layer damping applied through an external surface
// pressure: cutoff construction, the surface trace of phi_alpha, the damped
// gamma_t modification and the p_ext diagnostic.
#pragma once

#include <cmath>
#include "wavetank/common.hpp"
#include "wavetank/spectral.hpp"
#include "wavetank/velocity.hpp"

namespace wavetank {

// The damper acts on a sub-interval of [0, 2*pi) in the horizontal coordinate
// xi (not the parameter alpha): the damped region is fixed in space while the
// parametrization moves through it.
struct DampingConfig {
  bool enabled = false;
  Real interval_start = 0.0;  // xi coordinate, may wrap past 2*pi
  Real interval_end = 0.0;
  Real ramp = 0.5;
};

namespace detail {

// C^inf step: 0 for t <= 0, 1 for t >= 1.
inline Real smooth_step(Real t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const Real a = std::exp(-1.0 / t);
  const Real b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

inline Real wrap_two_pi(Real x) {
  Real y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return y;
}

}  // namespace detail

// chi_omega evaluated at one abscissa: 1 on [start, end], smooth ramps of
// width `ramp` outside both endpoints, 0 elsewhere (all on the circle).
inline Real cutoff_value(const DampingConfig& cfg, Real xi) {
  if (!(cfg.ramp > 0.0)) throw ConfigError("damping ramp must be positive");
  const Real start = detail::wrap_two_pi(cfg.interval_start);
  Real span = detail::wrap_two_pi(cfg.interval_end - cfg.interval_start);
  if (span == 0.0 && cfg.interval_end != cfg.interval_start) span = kTwoPi;  // full circle
  const Real x = detail::wrap_two_pi(xi - start);  // position relative to interval start
  if (x <= span) return 1.0;
  // distance past the trailing end vs. distance before the leading start
  const Real after = x - span;
  const Real before = kTwoPi - x;
  const Real d = std::min(after, before);
  return detail::smooth_step(1.0 - d / cfg.ramp);
}

// Samples chi_omega at the current surface abscissae xi(alpha_m).
inline RealGrid build_cutoff(const DampingConfig& cfg, const RealGrid& xi) {
  RealGrid chi(xi.size(), 0.0);
  if (cfg.interval_end == cfg.interval_start) return chi;  // empty interval
  for (std::size_t m = 0; m < xi.size(); ++m) chi[m] = cutoff_value(cfg, xi[m]);
  return chi;
}

inline RealGrid build_cutoff(const DampingConfig& cfg, const ComplexGrid& zeta) {
  RealGrid xi(zeta.size());
  for (std::size_t m = 0; m < zeta.size(); ++m) xi[m] = zeta[m].real();
  return build_cutoff(cfg, xi);
}

// phi_alpha = s_alpha (W . t_hat) + gamma / 2, the parameter derivative of the
// velocity-potential trace along the surface.
inline RealGrid phi_alpha(const FullState& state, const SurfaceVelocity& vel) {
  RealGrid out(state.n());
  for (std::size_t m = 0; m < state.n(); ++m) {
    out[m] = vel.s_alpha * vel.w_dot_t[m] + 0.5 * state.gamma[m];
  }
  return out;
}

// -2 chi_omega phi_alpha: the exact difference between the damped and
// undamped gamma_t right-hand sides.
inline RealGrid damping_term(const FullState& state, const SurfaceVelocity& vel, const RealGrid& chi) {
  RealGrid pa = phi_alpha(state, vel);
  for (std::size_t m = 0; m < pa.size(); ++m) pa[m] *= -2.0 * chi[m];
  return pa;
}

struct PExtDiagnostic {
  RealGrid values;     // mean-zero antiderivative of chi_omega phi_alpha
  Real removed_mean;   // stands in for the ignored Bernoulli constant
};

inline PExtDiagnostic p_ext_diagnostic(const FullState& state, const SurfaceVelocity& vel, const RealGrid& chi) {
  RealGrid forcing = phi_alpha(state, vel);
  for (std::size_t m = 0; m < forcing.size(); ++m) forcing[m] *= chi[m];
  auto anti = antideriv_meanzero_full(forcing);
  return PExtDiagnostic{std::move(anti.value), anti.removed_mean};
}

}  // namespace wavetank
