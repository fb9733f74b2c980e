// The energy functional of the evolving state and trajectory-level
// diagnostics derived from it.
#pragma once

#include <cmath>
#include <vector>
#include "wavetank/common.hpp"
#include "wavetank/geometry.hpp"
#include "wavetank/spectral.hpp"
#include "wavetank/velocity.hpp"

namespace wavetank {

struct EnergyBreakdown {
  Real e0 = 0.0;
  Real e1 = 0.0;
  std::vector<Real> ej;  // j = 2 .. j_max
  Real total = 0.0;
};

// E = E0 + E1 + sum_j Ej with
//   E0 = (1/2)(||theta||^2 + ||gamma||^2 + ||omega||^2 + ||beta||^2),
//   E1 = (1/2)(||omega_a||^2 + ||beta_a||^2),
//   Ej = (1/2) int (d^{j-1}theta)^2
//        + (1/(4 tau s_a)) (d^{j-2}gamma) |D| (d^{j-2}gamma)
//        + (gamma^2/(16 tau^2 s_a^2)) (d^{j-2}gamma)^2 dalpha.
// Every term is a square or a positive-multiplier quadratic form, so each
// component is nonnegative whenever tau > 0.
inline EnergyBreakdown energy(const FullState& state, const PhysicsParams& params, int j_max = 3) {
  if (!(params.surface_tension > 0.0)) throw ConfigError("energy requires tau > 0");
  const Real tau = params.surface_tension;
  const Real sa = state.surface.s_alpha();

  EnergyBreakdown out;
  auto sq = [](Real x) { return x * x; };
  out.e0 = 0.5 * (sq(l2_norm(state.surface.theta)) + sq(l2_norm(state.gamma)) +
                  (state.omega.empty() ? 0.0 : sq(l2_norm(state.omega))));
  for (const RealGrid& beta : state.betas) out.e0 += 0.5 * sq(l2_norm(beta));

  out.e1 = state.omega.empty() ? 0.0 : 0.5 * sq(l2_norm(deriv(state.omega)));
  for (const RealGrid& beta : state.betas) out.e1 += 0.5 * sq(l2_norm(deriv(beta)));

  RealGrid dtheta = state.surface.theta;
  RealGrid dgamma = state.gamma;
  for (int j = 2; j <= j_max; ++j) {
    dtheta = deriv(dtheta);  // after loop iteration j: d^{j-1} theta
    if (j > 2) dgamma = deriv(dgamma);
    RealGrid lam = lambda_op(dgamma);
    Real quad = 0.0, lam_term = 0.0, quart = 0.0;
    const std::size_t n = state.n();
    for (std::size_t m = 0; m < n; ++m) {
      quad += dtheta[m] * dtheta[m];
      lam_term += dgamma[m] * lam[m];
      quart += state.gamma[m] * state.gamma[m] * dgamma[m] * dgamma[m];
    }
    const Real w = kTwoPi / static_cast<Real>(n);
    out.ej.push_back(0.5 * w *
                     (quad + lam_term / (4.0 * tau * sa) + quart / (16.0 * tau * tau * sa * sa)));
  }

  out.total = out.e0 + out.e1;
  for (Real e : out.ej) out.total += e;
  return out;
}

// d(E)/dt along a recorded trajectory, compared against the polynomial
// majorant E + E^N + chi (1+|V0|) (sqrt(E) + E^M): the fitted constant is the
// smallest c making every finite-difference slope <= c * majorant. Monitoring
// only; the analysis constants are not quantitative.
struct EnergyRateReport {
  Real fitted_constant = 0.0;
  std::vector<Real> rates;
  std::vector<Real> majorants;
};

inline Real energy_majorant(Real e, Real chi, Real v0, Real exp_n = 11.0, Real exp_m = 11.0) {
  return e + std::pow(e, exp_n) + chi * (1.0 + std::abs(v0)) * (std::sqrt(e) + std::pow(e, exp_m));
}

inline EnergyRateReport energy_rate_probe(const std::vector<Real>& times, const std::vector<Real>& energies,
                                          Real chi, Real v0, Real exp_n = 11.0, Real exp_m = 11.0) {
  if (times.size() < 3 || times.size() != energies.size()) {
    throw ConfigError("energy rate probe needs >= 3 records");
  }
  EnergyRateReport out;
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const Real rate = (energies[i + 1] - energies[i - 1]) / (times[i + 1] - times[i - 1]);
    const Real maj = energy_majorant(energies[i], chi, v0, exp_n, exp_m);
    out.rates.push_back(rate);
    out.majorants.push_back(maj);
    if (maj > 0.0) out.fitted_constant = std::max(out.fitted_constant, rate / maj);
  }
  return out;
}

}  // namespace wavetank
