// Assembly of the full surface velocity W = BR + Y + Z + chi*(a0*grad
// phi_cyl + V0), its tangential/normal projections, the arclength-preserving
// tangential velocity V, and the auxiliary quantities (m, s_alpha_t, mu).
#pragma once

#include <cmath>
#include <vector>
#include "wavetank/common.hpp"
#include "wavetank/geometry.hpp"
#include "wavetank/kernels.hpp"
#include "wavetank/matrix.hpp"
#include "wavetank/spectral.hpp"

namespace wavetank {

struct PhysicsParams {
  Real gravity = 1.0;
  Real surface_tension = 0.1;   // tau; the formulation requires tau > 0
  Real background_current = 0.0;  // V0
  Real circulation = 0.0;         // a0
  Complex obstacle_center = Complex(0.0, 0.0);  // z_c, inside the obstacle

  // The cylinder potential and uniform current switch on only with a current.
  Real chi() const { return background_current != 0.0 ? 1.0 : 0.0; }
};

// Per-stage cotangent tables shared by the velocity, right-hand-side and
// system assemblies. css(m, j) = cot((zeta_m - zeta_j)/2) with zero diagonal;
// csb[i](m, j) = cot((zeta_m - solid_i_zeta_j)/2).
struct KernelTables {
  ComplexMatrix css;
  std::vector<ComplexMatrix> csb;
};

inline KernelTables build_kernel_tables(const ComplexGrid& zeta, const std::vector<SolidBoundary>& solids) {
  KernelTables t;
  const std::size_t n = zeta.size();
  t.css = ComplexMatrix(n, n);
  try {
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t j = m + 1; j < n; ++j) {
        const Complex c = cot_half(zeta[m] - zeta[j]);
        t.css(m, j) = c;
        t.css(j, m) = -c;
      }
    }
  } catch (const SingularEvaluationError& e) {
    throw ChordArcError(std::string("coincident surface nodes (") + e.what() + ")");
  }
  t.csb.reserve(solids.size());
  for (const SolidBoundary& s : solids) {
    ComplexMatrix c(n, s.n());
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t j = 0; j < s.n(); ++j) c(m, j) = cot_half(zeta[m] - s.zeta[j]);
    }
    t.csb.push_back(std::move(c));
  }
  return t;
}

// Complexified vectors are carried in conjugate form q = C(X)^*, the form the
// quadratures produce. Projections against the frame exp(i*theta):
//   X . t_hat = Re{ q * e^{i theta} },  X . n_hat = -Im{ q * e^{i theta} }.
inline RealGrid dot_tangent(const ComplexGrid& q_conj, const ComplexGrid& tang) {
  RealGrid out(q_conj.size());
  for (std::size_t m = 0; m < q_conj.size(); ++m) out[m] = (q_conj[m] * tang[m]).real();
  return out;
}

inline RealGrid dot_normal(const ComplexGrid& q_conj, const ComplexGrid& tang) {
  RealGrid out(q_conj.size());
  for (std::size_t m = 0; m < q_conj.size(); ++m) out[m] = -(q_conj[m] * tang[m]).imag();
  return out;
}

// C(grad phi_cyl)^* = 1/2 - (i/2) cot((z - z_c)/2).
inline Complex cyl_gradient_conj(Complex z, Complex z_c) {
  return 0.5 - Complex(0.0, 0.5) * cot_half(z - z_c);
}

// Second complex derivative of the cylinder potential, for d/dt and d/dalpha
// of grad phi_cyl along the surface.
inline Complex cyl_hessian_conj(Complex z, Complex z_c) {
  return Complex(0.0, 0.25) * csc2_half(z - z_c);
}

inline ComplexGrid cyl_gradient(const ComplexGrid& zeta, const PhysicsParams& params) {
  ComplexGrid q(zeta.size());
  for (std::size_t m = 0; m < zeta.size(); ++m) q[m] = cyl_gradient_conj(zeta[m], params.obstacle_center);
  return q;
}

// Direct Birkhoff-Rott quadrature: alternating-point trapezoid rule (sources
// of parity opposite to the target, doubled weights), spectrally accurate for
// the periodic principal-value cotangent kernel. Returns C(BR)^*.
inline ComplexGrid birkhoff_rott_direct(const RealGrid& gamma, const KernelTables& tables) {
  const std::size_t n = gamma.size();
  ComplexGrid q(n, Complex(0.0, 0.0));
  const Complex scale = (2.0 * kTwoPi / static_cast<Real>(n)) / (4.0 * kPi * Complex(0.0, 1.0));
  for (std::size_t m = 0; m < n; ++m) {
    Complex s(0.0, 0.0);
    for (std::size_t j = (m + 1) % 2; j < n; j += 2) s += gamma[j] * tables.css(m, j);
    q[m] = scale * s;
  }
  return q;
}

// Decomposed Birkhoff-Rott: C(BR)^* = (1/2i) H(gamma / zeta_alpha) + K[zeta]gamma.
// The two pieces are returned as well; the right-hand side reuses them.
inline ComplexGrid birkhoff_rott_decomposed(const RealGrid& gamma, const ComplexGrid& zeta_alpha,
                                            const KOperator& kop, ComplexGrid* h_part = nullptr,
                                            ComplexGrid* k_part = nullptr) {
  const std::size_t n = gamma.size();
  ComplexGrid g(n);
  for (std::size_t m = 0; m < n; ++m) g[m] = gamma[m] / zeta_alpha[m];
  ComplexGrid hg = hilbert(g);
  ComplexGrid kg = kop.apply(gamma);
  ComplexGrid q(n);
  const Complex half_over_i = 1.0 / Complex(0.0, 2.0);
  for (std::size_t m = 0; m < n; ++m) q[m] = half_over_i * hg[m] + kg[m];
  if (h_part) *h_part = std::move(hg);
  if (k_part) *k_part = std::move(kg);
  return q;
}

// Single-layer velocity induced by one solid density at the surface,
// (1/4pi) int dens * s_alpha * cot((zeta - zeta_solid)/2), plain trapezoid.
inline ComplexGrid single_layer_conj(const RealGrid& density, const SolidBoundary& solid,
                                     const ComplexMatrix& cots) {
  const std::size_t n = cots.rows();
  const std::size_t ns = solid.n();
  ComplexGrid q(n, Complex(0.0, 0.0));
  const Real w = 1.0 / (2.0 * static_cast<Real>(ns));  // (1/4pi) * (2pi/ns)
  for (std::size_t m = 0; m < n; ++m) {
    Complex s(0.0, 0.0);
    for (std::size_t j = 0; j < ns; ++j) s += density[j] * solid.s_alpha[j] * cots(m, j);
    q[m] = w * s;
  }
  return q;
}

// (1/4pi) int d/dalpha'(dens * s_alpha / zeta_solid_alpha) cot(...) dalpha'.
// Multiplying by zeta_alpha(m) gives d/dalpha of the single layer; multiplying
// by zeta_t(m) gives the local part of its time derivative.
inline ComplexGrid single_layer_deriv_factor(const RealGrid& density, const SolidBoundary& solid,
                                             const ComplexMatrix& cots) {
  const std::size_t n = cots.rows();
  const std::size_t ns = solid.n();
  ComplexGrid prod(ns);
  for (std::size_t j = 0; j < ns; ++j) prod[j] = density[j] * solid.s_alpha[j] / solid.zeta_alpha[j];
  ComplexGrid dprod = deriv(prod);
  ComplexGrid q(n, Complex(0.0, 0.0));
  const Real w = 1.0 / (2.0 * static_cast<Real>(ns));
  for (std::size_t m = 0; m < n; ++m) {
    Complex s(0.0, 0.0);
    for (std::size_t j = 0; j < ns; ++j) s += dprod[j] * cots(m, j);
    q[m] = w * s;
  }
  return q;
}

// Everything the evolution equations need from one state snapshot. All
// complexified vectors are stored conjugated (the q = C(X)^* convention).
struct SurfaceVelocity {
  ComplexGrid zeta;
  ComplexGrid zeta_alpha;
  ComplexGrid tang;  // exp(i*theta)
  RealGrid theta_alpha;
  Real s_alpha = 1.0;

  ComplexGrid br;        // C(BR)^*
  ComplexGrid y;         // C(Y)^*
  ComplexGrid z;         // C(Z)^*, summed over obstacles
  ComplexGrid w;         // C(W)^*
  ComplexGrid w_tilde;   // C(W - BR)^*

  RealGrid u;            // W . n_hat
  RealGrid w_dot_t;      // W . t_hat
  RealGrid v;            // tangential velocity, mean-zero choice
  RealGrid v_minus_wt;   // V - W . t_hat
  Real s_alpha_t = 0.0;
  ComplexGrid zeta_t;

  ComplexGrid m;              // C(m)^*, smooth remainder of BR_alpha
  ComplexGrid br_alpha;       // C(BR_alpha)^*
  ComplexGrid w_tilde_alpha;  // C(Y_alpha + Z_alpha + chi a0 d/dalpha grad phi_cyl)^*
  RealGrid m_dot_t, m_dot_n;
  RealGrid wt_alpha_dot_t, wt_alpha_dot_n;  // W_tilde_alpha projections
  RealGrid u_alpha;
  RealGrid gamma_alpha;
  RealGrid h_gamma_alpha;     // H(gamma_alpha)
  RealGrid h_gamma_theta_a;   // H(gamma * theta_alpha)
  ComplexGrid h_gamma_over_za;  // H(gamma / zeta_alpha)
  ComplexGrid k_gamma;          // K[zeta] gamma

  // deferred pieces reused by the right-hand side
  ComplexGrid deriv_factor_bottom;           // I with zeta_alpha*I = Y_alpha
  std::vector<ComplexGrid> deriv_factor_obs; // same per obstacle
  ComplexGrid cyl_hessian;                   // f''(zeta), zero when chi = 0
  KOperator kop;
};

// One-stop velocity assembly; `tables` must be built from the same state.
inline SurfaceVelocity assemble_velocity(const FullState& state, const std::vector<SolidBoundary>& solids,
                                         const PhysicsParams& params, const KernelTables& tables) {
  const std::size_t n = state.n();
  SurfaceVelocity vel;
  vel.s_alpha = state.surface.s_alpha();
  vel.zeta = reconstruct_curve(state.surface);
  vel.zeta_alpha = surface_zeta_alpha(state.surface);
  vel.tang = tangent(state.surface.theta);
  vel.theta_alpha = deriv(state.surface.theta);
  vel.kop = KOperator(vel.zeta, vel.zeta_alpha, &tables.css);

  // Birkhoff-Rott through the Hilbert + smoothing decomposition.
  vel.br = birkhoff_rott_decomposed(state.gamma, vel.zeta_alpha, vel.kop, &vel.h_gamma_over_za, &vel.k_gamma);

  // Single layers from the bottom and the obstacles.
  vel.y.assign(n, Complex(0.0, 0.0));
  vel.z.assign(n, Complex(0.0, 0.0));
  std::size_t bottom_index = solids.size();
  for (std::size_t i = 0; i < solids.size(); ++i) {
    if (solids[i].kind == SolidKind::kBottom) {
      bottom_index = i;
      vel.y = single_layer_conj(state.omega, solids[i], tables.csb[i]);
    }
  }
  std::size_t beta_idx = 0;
  for (std::size_t i = 0; i < solids.size(); ++i) {
    if (solids[i].kind != SolidKind::kObstacle) continue;
    ComplexGrid zq = single_layer_conj(state.betas.at(beta_idx), solids[i], tables.csb[i]);
    for (std::size_t m = 0; m < n; ++m) vel.z[m] += zq[m];
    ++beta_idx;
  }

  const Real chi = params.chi();
  vel.cyl_hessian.assign(n, Complex(0.0, 0.0));
  ComplexGrid cyl(n, Complex(0.0, 0.0));
  if (chi != 0.0) {
    for (std::size_t m = 0; m < n; ++m) {
      cyl[m] = cyl_gradient_conj(vel.zeta[m], params.obstacle_center);
      vel.cyl_hessian[m] = cyl_hessian_conj(vel.zeta[m], params.obstacle_center);
    }
  }

  vel.w.resize(n);
  vel.w_tilde.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    vel.w_tilde[m] = vel.y[m] + vel.z[m] + chi * (params.circulation * cyl[m] + params.background_current);
    vel.w[m] = vel.br[m] + vel.w_tilde[m];
  }

  vel.u = dot_normal(vel.w, vel.tang);
  vel.w_dot_t = dot_tangent(vel.w, vel.tang);

  // V keeps s_alpha spatially uniform; mean-zero constant of integration.
  RealGrid theta_a_u(n);
  for (std::size_t m = 0; m < n; ++m) theta_a_u[m] = vel.theta_alpha[m] * vel.u[m];
  vel.s_alpha_t = -mean(theta_a_u);
  vel.v = antideriv_meanzero(theta_a_u);
  vel.v_minus_wt.resize(n);
  for (std::size_t m = 0; m < n; ++m) vel.v_minus_wt[m] = vel.v[m] - vel.w_dot_t[m];

  vel.zeta_t.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    vel.zeta_t[m] = (Complex(0.0, 1.0) * vel.u[m] + vel.v[m]) * vel.tang[m];
  }

  // Smooth remainder m of BR_alpha. With uniform s_alpha,
  // zeta_alphaalpha / zeta_alpha = i theta_alpha.
  vel.gamma_alpha = deriv(state.gamma);
  const RealGrid& gamma_alpha = vel.gamma_alpha;
  ComplexGrid g(n);
  for (std::size_t m = 0; m < n; ++m) {
    g[m] = gamma_alpha[m] - Complex(0.0, state.gamma[m] * vel.theta_alpha[m]);
  }
  ComplexGrid inv_za2(n), g_over_za(n);
  for (std::size_t m = 0; m < n; ++m) {
    inv_za2[m] = 1.0 / (vel.zeta_alpha[m] * vel.zeta_alpha[m]);
    g_over_za[m] = g[m] / vel.zeta_alpha[m];
  }
  ComplexGrid hg = hilbert(ComplexGrid([&] {
    ComplexGrid p(n);
    for (std::size_t m = 0; m < n; ++m) p[m] = inv_za2[m] * g[m];
    return p;
  }()));
  ComplexGrid hg_plain = hilbert(g);
  ComplexGrid kg = vel.kop.apply(g_over_za);
  vel.m.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const Complex comm = hg[m] - inv_za2[m] * hg_plain[m];
    vel.m[m] = vel.zeta_alpha[m] / Complex(0.0, 2.0) * comm + vel.zeta_alpha[m] * kg[m];
  }
  vel.m_dot_t = dot_tangent(vel.m, vel.tang);
  vel.m_dot_n = dot_normal(vel.m, vel.tang);

  // BR_alpha = (1/2 s_alpha) H(gamma_alpha) n_hat - (1/2 s_alpha)
  // H(gamma theta_alpha) t_hat + m, assembled in conjugate form: with
  // C(n_hat) = i e^{i theta}, conj gives -i e^{-i theta} etc.
  vel.h_gamma_alpha = hilbert(gamma_alpha);
  RealGrid gth(n);
  for (std::size_t m = 0; m < n; ++m) gth[m] = state.gamma[m] * vel.theta_alpha[m];
  vel.h_gamma_theta_a = hilbert(gth);
  vel.br_alpha.resize(n);
  const Real inv2sa = 1.0 / (2.0 * vel.s_alpha);
  for (std::size_t m = 0; m < n; ++m) {
    const Complex e_conj = std::conj(vel.tang[m]);
    vel.br_alpha[m] = inv2sa * vel.h_gamma_alpha[m] * (-Complex(0.0, 1.0)) * e_conj -
                      inv2sa * vel.h_gamma_theta_a[m] * e_conj + vel.m[m];
  }

  // W_tilde_alpha: integral forms for Y_alpha/Z_alpha, exact formula for the
  // cylinder part.
  vel.w_tilde_alpha.assign(n, Complex(0.0, 0.0));
  vel.deriv_factor_obs.clear();
  if (bottom_index < solids.size()) {
    vel.deriv_factor_bottom =
        single_layer_deriv_factor(state.omega, solids[bottom_index], tables.csb[bottom_index]);
    for (std::size_t m = 0; m < n; ++m) vel.w_tilde_alpha[m] += vel.zeta_alpha[m] * vel.deriv_factor_bottom[m];
  } else {
    vel.deriv_factor_bottom.assign(n, Complex(0.0, 0.0));
  }
  beta_idx = 0;
  for (std::size_t i = 0; i < solids.size(); ++i) {
    if (solids[i].kind != SolidKind::kObstacle) continue;
    ComplexGrid f = single_layer_deriv_factor(state.betas.at(beta_idx), solids[i], tables.csb[i]);
    for (std::size_t m = 0; m < n; ++m) vel.w_tilde_alpha[m] += vel.zeta_alpha[m] * f[m];
    vel.deriv_factor_obs.push_back(std::move(f));
    ++beta_idx;
  }
  if (chi != 0.0) {
    for (std::size_t m = 0; m < n; ++m) {
      vel.w_tilde_alpha[m] += chi * params.circulation * vel.cyl_hessian[m] * vel.zeta_alpha[m];
    }
  }
  vel.wt_alpha_dot_t = dot_tangent(vel.w_tilde_alpha, vel.tang);
  vel.wt_alpha_dot_n = dot_normal(vel.w_tilde_alpha, vel.tang);

  // U_alpha = W_alpha . n_hat - theta_alpha W . t_hat.
  vel.u_alpha.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const Complex w_alpha = vel.br_alpha[m] + vel.w_tilde_alpha[m];
    const Real wa_dot_n = -(w_alpha * vel.tang[m]).imag();
    vel.u_alpha[m] = wa_dot_n - vel.theta_alpha[m] * vel.w_dot_t[m];
  }

  return vel;
}

// Time-dependent constant added to theta_t so that zeta - alpha stays
// periodic: mu = -int(s_alpha_t zeta_a + i U_a zeta_a + V zeta_aa) /
// (i s_alpha int zeta_a).
inline Complex mu_correction(const FullState& state, const SurfaceVelocity& vel, Real chord_arc_floor = 0.0) {
  const std::size_t n = state.n();
  ComplexGrid zeta_aa(n);
  for (std::size_t m = 0; m < n; ++m) {
    zeta_aa[m] = Complex(0.0, vel.theta_alpha[m]) * vel.zeta_alpha[m];
  }
  ComplexGrid num(n);
  for (std::size_t m = 0; m < n; ++m) {
    num[m] = vel.s_alpha_t * vel.zeta_alpha[m] + Complex(0.0, 1.0) * vel.u_alpha[m] * vel.zeta_alpha[m] +
             vel.v[m] * zeta_aa[m];
  }
  const Complex denom = Complex(0.0, 1.0) * vel.s_alpha * integrate(vel.zeta_alpha);
  if (std::abs(denom) < std::max(chord_arc_floor * vel.s_alpha, 1e-14)) {
    throw ChordArcError("periodicity-correction denominator degenerate");
  }
  return -integrate(num) / denom;
}

}  // namespace wavetank
