// Assembly of the evolution right-hand side F(Theta), the compact coupling
// operator acting on (gamma_t, omega_t, beta_t), the per-step dense solve of
// (I + K) x = F, and the static no-penetration solve for initial densities.
#pragma once

#include <cmath>
#include <optional>
#include <vector>
#include "wavetank/common.hpp"
#include "wavetank/damping.hpp"
#include "wavetank/geometry.hpp"
#include "wavetank/kernels.hpp"
#include "wavetank/linalg.hpp"
#include "wavetank/matrix.hpp"
#include "wavetank/spectral.hpp"
#include "wavetank/velocity.hpp"

namespace wavetank {

enum class SolverMode { kFull, kModelProblem };

struct SolveOptions {
  SolverMode mode = SolverMode::kFull;
  Real mollifier_delta = 0.0;       // 0 disables regularization
  Real chord_arc_floor = 0.0;       // guards the periodicity-correction denominator
  bool apply_mu = true;
  Real residual_tolerance = 1e-10;
};

// The fixed problem data threaded through every stage evaluation.
struct Problem {
  std::vector<SolidBoundary> solids;
  SolidKernels solid_kernels;  // time-independent solid<-solid kernels
  PhysicsParams params;
  DampingConfig damping;

  static Problem build(std::vector<SolidBoundary> solids_in, PhysicsParams params_in,
                       DampingConfig damping_in = {}) {
    Problem p;
    p.solids = std::move(solids_in);
    p.solid_kernels = SolidKernels::build(p.solids);
    p.params = params_in;
    p.damping = damping_in;
    return p;
  }

  std::size_t bottom_index() const {
    for (std::size_t i = 0; i < solids.size(); ++i) {
      if (solids[i].kind == SolidKind::kBottom) return i;
    }
    return solids.size();
  }

  std::vector<std::size_t> obstacle_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < solids.size(); ++i) {
      if (solids[i].kind == SolidKind::kObstacle) out.push_back(i);
    }
    return out;
  }
};

struct RhsVector {
  RealGrid f_theta;              // includes the periodicity correction mu
  RealGrid f_gamma;
  std::vector<RealGrid> f_solid;  // one row block per solid, solids order
  Complex mu = Complex(0.0, 0.0);
};

namespace detail {

inline ComplexGrid multiply(const ComplexGrid& a, const ComplexGrid& b) {
  ComplexGrid out(a.size());
  for (std::size_t m = 0; m < a.size(); ++m) out[m] = a[m] * b[m];
  return out;
}

inline ComplexGrid multiply(const ComplexGrid& a, const RealGrid& b) {
  ComplexGrid out(a.size());
  for (std::size_t m = 0; m < a.size(); ++m) out[m] = a[m] * b[m];
  return out;
}

}  // namespace detail

// The twelve-term smooth bundle br_1 extracted from the time derivative of
// the Birkhoff-Rott integral after the tangential-transport cancellation and
// removal of the gamma*gamma_alpha transport piece. Conjugate convention.
inline ComplexGrid br1_bundle(const FullState& state, const SurfaceVelocity& vel) {
  const std::size_t n = state.n();
  const Real sa = vel.s_alpha;
  const Complex i1(0.0, 1.0);

  ComplexGrid gamma_over_za(n), p2(n);
  for (std::size_t m = 0; m < n; ++m) gamma_over_za[m] = state.gamma[m] / vel.zeta_alpha[m];
  p2 = deriv(gamma_over_za);
  ComplexGrid p1(n);
  for (std::size_t m = 0; m < n; ++m) p1[m] = p2[m] / vel.zeta_alpha[m];

  // commutators of multiplication by zeta_t with H and K
  ComplexGrid h_p1 = hilbert(p1);
  ComplexGrid h_ztp1 = hilbert(detail::multiply(vel.zeta_t, p1));
  ComplexGrid k_p2 = vel.kop.apply(p2);
  ComplexGrid k_ztp2 = vel.kop.apply(detail::multiply(vel.zeta_t, p2));

  ComplexGrid hh_gamma_alpha = to_complex(hilbert(vel.h_gamma_alpha));  // H^2(gamma_alpha)
  ComplexGrid gh(n);                                                    // (gamma/zeta_a) * H(gamma_a)
  for (std::size_t m = 0; m < n; ++m) gh[m] = gamma_over_za[m] * vel.h_gamma_alpha[m];
  ComplexGrid h_gh = hilbert(gh);

  RealGrid g_hga(n);  // gamma * H(gamma_alpha)
  for (std::size_t m = 0; m < n; ++m) g_hga[m] = state.gamma[m] * vel.h_gamma_alpha[m];
  ComplexGrid k_ghga = vel.kop.apply(g_hga);

  ComplexGrid gmn_over_za(n);  // gamma * (m.n_hat) / zeta_alpha
  RealGrid gmn(n);
  for (std::size_t m = 0; m < n; ++m) {
    gmn[m] = state.gamma[m] * vel.m_dot_n[m];
    gmn_over_za[m] = gmn[m] / vel.zeta_alpha[m];
  }
  ComplexGrid h_gmn = hilbert(gmn_over_za);
  ComplexGrid k_gmn = vel.kop.apply(gmn);

  RealGrid gth(n);  // gamma * theta_alpha
  for (std::size_t m = 0; m < n; ++m) gth[m] = state.gamma[m] * vel.theta_alpha[m];
  ComplexGrid vw_over_za(n);
  for (std::size_t m = 0; m < n; ++m) vw_over_za[m] = vel.v_minus_wt[m] / vel.zeta_alpha[m];
  ComplexGrid h_vwgth = hilbert(detail::multiply(vw_over_za, gth));
  RealGrid gth_vw(n);
  for (std::size_t m = 0; m < n; ++m) gth_vw[m] = gth[m] * vel.v_minus_wt[m];
  ComplexGrid k_gthvw = vel.kop.apply(gth_vw);

  ComplexGrid gwn_over_za(n);  // gamma * (W_tilde_alpha.n_hat) / zeta_alpha
  RealGrid gwn(n);
  for (std::size_t m = 0; m < n; ++m) {
    gwn[m] = state.gamma[m] * vel.wt_alpha_dot_n[m];
    gwn_over_za[m] = gwn[m] / vel.zeta_alpha[m];
  }
  ComplexGrid h_gwn = hilbert(gwn_over_za);
  ComplexGrid k_gwn = vel.kop.apply(gwn);

  ComplexGrid out(n);
  const Real sa2 = sa * sa;
  const Complex half_over_i = 1.0 / (2.0 * i1);
  for (std::size_t m = 0; m < n; ++m) {
    // the H-commutator inherits the 1/(2i) of the Birkhoff-Rott decomposition
    Complex v = half_over_i * (vel.zeta_t[m] * h_p1[m] - h_ztp1[m]);          // (1/2i)[zeta_t, H]
    v += vel.zeta_t[m] * k_p2[m] - k_ztp2[m];                                 // [zeta_t, K]
    v += -(vel.s_alpha_t / (2.0 * i1 * sa)) * vel.h_gamma_over_za[m];
    v += -(vel.s_alpha_t / sa) * vel.k_gamma[m];
    v += -(1.0 / (4.0 * sa2)) * (h_gh[m] - gamma_over_za[m] * hh_gamma_alpha[m]);  // [H, gamma/zeta_a]
    v += -(i1 / (2.0 * sa2)) * k_ghga[m];
    v += -(1.0 / (2.0 * sa)) * h_gmn[m];
    v += -(i1 / sa) * k_gmn[m];
    v += -(1.0 / (2.0 * sa)) * (h_vwgth[m] - vw_over_za[m] * vel.h_gamma_theta_a[m]);  // [H, (V-W.t)/zeta_a]
    v += -(i1 / sa) * k_gthvw[m];
    v += -(1.0 / (2.0 * sa)) * h_gwn[m];
    v += -(i1 / sa) * k_gwn[m];
    out[m] = v;
  }
  return out;
}

// Local parts of d/dt of the single-layer and cylinder velocities (conjugate
// convention): F_Y + F_Z + chi a0 d/dt grad phi_cyl.
inline ComplexGrid local_wt_tilde(const SurfaceVelocity& vel, const PhysicsParams& params) {
  const std::size_t n = vel.zeta.size();
  ComplexGrid out(n);
  const Real chi = params.chi();
  for (std::size_t m = 0; m < n; ++m) {
    Complex v = vel.zeta_t[m] * vel.deriv_factor_bottom[m];
    for (const ComplexGrid& f : vel.deriv_factor_obs) v += vel.zeta_t[m] * f[m];
    v += chi * params.circulation * vel.cyl_hessian[m] * vel.zeta_t[m];
    out[m] = v;
  }
  return out;
}

// Solid <- surface kernel rebuilt from the shared cotangent table by the
// antisymmetry cot(-u) = -cot(u).
inline RealMatrix surface_kernel_from_tables(const SolidBoundary& solid, const ComplexMatrix& csb) {
  RealMatrix k(solid.n(), csb.rows());
  for (std::size_t m = 0; m < solid.n(); ++m) {
    const Complex w = solid.zeta_alpha[m] / (2.0 * solid.s_alpha[m]);
    for (std::size_t j = 0; j < csb.rows(); ++j) k(m, j) = (w * (-csb(j, m))).real();
  }
  return k;
}

// Same sharing for the time-derivative kernel, via csc^2 = 1 + cot^2.
inline RealMatrix surface_kernel_time_derivative_from_tables(const SolidBoundary& solid, const ComplexMatrix& csb,
                                                             const ComplexGrid& zeta_t) {
  RealMatrix k(solid.n(), csb.rows());
  for (std::size_t m = 0; m < solid.n(); ++m) {
    const Complex w = solid.zeta_alpha[m] / (4.0 * solid.s_alpha[m]);
    for (std::size_t j = 0; j < csb.rows(); ++j) {
      const Complex c = csb(j, m);
      k(m, j) = (zeta_t[j] * w * (1.0 + c * c)).real();
    }
  }
  return k;
}

// F(Theta). With mollifier_delta > 0 the Fourier-truncation mollifier is
// inserted into the transport and leading-order terms, and the gamma_t
// remainder gains the Hilbert commutator created by pulling gamma through H.
inline RhsVector assemble_rhs(const FullState& state, const Problem& problem, const SurfaceVelocity& vel,
                              const KernelTables& tables, const SolveOptions& opts) {
  const std::size_t n = state.n();
  const Real sa = vel.s_alpha;
  const Real sa2 = sa * sa;
  const Real tau = problem.params.surface_tension;
  const Real g = problem.params.gravity;
  const Real delta = opts.mollifier_delta;
  const bool reg = delta > 0.0;

  auto J_r = [&](const RealGrid& u) { return reg ? mollify(u, delta) : u; };

  RhsVector rhs;
  rhs.f_theta.assign(n, 0.0);
  rhs.f_gamma.assign(n, 0.0);

  // --- theta_t ---------------------------------------------------------------
  RealGrid theta_for_transport = J_r(vel.theta_alpha);
  RealGrid h_ga = reg ? hilbert(J_r(vel.gamma_alpha)) : vel.h_gamma_alpha;
  RealGrid transport_theta(n);
  for (std::size_t m = 0; m < n; ++m) transport_theta[m] = vel.v_minus_wt[m] * theta_for_transport[m];
  transport_theta = J_r(transport_theta);
  for (std::size_t m = 0; m < n; ++m) {
    rhs.f_theta[m] = h_ga[m] / (2.0 * sa2) + transport_theta[m] / sa + vel.wt_alpha_dot_n[m] / sa +
                     vel.m_dot_n[m] / sa;
  }

  // Periodicity correction: the unique constant that freezes int zeta_alpha,
  // computed from the actual theta_t in use. Only its real part can act on a
  // real tangent angle; the total is reported for diagnostics.
  if (opts.apply_mu) {
    ComplexGrid drift(n);
    for (std::size_t m = 0; m < n; ++m) {
      drift[m] = (vel.s_alpha_t / sa + Complex(0.0, 1.0) * rhs.f_theta[m]) * vel.zeta_alpha[m];
    }
    const Complex denom = Complex(0.0, 1.0) * integrate(vel.zeta_alpha);
    if (std::abs(denom) < std::max(opts.chord_arc_floor, 1e-14)) {
      throw ChordArcError("periodicity-correction denominator degenerate");
    }
    rhs.mu = -integrate(drift) / denom;
    for (std::size_t m = 0; m < n; ++m) rhs.f_theta[m] += rhs.mu.real();
  }

  // --- gamma_t ---------------------------------------------------------------
  RealGrid theta_aa = deriv(vel.theta_alpha);
  if (reg) theta_aa = mollify(theta_aa, delta);

  ComplexGrid q_local = br1_bundle(state, vel);
  ComplexGrid q_wt_local = local_wt_tilde(vel, problem.params);
  RealGrid nonlocal_t(n);
  for (std::size_t m = 0; m < n; ++m) {
    nonlocal_t[m] = ((q_local[m] + q_wt_local[m]) * vel.tang[m]).real();
  }
  RealGrid cancel(n);
  for (std::size_t m = 0; m < n; ++m) cancel[m] = vel.m_dot_t[m] + vel.wt_alpha_dot_t[m];

  if (!reg) {
    for (std::size_t m = 0; m < n; ++m) {
      const Real eta_alpha = sa * std::sin(state.surface.theta[m]);
      rhs.f_gamma[m] = 2.0 * tau * theta_aa[m] / sa +
                       state.gamma[m] * vel.h_gamma_theta_a[m] / (2.0 * sa2) +
                       vel.gamma_alpha[m] * vel.v_minus_wt[m] / sa -
                       state.gamma[m] * vel.gamma_alpha[m] / sa2 +
                       state.gamma[m] * (vel.s_alpha_t - vel.wt_alpha_dot_t[m] - vel.m_dot_t[m]) / sa -
                       2.0 * g * eta_alpha + 2.0 * vel.v_minus_wt[m] * cancel[m] -
                       2.0 * sa * nonlocal_t[m];
    }
  } else {
    RealGrid j_theta_a = mollify(vel.theta_alpha, delta);
    RealGrid g2jt(n);
    for (std::size_t m = 0; m < n; ++m) g2jt[m] = state.gamma[m] * state.gamma[m] * j_theta_a[m];
    RealGrid h_g2jt = hilbert(g2jt);
    RealGrid j_ga = mollify(vel.gamma_alpha, delta);
    RealGrid trans(n);
    for (std::size_t m = 0; m < n; ++m) trans[m] = vel.v_minus_wt[m] * j_ga[m];
    trans = mollify(trans, delta);
    RealGrid gjga(n);
    for (std::size_t m = 0; m < n; ++m) gjga[m] = state.gamma[m] * j_ga[m];
    gjga = mollify(gjga, delta);
    RealGrid j_cancel(n);
    {
      RealGrid inner = mollify(cancel, delta);
      for (std::size_t m = 0; m < n; ++m) j_cancel[m] = vel.v_minus_wt[m] * inner[m];
      j_cancel = mollify(j_cancel, delta);
    }
    RealGrid j_nonlocal = mollify(nonlocal_t, delta);
    // Hilbert commutator from pulling gamma through H: [H, gamma](gamma J
    // theta_alpha / (2 s_alpha^2)).
    RealGrid arg(n);
    for (std::size_t m = 0; m < n; ++m) arg[m] = state.gamma[m] * j_theta_a[m] / (2.0 * sa2);
    RealGrid h_arg = hilbert(arg);
    RealGrid g_arg(n);
    for (std::size_t m = 0; m < n; ++m) g_arg[m] = state.gamma[m] * arg[m];
    RealGrid h_g_arg = hilbert(g_arg);
    for (std::size_t m = 0; m < n; ++m) {
      const Real eta_alpha = sa * std::sin(state.surface.theta[m]);
      const Real commutator = h_g_arg[m] - state.gamma[m] * h_arg[m];
      rhs.f_gamma[m] = 2.0 * tau * theta_aa[m] / sa + h_g2jt[m] / (2.0 * sa2) + trans[m] / sa -
                       gjga[m] / sa2 +
                       state.gamma[m] * (vel.s_alpha_t - vel.wt_alpha_dot_t[m] - vel.m_dot_t[m]) / sa -
                       2.0 * g * eta_alpha + 2.0 * j_cancel[m] - 2.0 * sa * j_nonlocal[m] - commutator;
    }
  }

  if (problem.damping.enabled) {
    RealGrid chi = build_cutoff(problem.damping, vel.zeta);
    if (max_abs(chi) > 0.0) {
      RealGrid dterm = damping_term(state, vel, chi);
      for (std::size_t m = 0; m < n; ++m) rhs.f_gamma[m] += dterm[m];
    }
  }

  // --- omega_t / beta_t local parts -------------------------------------------
  rhs.f_solid.resize(problem.solids.size());
  for (std::size_t i = 0; i < problem.solids.size(); ++i) {
    const SolidBoundary& solid = problem.solids[i];
    RealMatrix kst = surface_kernel_time_derivative_from_tables(solid, tables.csb[i], vel.zeta_t);
    RealGrid f(solid.n(), 0.0);
    const Real w = 2.0 / static_cast<Real>(n);  // (1/pi) * (2*pi/n)
    for (std::size_t m = 0; m < solid.n(); ++m) {
      Real s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += state.gamma[j] * kst(m, j);
      f[m] = -w * s;
    }
    rhs.f_solid[i] = std::move(f);
  }

  return rhs;
}

// Stacked operator I + K acting on (gamma_t, omega_t, beta_t...): the gamma_t
// row carries 2 s_alpha (N_BR + N_Y + N_Z).t_hat with the alternating-point
// rule on the singular self block; each solid row carries its Neumann-trace
// kernels with 1/pi weights.
struct SystemMatrix {
  RealMatrix a;
  std::vector<std::size_t> offsets;  // offsets[0] = gamma block, then solids
  std::size_t dim = 0;
};

inline SystemMatrix assemble_system(const FullState& state, const Problem& problem, const SurfaceVelocity& vel,
                                    const KernelTables& tables) {
  const std::size_t n = state.n();
  std::size_t dim = n;
  std::vector<std::size_t> offsets{0};
  for (const SolidBoundary& s : problem.solids) {
    offsets.push_back(dim);
    dim += s.n();
  }

  SystemMatrix sys;
  sys.offsets = std::move(offsets);
  sys.dim = dim;
  sys.a = RealMatrix(dim, dim, 0.0);
  RealMatrix& a = sys.a;
  for (std::size_t d = 0; d < dim; ++d) a(d, d) = 1.0;

  const Real sa = vel.s_alpha;
  // gamma_t rows
  for (std::size_t m = 0; m < n; ++m) {
    // N_BR: alternating-point rule, weight 2*(2pi/N), factor 1/(4*pi*i).
    const Real wbr = 2.0 * sa * (2.0 / static_cast<Real>(n));  // 2 s_a * 2*(2pi/N)/(4pi)
    for (std::size_t j = (m + 1) % 2; j < n; j += 2) {
      // Re{ e^{i theta_m} * cot / i } = Im{ e^{i theta_m} cot }
      a(m, j) += wbr * (vel.tang[m] * tables.css(m, j)).imag();
    }
    // N_Y / N_Z: plain trapezoid on each solid density.
    for (std::size_t i = 0; i < problem.solids.size(); ++i) {
      const SolidBoundary& solid = problem.solids[i];
      const Real wsl = 2.0 * sa / (2.0 * static_cast<Real>(solid.n()));  // 2 s_a (1/4pi)(2pi/ns)
      for (std::size_t j = 0; j < solid.n(); ++j) {
        a(m, sys.offsets[i + 1] + j) +=
            wsl * solid.s_alpha[j] * (vel.tang[m] * tables.csb[i](m, j)).real();
      }
    }
  }

  // solid rows
  for (std::size_t i = 0; i < problem.solids.size(); ++i) {
    const SolidBoundary& solid = problem.solids[i];
    const std::size_t row0 = sys.offsets[i + 1];
    RealMatrix ks = surface_kernel_from_tables(solid, tables.csb[i]);
    const Real wg = 2.0 / static_cast<Real>(n);
    for (std::size_t m = 0; m < solid.n(); ++m) {
      for (std::size_t j = 0; j < n; ++j) a(row0 + m, j) += wg * ks(m, j);
    }
    for (std::size_t l = 0; l < problem.solids.size(); ++l) {
      const RealMatrix& kk = problem.solid_kernels.k[i][l];
      const Real w = 2.0 / static_cast<Real>(problem.solids[l].n());
      const std::size_t col0 = sys.offsets[l + 1];
      for (std::size_t m = 0; m < solid.n(); ++m) {
        for (std::size_t j = 0; j < problem.solids[l].n(); ++j) a(row0 + m, col0 + j) += w * kk(m, j);
      }
    }
  }
  return sys;
}

// Rates of change of the full state, plus solver diagnostics.
struct StateRates {
  RealGrid theta_t;
  RealGrid gamma_t;
  RealGrid omega_t;
  std::vector<RealGrid> beta_t;
  Real length_t = 0.0;
  Complex base_t = Complex(0.0, 0.0);
  Complex mu = Complex(0.0, 0.0);
  Real residual = 0.0;
  Real condition = 0.0;
};

namespace detail {

inline std::vector<Real> stack_rhs(const RhsVector& rhs, const Problem& problem, std::size_t dim) {
  std::vector<Real> b;
  b.reserve(dim);
  b.insert(b.end(), rhs.f_gamma.begin(), rhs.f_gamma.end());
  for (std::size_t i = 0; i < problem.solids.size(); ++i) {
    b.insert(b.end(), rhs.f_solid[i].begin(), rhs.f_solid[i].end());
  }
  return b;
}

inline void unstack(const std::vector<Real>& x, const Problem& problem, const SystemMatrix& sys,
                    std::size_t n, StateRates& rates) {
  rates.gamma_t.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
  rates.omega_t.clear();
  rates.beta_t.clear();
  for (std::size_t i = 0; i < problem.solids.size(); ++i) {
    const std::size_t o = sys.offsets[i + 1];
    RealGrid block(x.begin() + static_cast<std::ptrdiff_t>(o),
                   x.begin() + static_cast<std::ptrdiff_t>(o + problem.solids[i].n()));
    if (problem.solids[i].kind == SolidKind::kBottom) rates.omega_t = std::move(block);
    else rates.beta_t.push_back(std::move(block));
  }
  if (rates.omega_t.empty()) rates.omega_t.assign(n, 0.0);
}

}  // namespace detail

// One full evaluation of Theta_t at the given state. In full mode the stacked
// system is LU-solved with one refinement step and the residual is enforced;
// model mode skips the compact coupling entirely.
inline StateRates solve_step(const FullState& state, const Problem& problem, const SolveOptions& opts) {
  ComplexGrid zeta = reconstruct_curve(state.surface);
  KernelTables tables = build_kernel_tables(zeta, problem.solids);
  SurfaceVelocity vel = assemble_velocity(state, problem.solids, problem.params, tables);
  RhsVector rhs = assemble_rhs(state, problem, vel, tables, opts);

  StateRates rates;
  rates.theta_t = rhs.f_theta;
  rates.mu = rhs.mu;
  rates.length_t = kTwoPi * vel.s_alpha_t;
  // A complex constant added to theta_t acts on zeta_alpha = s_a e^{i theta}
  // as d/dt log zeta_alpha += i mu: the real part shifts theta (applied in
  // f_theta), the imaginary part scales the arclength element. Realizing both
  // freezes int zeta_alpha exactly.
  if (opts.apply_mu) rates.length_t -= rhs.mu.imag() * state.surface.length;
  rates.base_t = vel.zeta_t[0];

  if (opts.mode == SolverMode::kModelProblem) {
    rates.gamma_t = rhs.f_gamma;
    rates.omega_t.assign(state.omega.size(), 0.0);
    for (std::size_t i = 0; i < problem.solids.size(); ++i) {
      if (problem.solids[i].kind == SolidKind::kBottom) rates.omega_t = rhs.f_solid[i];
      else rates.beta_t.push_back(rhs.f_solid[i]);
    }
    return rates;
  }

  SystemMatrix sys = assemble_system(state, problem, vel, tables);
  std::vector<Real> b = detail::stack_rhs(rhs, problem, sys.dim);
  LinearSolveReport rep = solve_dense(sys.a, b);
  if (!(rep.relative_residual <= opts.residual_tolerance)) {
    throw SolverError("relative residual " + std::to_string(rep.relative_residual) + " above tolerance");
  }
  rates.residual = rep.relative_residual;
  rates.condition = rep.condition_estimate;
  detail::unstack(rep.x, problem, sys, state.n(), rates);
  return rates;
}

// Fixed-point (Neumann series) solve of (I + K)x = b for cross-validation.
inline std::vector<Real> neumann_solve(const SystemMatrix& sys, const std::vector<Real>& b, int max_iters = 200,
                                       Real tol = 1e-13) {
  std::vector<Real> x = b;
  std::vector<Real> next(b.size());
  for (int it = 0; it < max_iters; ++it) {
    // next = b - (A - I) x
    for (std::size_t r = 0; r < sys.dim; ++r) {
      Real s = 0.0;
      for (std::size_t c = 0; c < sys.dim; ++c) s += sys.a(r, c) * x[c];
      next[r] = b[r] - (s - x[r]);
    }
    Real diff = 0.0, scale = 0.0;
    for (std::size_t r = 0; r < sys.dim; ++r) {
      diff = std::max(diff, std::abs(next[r] - x[r]));
      scale = std::max(scale, std::abs(next[r]));
    }
    x.swap(next);
    if (diff <= tol * std::max(scale, 1.0)) break;
  }
  return x;
}

// Static no-penetration solve: densities (omega, beta...) making the normal
// velocity vanish on every solid for the given surface data. Uses the same
// kernel blocks as the evolution operator.
inline void solve_initial_densities(FullState& state, const Problem& problem, Real residual_tol = 1e-10) {
  if (problem.solids.empty()) return;
  ComplexGrid zeta = reconstruct_curve(state.surface);
  KernelTables tables = build_kernel_tables(zeta, problem.solids);

  std::size_t dim = 0;
  std::vector<std::size_t> offsets;
  for (const SolidBoundary& s : problem.solids) {
    offsets.push_back(dim);
    dim += s.n();
  }
  RealMatrix a(dim, dim, 0.0);
  for (std::size_t d = 0; d < dim; ++d) a(d, d) = 1.0;
  for (std::size_t i = 0; i < problem.solids.size(); ++i) {
    for (std::size_t l = 0; l < problem.solids.size(); ++l) {
      const RealMatrix& kk = problem.solid_kernels.k[i][l];
      const Real w = 2.0 / static_cast<Real>(problem.solids[l].n());
      for (std::size_t m = 0; m < problem.solids[i].n(); ++m) {
        for (std::size_t j = 0; j < problem.solids[l].n(); ++j) a(offsets[i] + m, offsets[l] + j) += w * kk(m, j);
      }
    }
  }

  const Real chi = problem.params.chi();
  std::vector<Real> b(dim, 0.0);
  const std::size_t n = state.n();
  for (std::size_t i = 0; i < problem.solids.size(); ++i) {
    const SolidBoundary& solid = problem.solids[i];
    RealMatrix ks = surface_kernel_from_tables(solid, tables.csb[i]);
    const Real wg = 2.0 / static_cast<Real>(n);
    for (std::size_t m = 0; m < solid.n(); ++m) {
      Real s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += ks(m, j) * state.gamma[j];
      Real background = 0.0;
      if (chi != 0.0) {
        const Complex q = problem.params.circulation * cyl_gradient_conj(solid.zeta[m], problem.params.obstacle_center) +
                          problem.params.background_current;
        background = (q * solid.normal(m)).real();  // X.n = Re{ C(X)^* C(n) }
      }
      b[offsets[i] + m] = -wg * s - 2.0 * chi * background;
    }
  }

  LinearSolveReport rep = solve_dense(a, b);
  if (!(rep.relative_residual <= residual_tol)) {
    throw SolverError("static density solve residual above tolerance");
  }
  state.betas.clear();
  for (std::size_t i = 0; i < problem.solids.size(); ++i) {
    RealGrid block(rep.x.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
                   rep.x.begin() + static_cast<std::ptrdiff_t>(offsets[i] + problem.solids[i].n()));
    if (problem.solids[i].kind == SolidKind::kBottom) {
      state.omega = std::move(block);
    } else {
      state.betas.push_back(std::move(block));
    }
  }
}

}  // namespace wavetank
