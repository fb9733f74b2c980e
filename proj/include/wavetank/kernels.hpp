// Cotangent-kernel primitives, the boundary interaction kernels coupling the
// free surface, the bottom and the obstacles, the smoothing operator K[zeta],
// and periodic Green-function identities used as test oracles.
#pragma once

#include <cmath>
#include <vector>
#include "wavetank/common.hpp"
#include "wavetank/geometry.hpp"
#include "wavetank/matrix.hpp"
#include "wavetank/spectral.hpp"

namespace wavetank {

// cot(u/2), evaluated through decaying exponentials so the value saturates at
// -i (Im -> +inf) / +i (Im -> -inf) without overflow. Saturation applies
// beyond |Im u| > 40, where the exponential correction is below epsilon.
inline Complex cot_half(Complex u) {
  const Real im = u.imag();
  if (im > 40.0) return Complex(0.0, -1.0);
  if (im < -40.0) return Complex(0.0, 1.0);
  if (im >= 0.0) {
    const Complex w = std::exp(Complex(0.0, 1.0) * u);  // |w| = e^{-Im u} <= 1
    const Complex den = w - 1.0;
    if (std::abs(den) < 2e-150) throw SingularEvaluationError("cot argument at a pole");
    return Complex(0.0, 1.0) * (w + 1.0) / den;
  }
  const Complex w = std::exp(Complex(0.0, -1.0) * u);  // |w| = e^{Im u} < 1
  const Complex den = 1.0 - w;
  if (std::abs(den) < 2e-150) throw SingularEvaluationError("cot argument at a pole");
  return Complex(0.0, 1.0) * (1.0 + w) / den;
}

// (1/2) cot((z - w)/2): the 2*pi-periodic image sum of 1/(z - w).
inline Complex cot_kernel(Complex z, Complex w) { return 0.5 * cot_half(z - w); }

// csc^2(u/2) = 1 + cot^2(u/2); decays to 0 for |Im u| large.
inline Complex csc2_half(Complex u) {
  if (std::abs(u.imag()) > 40.0) return Complex(0.0, 0.0);
  const Complex c = cot_half(u);
  return 1.0 + c * c;
}

// Im(zeta_alphaalpha / zeta_alpha): s_alpha * curvature for each node of a
// fixed boundary; used by the removable-singularity diagonal limits.
inline RealGrid boundary_theta_alpha(const SolidBoundary& b) {
  ComplexGrid zaa = deriv(b.zeta_alpha);
  RealGrid out(b.n());
  for (std::size_t m = 0; m < b.n(); ++m) out[m] = (zaa[m] / b.zeta_alpha[m]).imag();
  return out;
}

// --- solid <- solid kernels (time-independent) -------------------------------
//
// Entry (m, j) of solid_kernel(target, source) is
//   Re{ i s_src(j) z'_tgt(m) cot((z_tgt(m) - z_src(j))/2) } / (2 s_tgt(m)),
// the normal derivative at target node m of the periodic single-layer kernel
// attached to source node j. For target == source the diagonal is the
// removable-singularity limit -theta_alpha(m)/2.
inline RealMatrix solid_kernel(const SolidBoundary& target, const SolidBoundary& source) {
  const bool self = (&target == &source);
  RealMatrix k(target.n(), source.n());
  RealGrid ta;
  if (self) ta = boundary_theta_alpha(target);
  for (std::size_t m = 0; m < target.n(); ++m) {
    const Complex w = Complex(0.0, 1.0) * target.zeta_alpha[m] / (2.0 * target.s_alpha[m]);
    for (std::size_t j = 0; j < source.n(); ++j) {
      if (self && j == m) {
        k(m, j) = -0.5 * ta[m];
      } else {
        k(m, j) = (w * source.s_alpha[j] * cot_half(target.zeta[m] - source.zeta[j])).real();
      }
    }
  }
  return k;
}

// All pairwise solid kernels for a boundary list; built once per run.
struct SolidKernels {
  std::vector<std::vector<RealMatrix>> k;  // k[target][source]

  static SolidKernels build(const std::vector<SolidBoundary>& solids) {
    SolidKernels out;
    out.k.resize(solids.size());
    for (std::size_t i = 0; i < solids.size(); ++i) {
      out.k[i].reserve(solids.size());
      for (std::size_t j = 0; j < solids.size(); ++j) {
        out.k[i].push_back(i == j ? solid_kernel(solids[i], solids[i]) : solid_kernel(solids[i], solids[j]));
      }
    }
    return out;
  }
};

// --- solid <- surface kernels -------------------------------------------------
//
// k_surface(target_solid)(m, j) = Re{ z'_tgt(m) cot((z_tgt(m) - zeta(j))/2) }
//                                 / (2 s_tgt(m));
// pairs with the 1/(4*pi*i) Birkhoff-Rott normalization so the gamma_t terms
// enter with plain 1/(2*pi) weights. Nonsingular under positive clearance.
inline RealMatrix surface_kernel(const SolidBoundary& target, const ComplexGrid& surface_zeta) {
  RealMatrix k(target.n(), surface_zeta.size());
  for (std::size_t m = 0; m < target.n(); ++m) {
    const Complex w = target.zeta_alpha[m] / (2.0 * target.s_alpha[m]);
    for (std::size_t j = 0; j < surface_zeta.size(); ++j) {
      k(m, j) = (w * cot_half(target.zeta[m] - surface_zeta[j])).real();
    }
  }
  return k;
}

// Time derivative of the solid <- surface kernel under surface motion zeta_t:
//   k_t(m, j) = Re{ zeta_t(j) z'_tgt(m) csc^2((z_tgt(m) - zeta(j))/2) }
//               / (4 s_tgt(m)).
inline RealMatrix surface_kernel_time_derivative(const SolidBoundary& target, const ComplexGrid& surface_zeta,
                                                 const ComplexGrid& zeta_t) {
  RealMatrix k(target.n(), surface_zeta.size());
  for (std::size_t m = 0; m < target.n(); ++m) {
    const Complex w = target.zeta_alpha[m] / (4.0 * target.s_alpha[m]);
    for (std::size_t j = 0; j < surface_zeta.size(); ++j) {
      k(m, j) = (zeta_t[j] * w * csc2_half(target.zeta[m] - surface_zeta[j])).real();
    }
  }
  return k;
}

// The six interaction kernels of the canonical one-bottom one-obstacle
// configuration, named by source curve: S = free surface, B = bottom, C =
// obstacle; superscript 1 targets the bottom, 2 the obstacle.
struct BoundaryKernels {
  RealMatrix k_s1, k_s2;  // surface sources (time-dependent)
  RealMatrix k_b1, k_b2;  // bottom sources
  RealMatrix k_c1, k_c2;  // obstacle sources
};

inline BoundaryKernels boundary_kernels(const ComplexGrid& surface_zeta, const SolidBoundary& bottom,
                                        const SolidBoundary& obstacle) {
  BoundaryKernels k;
  k.k_s1 = surface_kernel(bottom, surface_zeta);
  k.k_s2 = surface_kernel(obstacle, surface_zeta);
  k.k_b1 = solid_kernel(bottom, bottom);
  k.k_b2 = solid_kernel(obstacle, bottom);
  k.k_c1 = solid_kernel(bottom, obstacle);
  k.k_c2 = solid_kernel(obstacle, obstacle);
  return k;
}

// Time derivatives of the two surface-sourced kernels under surface motion.
struct BoundaryKernelRates {
  RealMatrix k_st1, k_st2;
};

inline BoundaryKernelRates kernel_time_derivatives(const ComplexGrid& surface_zeta, const SolidBoundary& bottom,
                                                   const SolidBoundary& obstacle, const ComplexGrid& zeta_t) {
  BoundaryKernelRates k;
  k.k_st1 = surface_kernel_time_derivative(bottom, surface_zeta, zeta_t);
  k.k_st2 = surface_kernel_time_derivative(obstacle, surface_zeta, zeta_t);
  return k;
}

// --- the smoothing operator K[zeta] -------------------------------------------
//
// K[zeta]f(alpha) = (1/(4*pi*i)) int f(alpha') [ cot((zeta_d(alpha) -
// zeta_d(alpha'))/2) - cot((alpha - alpha')/2) / zeta_alpha(alpha') ] dalpha'.
// The bracket has a removable singularity with limit -zeta_aa / zeta_a^2; the
// integrand is periodic, so plain trapezoid quadrature is spectrally accurate
// and the integration window drops out.
class KOperator {
 public:
  KOperator() = default;

  // `surface_cots`, when provided, holds cot((zeta_m - zeta_j)/2) with zero
  // diagonal (the table the velocity assembly already built).
  KOperator(const ComplexGrid& zeta, const ComplexGrid& zeta_alpha, const ComplexMatrix* surface_cots = nullptr) {
    const std::size_t n = zeta.size();
    m_ = ComplexMatrix(n, n);
    ComplexGrid zaa = deriv(zeta_alpha);
    const Real weight = kTwoPi / static_cast<Real>(n);
    const Complex scale = weight / (4.0 * kPi * Complex(0.0, 1.0));
    // cot((alpha_m - alpha_j)/2) depends only on m - j.
    ComplexGrid flat(n, Complex(0.0, 0.0));
    for (std::size_t d = 1; d < n; ++d) flat[d] = cot_half(kTwoPi * static_cast<Real>(d) / static_cast<Real>(n));
    try {
      for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t j = 0; j < n; ++j) {
          if (j == m) {
            m_(m, j) = scale * (-zaa[m] / (zeta_alpha[m] * zeta_alpha[m]));
          } else {
            const std::size_t d = (m + n - j) % n;
            const Complex c = surface_cots ? (*surface_cots)(m, j) : cot_half(zeta[m] - zeta[j]);
            m_(m, j) = scale * (c - flat[d] / zeta_alpha[j]);
          }
        }
      }
    } catch (const SingularEvaluationError& e) {
      throw ChordArcError(std::string("surface self-distance collapsed (") + e.what() + ")");
    }
  }

  ComplexGrid apply(const ComplexGrid& f) const { return m_.apply(f); }
  ComplexGrid apply(const RealGrid& f) const { return m_.apply(to_complex(f)); }

  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

// --- periodic Green-function identities ---------------------------------------
//
// gauss_integral computes int_Gamma d/dn_Q N(z, Q) dsigma(Q) over one boundary
// curve with its into-fluid normal, N the 2*pi-periodic log kernel. Summed
// over a full fluid boundary it equals 1 / 0.5 / 0 for interior / boundary /
// exterior targets. `self_node` marks z as node m of this same curve so the
// removable diagonal limit is used there.
inline Real gauss_integral(Complex z, const ComplexGrid& curve_zeta, const ComplexGrid& curve_zeta_alpha,
                           Real normal_sign, std::ptrdiff_t self_node = -1) {
  const std::size_t n = curve_zeta.size();
  RealGrid theta_a;
  if (self_node >= 0) {
    ComplexGrid zaa = deriv(curve_zeta_alpha);
    theta_a.resize(n);
    for (std::size_t m = 0; m < n; ++m) theta_a[m] = (zaa[m] / curve_zeta_alpha[m]).imag();
  }
  Real sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Real v;
    if (self_node >= 0 && j == static_cast<std::size_t>(self_node)) {
      v = normal_sign * theta_a[j];
    } else {
      v = (normal_sign * Complex(0.0, 1.0) * curve_zeta_alpha[j] * cot_half(z - curve_zeta[j])).real();
    }
    sum += v;
  }
  return sum * (kTwoPi / static_cast<Real>(n)) / (4.0 * kPi);
}

inline Real gauss_integral(Complex z, const SolidBoundary& b, std::ptrdiff_t self_node = -1) {
  return gauss_integral(z, b.zeta, b.zeta_alpha, +1.0, self_node);
}

// Full-boundary assembly. `surface_node` / (`solid_index`, `solid_node`) flag
// z as lying on one of the curves. The surface normal into the fluid is the
// negative of its upward normal, hence the -1 sign.
inline Real kernel_identity(Complex z, const ComplexGrid& surface_zeta, const ComplexGrid& surface_zeta_alpha,
                            const std::vector<SolidBoundary>& solids, std::ptrdiff_t surface_node = -1,
                            std::ptrdiff_t solid_index = -1, std::ptrdiff_t solid_node = -1) {
  Real total = gauss_integral(z, surface_zeta, surface_zeta_alpha, -1.0, surface_node);
  for (std::size_t i = 0; i < solids.size(); ++i) {
    const std::ptrdiff_t self = (static_cast<std::ptrdiff_t>(i) == solid_index) ? solid_node : -1;
    total += gauss_integral(z, solids[i], self);
  }
  return total;
}

// --- double layer potentials and jump relations --------------------------------

// Double layer potential of density phi on one solid boundary, evaluated at z.
inline Real double_layer(Complex z, const SolidBoundary& b, const RealGrid& phi, std::ptrdiff_t self_node = -1) {
  const std::size_t n = b.n();
  RealGrid theta_a;
  if (self_node >= 0) theta_a = boundary_theta_alpha(b);
  Real sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Real kv;
    if (self_node >= 0 && j == static_cast<std::size_t>(self_node)) {
      kv = theta_a[j];
    } else {
      kv = (Complex(0.0, 1.0) * b.zeta_alpha[j] * cot_half(z - b.zeta[j])).real();
    }
    sum += kv * phi[j];
  }
  return sum * (kTwoPi / static_cast<Real>(n)) / (4.0 * kPi);
}

struct JumpCheckResult {
  Real u_plus_error = 0.0;   // fluid-side limit vs +phi/2 + pv integral
  Real u_minus_error = 0.0;  // far-side limit vs -phi/2 + pv integral
  Real convergence_order = 0.0;
};

// Richardson-extrapolates u(P +/- h n_P) through h, h/2, ..., h/2^(levels-1)
// and compares with the one-sided boundary limits of the double layer. The
// limit from the side the normal points into carries +phi/2.
inline JumpCheckResult jump_relation_check(const RealGrid& phi, const SolidBoundary& b, Real h, int levels = 5) {
  const std::size_t n = b.n();
  JumpCheckResult out;
  std::vector<Real> hs(levels);
  for (int l = 0; l < levels; ++l) hs[l] = h / std::pow(2.0, l);

  Real order_num = 0.0, order_den = 0.0;
  for (std::size_t m = 0; m < n; m += std::max<std::size_t>(1, n / 32)) {
    const Complex nm = b.normal(m);
    const Real pv = double_layer(b.zeta[m], b, phi, static_cast<std::ptrdiff_t>(m));
    for (int side = 0; side < 2; ++side) {
      const Real sgn = (side == 0) ? 1.0 : -1.0;
      std::vector<Real> u(levels);
      for (int l = 0; l < levels; ++l) u[l] = double_layer(b.zeta[m] + sgn * hs[l] * nm, b, phi);
      // Neville extrapolation to h = 0.
      std::vector<Real> t = u;
      for (int k = 1; k < levels; ++k) {
        for (int l = levels - 1; l >= k; --l) {
          t[l] = t[l] + (t[l] - t[l - 1]) * hs[l] / (hs[l - k] - hs[l]);
        }
      }
      const Real limit = t[levels - 1];
      const Real expected = sgn * 0.5 * phi[m] + pv;
      const Real err = std::abs(limit - expected);
      if (side == 0) out.u_plus_error = std::max(out.u_plus_error, err);
      else out.u_minus_error = std::max(out.u_minus_error, err);
      // one-sided convergence order, measured once h is in the asymptotic range
      if (levels >= 3) {
        const Real e0 = std::abs(u[1] - limit), e1 = std::abs(u[2] - limit);
        if (e0 > 0.0 && e1 > 0.0) {
          order_num += std::log2(e0 / e1);
          order_den += 1.0;
        }
      }
    }
  }
  out.convergence_order = (order_den > 0.0) ? order_num / order_den : 0.0;
  return out;
}

}  // namespace wavetank
