// Free-surface curve reconstruction from (theta, L, base point), frames,
// curvature, chord-arc and clearance diagnostics, and fixed solid boundaries.
#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>
#include "wavetank/common.hpp"
#include "wavetank/spectral.hpp"

namespace wavetank {

// The evolving free-surface unknowns. theta is the tangent angle with the
// horizontal, L the length of one period and base the absolute position of
// the alpha = 0 node; theta and L determine the curve only up to translation.
struct SurfaceState {
  RealGrid theta;
  Real length = kTwoPi;
  Complex base = Complex(0.0, 0.0);
  Real time = 0.0;

  std::size_t n() const { return theta.size(); }
  Real s_alpha() const { return length / kTwoPi; }
};

enum class SolidKind { kBottom, kObstacle };

// A fixed parametrized boundary curve with precomputed derivative samples.
// Bottom curves satisfy zeta(alpha) - alpha periodic; obstacles are closed.
struct SolidBoundary {
  SolidKind kind = SolidKind::kBottom;
  ComplexGrid zeta;
  ComplexGrid zeta_alpha;
  RealGrid s_alpha;

  std::size_t n() const { return zeta.size(); }
  bool closed() const { return kind == SolidKind::kObstacle; }

  // Unit normal pointing into the fluid, as a complex number.
  Complex normal(std::size_t j) const { return Complex(0.0, 1.0) * zeta_alpha[j] / s_alpha[j]; }
};

// The full unknown vector: surface state, vortex sheet strength gamma, the
// bottom density omega and one density beta per obstacle.
struct FullState {
  SurfaceState surface;
  RealGrid gamma;
  RealGrid omega;
  std::vector<RealGrid> betas;

  std::size_t n() const { return surface.n(); }
};

inline ComplexGrid surface_zeta_alpha(const SurfaceState& s) {
  ComplexGrid za(s.n());
  const Real sa = s.s_alpha();
  for (std::size_t m = 0; m < s.n(); ++m) za[m] = sa * std::exp(Complex(0.0, s.theta[m]));
  return za;
}

// zeta(alpha) = base + alpha*mean(zeta_alpha) + (A(alpha) - A(0)) with A the
// mean-zero antiderivative of zeta_alpha, so that zeta(0) = base exactly and
// zeta - alpha is periodic precisely when mean(zeta_alpha) = 1.
inline ComplexGrid reconstruct_curve(const RealGrid& theta, Real length, Complex base) {
  SurfaceState s{theta, length, base, 0.0};
  ComplexGrid za = surface_zeta_alpha(s);
  const Complex zbar = mean(za);
  ComplexGrid anti = antideriv_meanzero(za);
  const RealGrid alpha = grid_nodes(theta.size());
  ComplexGrid z(theta.size());
  for (std::size_t m = 0; m < theta.size(); ++m) z[m] = base + alpha[m] * zbar + (anti[m] - anti[0]);
  return z;
}

inline ComplexGrid reconstruct_curve(const SurfaceState& s) {
  return reconstruct_curve(s.theta, s.length, s.base);
}

// |zeta(2*pi) - zeta(0) - 2*pi| for the reconstructed curve.
inline Real periodicity_defect(const SurfaceState& s) {
  return std::abs(s.length * mean(surface_zeta_alpha(s)) / s.s_alpha() - kTwoPi);
}

// Unit tangent exp(i*theta) and unit normal i*exp(i*theta) in complex form.
inline ComplexGrid tangent(const RealGrid& theta) {
  ComplexGrid t(theta.size());
  for (std::size_t m = 0; m < theta.size(); ++m) t[m] = std::exp(Complex(0.0, theta[m]));
  return t;
}

inline ComplexGrid normal(const RealGrid& theta) {
  ComplexGrid n(theta.size());
  for (std::size_t m = 0; m < theta.size(); ++m) n[m] = Complex(0.0, 1.0) * std::exp(Complex(0.0, theta[m]));
  return n;
}

// kappa = theta_alpha / s_alpha. `winding` carries the linear-in-alpha part of
// the tangent angle for closed curves (0 for an x-periodic surface).
inline RealGrid curvature(const RealGrid& theta, Real length, int winding = 0) {
  RealGrid ka = deriv(theta);
  const Real inv_sa = kTwoPi / length;
  for (Real& v : ka) v = inv_sa * (v + static_cast<Real>(winding));
  return ka;
}

// min over node pairs with |alpha - alpha'| <= pi of |zeta - zeta'| / |alpha -
// alpha'|, using the periodic extension zeta(alpha + 2*pi) = zeta(alpha) + 2*pi.
inline Real chord_arc_constant(const ComplexGrid& zeta) {
  const std::size_t n = zeta.size();
  const Real dal = kTwoPi / static_cast<Real>(n);
  Real best = std::numeric_limits<Real>::infinity();
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t d = 1; d <= n / 2; ++d) {
      const std::size_t j = m + d;
      const Complex zj = (j < n) ? zeta[j] : zeta[j - n] + kTwoPi;
      const Real ratio = std::abs(zj - zeta[m]) / (static_cast<Real>(d) * dal);
      best = std::min(best, ratio);
    }
  }
  return best;
}

struct Clearances {
  Real depth = std::numeric_limits<Real>::infinity();
  std::vector<Real> obstacle_gap;

  Real min_gap() const {
    Real g = std::numeric_limits<Real>::infinity();
    for (Real v : obstacle_gap) g = std::min(g, v);
    return g;
  }
};

// depth = min eta - max eta_bottom; per obstacle, min eta - max eta_obstacle.
inline Clearances clearances(const ComplexGrid& zeta, const std::vector<SolidBoundary>& solids) {
  Real eta_min = std::numeric_limits<Real>::infinity();
  for (const Complex& z : zeta) eta_min = std::min(eta_min, z.imag());
  Clearances out;
  for (const SolidBoundary& solid : solids) {
    Real top = -std::numeric_limits<Real>::infinity();
    for (const Complex& z : solid.zeta) top = std::max(top, z.imag());
    if (solid.kind == SolidKind::kBottom) {
      out.depth = std::min(out.depth, eta_min - top);
    } else {
      out.obstacle_gap.push_back(eta_min - top);
    }
  }
  return out;
}

// --- built-in boundary shapes ------------------------------------------------

inline SolidBoundary flat_bottom(std::size_t n, Real depth) {
  SolidBoundary b;
  b.kind = SolidKind::kBottom;
  b.zeta.resize(n);
  b.zeta_alpha.assign(n, Complex(1.0, 0.0));
  b.s_alpha.assign(n, 1.0);
  const RealGrid alpha = grid_nodes(n);
  for (std::size_t m = 0; m < n; ++m) b.zeta[m] = Complex(alpha[m], -depth);
  return b;
}

// Bottom at depth h with height profile sum_k amp[k] * cos((k+1) * alpha).
inline SolidBoundary fourier_bottom(std::size_t n, Real depth, const std::vector<Real>& amplitudes) {
  SolidBoundary b;
  b.kind = SolidKind::kBottom;
  b.zeta.resize(n);
  b.zeta_alpha.resize(n);
  b.s_alpha.resize(n);
  const RealGrid alpha = grid_nodes(n);
  for (std::size_t m = 0; m < n; ++m) {
    Real h = -depth, hp = 0.0;
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
      const Real kk = static_cast<Real>(k + 1);
      h += amplitudes[k] * std::cos(kk * alpha[m]);
      hp += -amplitudes[k] * kk * std::sin(kk * alpha[m]);
    }
    b.zeta[m] = Complex(alpha[m], h);
    b.zeta_alpha[m] = Complex(1.0, hp);
    b.s_alpha[m] = std::abs(b.zeta_alpha[m]);
  }
  return b;
}

// Clockwise circle so the into-fluid normal points away from the center.
inline SolidBoundary circle_obstacle(std::size_t n, Complex center, Real radius) {
  SolidBoundary b;
  b.kind = SolidKind::kObstacle;
  b.zeta.resize(n);
  b.zeta_alpha.resize(n);
  b.s_alpha.assign(n, radius);
  const RealGrid alpha = grid_nodes(n);
  for (std::size_t m = 0; m < n; ++m) {
    const Complex e = std::exp(Complex(0.0, -alpha[m]));
    b.zeta[m] = center + radius * e;
    b.zeta_alpha[m] = Complex(0.0, -radius) * e;
  }
  return b;
}

// Sampled boundary table: one line "alpha re(zeta) im(zeta)" per node.
// Derivative samples are filled spectrally (bottoms differentiate zeta-alpha's
// periodic part).
inline SolidBoundary boundary_from_table(SolidKind kind, const ComplexGrid& zeta) {
  SolidBoundary b;
  b.kind = kind;
  b.zeta = zeta;
  ComplexGrid periodic = zeta;
  if (kind == SolidKind::kBottom) {
    const RealGrid alpha = grid_nodes(zeta.size());
    for (std::size_t m = 0; m < zeta.size(); ++m) periodic[m] -= alpha[m];
  }
  b.zeta_alpha = deriv(periodic);
  if (kind == SolidKind::kBottom) {
    for (Complex& v : b.zeta_alpha) v += 1.0;
  }
  b.s_alpha.resize(zeta.size());
  for (std::size_t m = 0; m < zeta.size(); ++m) {
    b.s_alpha[m] = std::abs(b.zeta_alpha[m]);
    if (!(b.s_alpha[m] > 0.0)) throw ConfigError("boundary table has a degenerate node");
  }
  return b;
}

inline SolidBoundary read_boundary_table(SolidKind kind, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open boundary table " + path);
  ComplexGrid zeta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    Real a, re, im;
    if (!(row >> a >> re >> im)) throw ConfigError("malformed boundary table row: " + line);
    zeta.emplace_back(re, im);
  }
  if (zeta.size() < 4 || zeta.size() % 2 != 0) throw ConfigError("boundary table needs an even node count >= 4");
  return boundary_from_table(kind, zeta);
}

inline void write_boundary_table(const SolidBoundary& b, const std::string& path) {
  std::ofstream out(path);
  const RealGrid alpha = grid_nodes(b.n());
  out.precision(17);
  for (std::size_t m = 0; m < b.n(); ++m) {
    out << alpha[m] << " " << b.zeta[m].real() << " " << b.zeta[m].imag() << "\n";
  }
}

}  // namespace wavetank
