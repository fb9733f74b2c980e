#include <cmath>
#include <functional>
#include "doctest.h"
#include "test_support.hpp"
#include "wavetank/kernels.hpp"
#include "wavetank/velocity.hpp"

using namespace wavetank;
using wavetank::testing::random_band_limited;

namespace {

// wavy periodic surface used by several oracles
ComplexGrid test_surface(std::size_t n, Real amplitude) {
  const RealGrid alpha = grid_nodes(n);
  ComplexGrid z(n);
  for (std::size_t m = 0; m < n; ++m) {
    z[m] = Complex(alpha[m] + 0.3 * amplitude * std::sin(alpha[m]),
                   amplitude * std::cos(alpha[m]) + 0.5 * amplitude * std::sin(2.0 * alpha[m]));
  }
  return z;
}

ComplexGrid grid_deriv_of_periodic_curve(const ComplexGrid& z) {
  const RealGrid alpha = grid_nodes(z.size());
  ComplexGrid p(z.size());
  for (std::size_t m = 0; m < z.size(); ++m) p[m] = z[m] - alpha[m];
  ComplexGrid d = deriv(p);
  for (Complex& v : d) v += 1.0;
  return d;
}

}  // namespace

TEST_CASE("Mittag-Leffler image sums converge to the cotangent kernel at O(1/J)") {
  // symmetric truncation of sum_j 1/(z + 2 pi j - w) approaches (1/2) cot((z-w)/2)
  const Complex z(0.7, 0.2), w(2.1, -0.4);
  const Complex exact = cot_kernel(z, w);
  Real prev = 0.0;
  for (int J : {8, 16, 32, 64}) {
    Complex sum(0.0, 0.0);
    for (int j = -J; j <= J; ++j) sum += 1.0 / (z + kTwoPi * static_cast<Real>(j) - w);
    const Real err = std::abs(sum - exact);
    if (prev > 0.0) {
      const Real ratio = prev / err;
      CHECK(ratio > 1.5);  // first-order decay: doubling J gains ~2x
      CHECK(ratio < 3.0);
    }
    prev = err;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("cotangent kernel saturates for large imaginary separation") {
  CHECK(std::abs(cot_kernel(Complex(0.0, 50.0), Complex(0.3, 0.0)) - Complex(0.0, -0.5)) < 1e-15);
  CHECK(std::abs(cot_kernel(Complex(0.0, -50.0), Complex(0.3, 0.0)) - Complex(0.0, 0.5)) < 1e-15);
  // the exponential form agrees with the saturation limit just under the switch
  CHECK(std::abs(cot_kernel(Complex(1.0, 35.0), Complex(0.0, 0.0)) - Complex(0.0, -0.5)) < 1e-14);
}

TEST_CASE("cotangent kernel antisymmetry and pole signalling") {
  const Complex z(1.3, 0.4), w(0.2, -0.1);
  CHECK(std::abs(cot_kernel(z, w) + cot_kernel(w, z)) < 1e-15);
  // exact coincidence underflows |sin((z-w)/2)| and must signal; a rounded
  // 2*pi image separation stays finite (huge) and is caught by the gates
  CHECK_THROWS_AS((void)cot_kernel(z, z), SingularEvaluationError);
  CHECK(std::isfinite(std::abs(cot_kernel(z + kTwoPi, z))));
}

TEST_CASE("Green identity over the full fluid boundary: 1 / 0.5 / 0") {
  const std::size_t n = 256;
  ComplexGrid surf = test_surface(n, 0.05);
  ComplexGrid surf_a = grid_deriv_of_periodic_curve(surf);
  std::vector<SolidBoundary> solids{flat_bottom(n, 1.0), circle_obstacle(n, Complex(kPi, -0.55), 0.25)};

  // interior targets
  for (Complex z : {Complex(1.0, -0.5), Complex(4.0, -0.4), Complex(2.2, -0.7)}) {
    CHECK(std::abs(kernel_identity(z, surf, surf_a, solids) - 1.0) < 1e-8);
  }
  // exterior targets: above the surface, below the bottom, inside the obstacle
  for (Complex z : {Complex(2.0, 0.8), Complex(0.5, -1.7), Complex(kPi, -0.55), Complex(kPi + 0.08, -0.5)}) {
    CHECK(std::abs(kernel_identity(z, surf, surf_a, solids)) < 1e-8);
  }
  // on-boundary targets with diagonal limits
  CHECK(std::abs(kernel_identity(surf[17], surf, surf_a, solids, 17) - 0.5) < 1e-6);
  CHECK(std::abs(kernel_identity(solids[0].zeta[40], surf, surf_a, solids, -1, 0, 40) - 0.5) < 1e-6);
  CHECK(std::abs(kernel_identity(solids[1].zeta[3], surf, surf_a, solids, -1, 1, 3) - 0.5) < 1e-6);
}

TEST_CASE("per-curve Gauss integrals split the cylinder flux") {
  const std::size_t n = 256;
  SolidBoundary bottom = flat_bottom(n, 1.0);
  SolidBoundary obst = circle_obstacle(n, Complex(2.0, -0.5), 0.2);

  // bottom alone: +1/2 above, -1/2 below (half the flux escapes each end)
  CHECK(gauss_integral(Complex(1.0, 0.3), bottom) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(gauss_integral(Complex(1.0, -2.5), bottom) == doctest::Approx(-0.5).epsilon(1e-10));
  // compact obstacle: -1 inside, 0 outside with the into-fluid normal
  CHECK(gauss_integral(Complex(2.0, -0.5), obst) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(gauss_integral(Complex(0.3, -0.5), obst)) < 1e-10);
}

TEST_CASE("removable-singularity diagonals match off-diagonal extrapolation") {
  // analytic curved bottom and circle; kernel values computed off-grid from
  // closed forms, Neville-extrapolated toward coincidence
  struct Curve {
    std::function<Complex(Real)> zeta, zeta_a, zeta_aa;
  };
  const Real depth = 0.8, amp = 0.12;
  Curve bottom{[=](Real a) { return Complex(a + 0.05 * std::sin(a), -depth + amp * std::cos(a)); },
               [=](Real a) { return Complex(1.0 + 0.05 * std::cos(a), -amp * std::sin(a)); },
               [=](Real a) { return Complex(-0.05 * std::sin(a), -amp * std::cos(a)); }};
  const Complex c0(2.0, -0.5);
  const Real r = 0.3;
  Curve circle{[=](Real a) { return c0 + r * std::exp(Complex(0.0, -a)); },
               [=](Real a) { return Complex(0.0, -r) * std::exp(Complex(0.0, -a)); },
               [=](Real a) { return Complex(-r, 0.0) * std::exp(Complex(0.0, -a)); }};

  for (const Curve& curve : {bottom, circle}) {
    for (Real a0 : {0.3, 2.2, 5.1}) {
      const Complex zt = curve.zeta(a0);
      const Complex za = curve.zeta_a(a0);
      const Real sa = std::abs(za);
      auto kernel_at = [&](Real ap) {
        const Complex zs = curve.zeta(ap);
        const Real ss = std::abs(curve.zeta_a(ap));
        return (Complex(0.0, 1.0) * ss * za * cot_half(zt - zs)).real() / (2.0 * sa);
      };
      // symmetric averages kill the odd orders; Neville in d^2
      const int levels = 6;
      std::vector<Real> hs(levels), vals(levels);
      const Real d0 = 4e-2;
      for (int l = 0; l < levels; ++l) {
        hs[l] = d0 / std::pow(2.0, l);
        vals[l] = 0.5 * (kernel_at(a0 + hs[l]) + kernel_at(a0 - hs[l]));
      }
      for (int k = 1; k < levels; ++k) {
        for (int l = levels - 1; l >= k; --l) {
          const Real h2a = hs[l - k] * hs[l - k], h2b = hs[l] * hs[l];
          vals[l] = (h2a * vals[l] - h2b * vals[l - 1]) / (h2a - h2b);
        }
      }
      // the analytic limit coded in solid_kernel: -theta_alpha/2
      const Real theta_a = (curve.zeta_aa(a0) / za).imag();
      CHECK(std::abs(vals[levels - 1] - (-0.5 * theta_a)) < 1e-10);
    }
  }
}

TEST_CASE("solid kernel matrices use the diagonal limit") {
  const std::size_t n = 128;
  SolidBoundary b = fourier_bottom(n, 0.8, {0.12});
  RealMatrix k = solid_kernel(b, b);
  RealGrid ta = boundary_theta_alpha(b);
  for (std::size_t m = 0; m < n; m += 17) CHECK(k(m, m) == doctest::Approx(-0.5 * ta[m]).epsilon(1e-12));

  // circle: constant diagonal at the curvature-limit value
  SolidBoundary c = circle_obstacle(n, Complex(2.0, -0.5), 0.3);
  RealMatrix kc = solid_kernel(c, c);
  for (std::size_t m = 1; m < n; ++m) CHECK(kc(m, m) == doctest::Approx(kc(0, 0)).epsilon(1e-10));
}

TEST_CASE("far-separation decay of the surface<-bottom kernel") {
  const std::size_t n = 64;
  ComplexGrid surf = test_surface(n, 0.05);
  Real prev = 1e9;
  for (Real depth : {2.0, 6.0, 12.0}) {
    SolidBoundary b = flat_bottom(n, depth);
    RealMatrix k = surface_kernel(b, surf);
    CHECK(k.max_abs() < prev);
    prev = k.max_abs();
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("K[zeta] vanishes identically on the flat surface") {
  const std::size_t n = 64;
  const RealGrid alpha = grid_nodes(n);
  ComplexGrid z(n);
  for (std::size_t m = 0; m < n; ++m) z[m] = alpha[m];
  KOperator kop(z, ComplexGrid(n, Complex(1.0, 0.0)));
  ComplexGrid f = to_complex(random_band_limited(n, 10, 3));
  CHECK(max_abs(kop.apply(f)) < 1e-13);
}

TEST_CASE("Hilbert + K decomposition reproduces the direct Birkhoff-Rott quadrature") {
  const std::size_t n = 128;
  ComplexGrid z = test_surface(n, 0.08);
  ComplexGrid za = grid_deriv_of_periodic_curve(z);
  KOperator kop(z, za);
  RealGrid gamma = random_band_limited(n, 6, 21, 0.8);

  KernelTables tables;
  tables.css = ComplexMatrix(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != m) tables.css(m, j) = cot_half(z[m] - z[j]);
    }
  }
  ComplexGrid direct = birkhoff_rott_direct(gamma, tables);
  ComplexGrid decomposed = birkhoff_rott_decomposed(gamma, za, kop);
  const Real scale = std::max(max_abs(direct), 1e-30);
  CHECK(wavetank::testing::max_diff(direct, decomposed) / scale < 1e-6);
}

TEST_CASE("K[zeta] output shrinks as the curve flattens") {
  const std::size_t n = 64;
  const RealGrid alpha = grid_nodes(n);
  RealGrid f(n);
  for (std::size_t m = 0; m < n; ++m) f[m] = std::cos(3.0 * alpha[m]);
  Real prev = 1e9;
  for (Real eps : {0.4, 0.2, 0.1, 0.05}) {
    ComplexGrid z = test_surface(n, eps);
    ComplexGrid za = grid_deriv_of_periodic_curve(z);
    KOperator kop(z, za);
    const Real norm = l2_norm(kop.apply(to_complex(f)));
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("surface kernel time derivative") {
  const std::size_t n = 96;
  ComplexGrid surf = test_surface(n, 0.07);
  SolidBoundary b = flat_bottom(n, 0.9);

  // zero motion gives the zero matrix
  RealMatrix k0 = surface_kernel_time_derivative(b, surf, ComplexGrid(n, Complex(0.0, 0.0)));
  CHECK(k0.max_abs() == 0.0);

  // finite differences in t of k_S under a prescribed motion, O(h^2)
  const RealGrid alpha = grid_nodes(n);
  ComplexGrid motion(n);
  for (std::size_t m = 0; m < n; ++m) motion[m] = Complex(0.2 * std::sin(alpha[m]), 0.1 * std::cos(alpha[m]));
  RealMatrix kt = surface_kernel_time_derivative(b, surf, motion);
  Real prev_err = 0.0;
  for (Real h : {2e-3, 1e-3}) {
    ComplexGrid zp(n), zm(n);
    for (std::size_t m = 0; m < n; ++m) {
      zp[m] = surf[m] + h * motion[m];
      zm[m] = surf[m] - h * motion[m];
    }
    RealMatrix kp = surface_kernel(b, zp), km = surface_kernel(b, zm);
    Real err = 0.0;
    for (std::size_t r = 0; r < n; r += 5) {
      for (std::size_t c = 0; c < n; c += 5) {
        err = std::max(err, std::abs((kp(r, c) - km(r, c)) / (2.0 * h) - kt(r, c)));
      }
    }
    if (prev_err > 0.0) CHECK(err < 0.3 * prev_err);  // ~4x per halving
    prev_err = err;
  }

  // rigid horizontal translation: zeta_t = 1
  RealMatrix kt1 = surface_kernel_time_derivative(b, surf, ComplexGrid(n, Complex(1.0, 0.0)));
  const std::size_t mm = 11, jj = 40;
  const Complex expected = b.zeta_alpha[mm] / (4.0 * b.s_alpha[mm]) * csc2_half(b.zeta[mm] - surf[jj]);
  CHECK(kt1(mm, jj) == doctest::Approx(expected.real()).epsilon(1e-12));
}

TEST_CASE("double layer jump relations on a closed obstacle") {
  const std::size_t n = 512;
  SolidBoundary c = circle_obstacle(n, Complex(kPi, -0.6), 0.5);

  // constant density: one-sided limits reproduce the 0 / -1 Green values
  {
    RealGrid one(n, 1.0);
    const Complex p = c.zeta[9] + 0.07 * c.normal(9);  // fluid side
    const Complex q = c.zeta[9] - 0.07 * c.normal(9);  // obstacle side
    CHECK(std::abs(double_layer(p, c, one)) < 1e-9);
    CHECK(double_layer(q, c, one) == doctest::Approx(-1.0).epsilon(1e-9));
  }

  // smooth density: Richardson-extrapolated limits match +-phi/2 + pv
  RealGrid phi(n);
  const RealGrid alpha = grid_nodes(n);
  for (std::size_t m = 0; m < n; ++m) phi[m] = std::cos(alpha[m]);
  JumpCheckResult res = jump_relation_check(phi, c, 0.2, 5);
  CHECK(res.u_plus_error < 1e-4);
  CHECK(res.u_minus_error < 1e-4);
  CHECK(res.convergence_order >= 0.9);
}

TEST_CASE("trapezoid quadrature of the nonsingular kernels converges spectrally") {
  // fixed physical target; the error should at least square per doubling
  auto y_at_target = [](std::size_t n) {
    SolidBoundary b = fourier_bottom(n, 0.35, {0.08});
    RealGrid dens(n);
    const RealGrid alpha = grid_nodes(n);
    for (std::size_t m = 0; m < n; ++m) dens[m] = 1.0 + 0.5 * std::cos(2.0 * alpha[m]);
    Complex acc(0.0, 0.0);
    const Complex target(0.37, 0.05);
    for (std::size_t j = 0; j < n; ++j) {
      acc += dens[j] * b.s_alpha[j] * cot_half(target - b.zeta[j]);
    }
    return acc * (kTwoPi / static_cast<Real>(n)) / (4.0 * kPi);
  };
  const Complex ref = y_at_target(1024);
  const Real e1 = std::abs(y_at_target(32) - ref);
  const Real e2 = std::abs(y_at_target(64) - ref);
  CHECK(e2 < e1 * e1 * 10.0 + 1e-14);
  CHECK(e2 < 1e-6);
}

TEST_CASE("named six-kernel assembly matches the generic builders") {
  const std::size_t n = 64;
  ComplexGrid surf = test_surface(n, 0.05);
  SolidBoundary bottom = fourier_bottom(n, 1.0, {0.08});
  SolidBoundary obst = circle_obstacle(n, Complex(kPi, -0.55), 0.2);

  BoundaryKernels k = boundary_kernels(surf, bottom, obst);
  CHECK(k.k_s1.rows() == n);
  CHECK(k.k_b2.rows() == n);
  RealMatrix ref = solid_kernel(bottom, obst);
  for (std::size_t m = 0; m < n; m += 11) {
    for (std::size_t j = 0; j < n; j += 7) CHECK(k.k_c1(m, j) == ref(m, j));
  }
  // diagonals of the two self kernels carry the removable limits
  RealGrid tb = boundary_theta_alpha(bottom);
  CHECK(k.k_b1(5, 5) == doctest::Approx(-0.5 * tb[5]));

  ComplexGrid motion(n, Complex(0.3, -0.1));
  BoundaryKernelRates kr = kernel_time_derivatives(surf, bottom, obst, motion);
  RealMatrix ref_t = surface_kernel_time_derivative(obst, surf, motion);
  CHECK(kr.k_st2(3, 9) == ref_t(3, 9));
}
