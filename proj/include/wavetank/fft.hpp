// Discrete Fourier transforms on equispaced periodic grids.
//
// Forward transform is normalized: hat(u)_k = (1/N) sum_m u_m exp(-i k alpha_m),
// so u_m = sum_k hat(u)_k exp(+i k alpha_m). Spectrum is stored in standard FFT
// index order: bin j holds wavenumber k = j for j < N/2 and k = j - N otherwise.
#pragma once

#include <cstddef>
#include "wavetank/common.hpp"

namespace wavetank {

// Signed wavenumber held by spectrum bin j of an N-point transform.
inline int bin_wavenumber(std::size_t j, std::size_t n) {
  return (j < n / 2 + (n % 2)) ? static_cast<int>(j) : static_cast<int>(j) - static_cast<int>(n);
}

namespace detail {

// In-place iterative radix-2 transform, sign = -1 forward / +1 inverse.
inline void fft_pow2(ComplexGrid& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const Real ang = sign * kTwoPi / static_cast<Real>(len);
    const Complex wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        Complex u = a[i + j];
        Complex v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Direct O(N^2) transform for sizes that are not powers of two, using a
// precomputed root table indexed by j*m mod N. Grids at desk scale (N <= 512)
// keep this affordable; it shares the exact conventions above.
inline ComplexGrid dft_direct(const ComplexGrid& u, int sign) {
  const std::size_t n = u.size();
  ComplexGrid roots(n);
  for (std::size_t r = 0; r < n; ++r) {
    const Real ang = sign * kTwoPi * static_cast<Real>(r) / static_cast<Real>(n);
    roots[r] = Complex(std::cos(ang), std::sin(ang));
  }
  ComplexGrid out(n, Complex(0.0, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    Complex s(0.0, 0.0);
    std::size_t idx = 0;
    for (std::size_t m = 0; m < n; ++m) {
      s += u[m] * roots[idx];
      idx += j;
      if (idx >= n) idx -= n;
    }
    out[j] = s;
  }
  return out;
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace detail

inline ComplexGrid fft_forward(const ComplexGrid& u) {
  ComplexGrid a = u;
  if (detail::is_pow2(a.size())) {
    detail::fft_pow2(a, -1);
  } else {
    a = detail::dft_direct(u, -1);
  }
  const Real inv = 1.0 / static_cast<Real>(a.size());
  for (Complex& c : a) c *= inv;
  return a;
}

inline ComplexGrid fft_inverse(const ComplexGrid& spec) {
  ComplexGrid a = spec;
  if (detail::is_pow2(a.size())) {
    detail::fft_pow2(a, +1);
  } else {
    a = detail::dft_direct(spec, +1);
  }
  return a;
}

inline ComplexGrid fft_forward(const RealGrid& u) { return fft_forward(to_complex(u)); }

}  // namespace wavetank
