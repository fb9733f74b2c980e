// Periodic spectral operators on equispaced grids: differentiation, the
// Hilbert transform, |D|, mean-zero antidifferentiation, Fourier-truncation
// mollifiers and roundoff-noise filtering.
//
// The Nyquist bin (k = -N/2, N even) is zeroed by deriv, hilbert and lambda_op:
// an odd-order multiplier has no symmetric value there and keeping it produces
// asymmetric artifacts on real data.
#pragma once

#include <cmath>
#include <type_traits>
#include "wavetank/common.hpp"
#include "wavetank/fft.hpp"

namespace wavetank {

namespace detail {

template <typename F>
ComplexGrid apply_multiplier(const ComplexGrid& u, F&& mult) {
  ComplexGrid spec = fft_forward(u);
  const std::size_t n = spec.size();
  for (std::size_t j = 0; j < n; ++j) {
    const int k = bin_wavenumber(j, n);
    const bool nyquist = (n % 2 == 0) && (j == n / 2);
    spec[j] *= mult(k, nyquist);
  }
  return fft_inverse(spec);
}

template <typename F>
RealGrid apply_multiplier(const RealGrid& u, F&& mult) {
  return real_part(apply_multiplier(to_complex(u), mult));
}

}  // namespace detail

template <typename GridT>
GridT deriv(const GridT& u) {
  return detail::apply_multiplier(u, [](int k, bool nyq) {
    return nyq ? Complex(0.0, 0.0) : Complex(0.0, static_cast<Real>(k));
  });
}

// Fourier multiplier -i*sgn(k); annihilates the mean and the Nyquist bin.
template <typename GridT>
GridT hilbert(const GridT& u) {
  return detail::apply_multiplier(u, [](int k, bool nyq) {
    if (nyq || k == 0) return Complex(0.0, 0.0);
    return Complex(0.0, k > 0 ? -1.0 : 1.0);
  });
}

// |D|; identical to hilbert(deriv(u)) bin by bin.
template <typename GridT>
GridT lambda_op(const GridT& u) {
  return detail::apply_multiplier(u, [](int k, bool nyq) {
    return nyq ? Complex(0.0, 0.0) : Complex(std::abs(static_cast<Real>(k)), 0.0);
  });
}

template <typename GridT>
struct AntiderivResult {
  GridT value;  // unique mean-zero v with dv/dalpha = u - mean(u)
  decltype(mean(GridT{})) removed_mean;
};

// Inverts d/dalpha after removing the mean, which is reported so callers can
// track secular drift.
template <typename GridT>
AntiderivResult<GridT> antideriv_meanzero_full(const GridT& u) {
  AntiderivResult<GridT> out;
  out.removed_mean = mean(u);
  out.value = detail::apply_multiplier(u, [](int k, bool nyq) {
    if (nyq || k == 0) return Complex(0.0, 0.0);
    return 1.0 / Complex(0.0, static_cast<Real>(k));
  });
  return out;
}

template <typename GridT>
GridT antideriv_meanzero(const GridT& u) {
  return antideriv_meanzero_full(u).value;
}

// Sharp Fourier truncation: keeps modes with |k| <= 1/delta. Self-adjoint and
// commutes exactly with deriv/hilbert/lambda_op in the discrete spectrum.
template <typename GridT>
GridT mollify(const GridT& u, Real delta) {
  if (delta <= 0.0) throw ConfigError("mollifier delta must be positive");
  const Real cutoff = 1.0 / delta;
  return detail::apply_multiplier(u, [cutoff](int k, bool) {
    return std::abs(static_cast<Real>(k)) <= cutoff ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
  });
}

// Zeroes spectrum bins below a relative magnitude threshold. Standard control
// for roundoff-seeded growth at the grid scale; idempotent.
template <typename GridT>
GridT krasny_filter(const GridT& u, Real threshold) {
  if (threshold <= 0.0) throw ConfigError("filter threshold must be positive");
  ComplexGrid spec = fft_forward([&] {
    if constexpr (std::is_same_v<GridT, RealGrid>) return to_complex(u);
    else return u;
  }());
  Real peak = 0.0;
  for (const Complex& c : spec) peak = std::max(peak, std::abs(c));
  const Real floor = threshold * peak;
  for (Complex& c : spec) {
    if (std::abs(c) < floor) c = Complex(0.0, 0.0);
  }
  ComplexGrid v = fft_inverse(spec);
  if constexpr (std::is_same_v<GridT, RealGrid>) return real_part(v);
  else return v;
}

// Discrete Sobolev norm ||u||_{H^r}^2 = sum_k (1+k^2)^r |hat(u)_k|^2.
template <typename GridT>
Real sobolev_norm(const GridT& u, Real r) {
  ComplexGrid spec = fft_forward(u);
  Real s = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const int k = bin_wavenumber(j, spec.size());
    s += std::pow(1.0 + static_cast<Real>(k) * static_cast<Real>(k), r) * std::norm(spec[j]);
  }
  return std::sqrt(s);
}

}  // namespace wavetank
