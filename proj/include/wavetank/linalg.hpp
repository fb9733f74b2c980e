// Dense LU with partial pivoting, iterative refinement and a 1-norm condition
// estimate. Sized for desk-scale Fredholm systems (dimension a few hundred).
#pragma once

#include <cmath>
#include <numeric>
#include <vector>
#include "wavetank/common.hpp"
#include "wavetank/matrix.hpp"

namespace wavetank {

class LuFactorization {
 public:
  explicit LuFactorization(RealMatrix a) : lu_(std::move(a)), piv_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw SolverError("LU needs a square matrix");
    std::iota(piv_.begin(), piv_.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      Real best = std::abs(lu_(k, k));
      for (std::size_t r = k + 1; r < n; ++r) {
        const Real v = std::abs(lu_(r, k));
        if (v > best) {
          best = v;
          p = r;
        }
      }
      if (best == 0.0) throw SolverError("matrix numerically singular");
      if (p != k) {
        for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(p, c));
        std::swap(piv_[k], piv_[p]);
      }
      const Real inv = 1.0 / lu_(k, k);
      for (std::size_t r = k + 1; r < n; ++r) {
        const Real f = lu_(r, k) * inv;
        lu_(r, k) = f;
        if (f == 0.0) continue;
        for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
      }
    }
  }

  std::vector<Real> solve(const std::vector<Real>& b) const {
    const std::size_t n = lu_.rows();
    std::vector<Real> x(n);
    for (std::size_t r = 0; r < n; ++r) x[r] = b[piv_[r]];
    for (std::size_t r = 1; r < n; ++r) {
      Real s = x[r];
      for (std::size_t c = 0; c < r; ++c) s -= lu_(r, c) * x[c];
      x[r] = s;
    }
    for (std::size_t ri = n; ri-- > 0;) {
      Real s = x[ri];
      for (std::size_t c = ri + 1; c < n; ++c) s -= lu_(ri, c) * x[c];
      x[ri] = s / lu_(ri, ri);
    }
    return x;
  }

  // Solves A^T x = b, needed by the condition estimator.
  std::vector<Real> solve_transposed(const std::vector<Real>& b) const {
    const std::size_t n = lu_.rows();
    std::vector<Real> x = b;
    for (std::size_t r = 0; r < n; ++r) {
      Real s = x[r];
      for (std::size_t c = 0; c < r; ++c) s -= lu_(c, r) * x[c];
      x[r] = s / lu_(r, r);
    }
    for (std::size_t ri = n; ri-- > 0;) {
      Real s = x[ri];
      for (std::size_t c = ri + 1; c < n; ++c) s -= lu_(c, ri) * x[c];
      x[ri] = s;
    }
    std::vector<Real> out(n);
    for (std::size_t r = 0; r < n; ++r) out[piv_[r]] = x[r];
    return out;
  }

 private:
  RealMatrix lu_;
  std::vector<std::size_t> piv_;
};

inline Real one_norm(const RealMatrix& a) {
  Real best = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    Real s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += std::abs(a(r, c));
    best = std::max(best, s);
  }
  return best;
}

// Hager's estimator for ||A^{-1}||_1 using a handful of solves.
inline Real inverse_one_norm_estimate(const LuFactorization& lu, std::size_t n) {
  std::vector<Real> x(n, 1.0 / static_cast<Real>(n));
  Real est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    std::vector<Real> y = lu.solve(x);
    Real norm1 = 0.0;
    for (Real v : y) norm1 += std::abs(v);
    std::vector<Real> xi(n);
    for (std::size_t i = 0; i < n; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
    std::vector<Real> z = lu.solve_transposed(xi);
    std::size_t jmax = 0;
    Real zmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(z[i]) > zmax) {
        zmax = std::abs(z[i]);
        jmax = i;
      }
    }
    est = std::max(est, norm1);
    Real zx = 0.0;
    for (std::size_t i = 0; i < n; ++i) zx += z[i] * x[i];
    if (zmax <= zx) break;
    x.assign(n, 0.0);
    x[jmax] = 1.0;
  }
  return est;
}

struct LinearSolveReport {
  std::vector<Real> x;
  Real relative_residual = 0.0;
  Real condition_estimate = 0.0;
};

// Direct solve with one step of iterative refinement; reports the true
// relative residual and a 1-norm condition estimate.
inline LinearSolveReport solve_dense(const RealMatrix& a, const std::vector<Real>& b) {
  const std::size_t n = a.rows();
  LuFactorization lu(a);
  std::vector<Real> x = lu.solve(b);

  auto residual = [&](const std::vector<Real>& xv) {
    std::vector<Real> r = b;
    for (std::size_t i = 0; i < n; ++i) {
      Real s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * xv[j];
      r[i] -= s;
    }
    return r;
  };

  std::vector<Real> r = residual(x);
  std::vector<Real> dx = lu.solve(r);
  for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
  r = residual(x);

  Real rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rn += r[i] * r[i];
    bn += b[i] * b[i];
  }
  LinearSolveReport out;
  out.x = std::move(x);
  out.relative_residual = (bn > 0.0) ? std::sqrt(rn / bn) : std::sqrt(rn);
  out.condition_estimate = one_norm(a) * inverse_one_norm_estimate(lu, n);
  return out;
}

}  // namespace wavetank
