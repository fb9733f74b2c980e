// Minimal dense row-major matrix used for kernel tables and the Fredholm
// system at desk scale.
#pragma once

#include <cstddef>
#include <vector>
#include "wavetank/common.hpp"

namespace wavetank {

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  std::vector<T> apply(const std::vector<T>& x) const {
    std::vector<T> y(rows_, T{});
    for (std::size_t r = 0; r < rows_; ++r) {
      T s{};
      const T* row = &a_[r * cols_];
      for (std::size_t c = 0; c < cols_; ++c) s += row[c] * x[c];
      y[r] = s;
    }
    return y;
  }

  Real max_abs() const {
    Real m = 0.0;
    for (const T& v : a_) m = std::max(m, static_cast<Real>(std::abs(v)));
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> a_;
};

using RealMatrix = Matrix<Real>;
using ComplexMatrix = Matrix<Complex>;

// y = A x for a real matrix applied to a real grid.
inline RealGrid apply(const RealMatrix& m, const RealGrid& x) { return m.apply(x); }
inline ComplexGrid apply(const ComplexMatrix& m, const ComplexGrid& x) { return m.apply(x); }

}  // namespace wavetank
