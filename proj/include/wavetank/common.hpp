// Shared aliases, constants and error types for the periodic wave tank.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavetank {

using Real = double;
using Complex = std::complex<double>;

// Samples of a 2*pi-periodic function at alpha_m = 2*pi*m/N.
using RealGrid = std::vector<Real>;
using ComplexGrid = std::vector<Complex>;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;
inline constexpr Real kTwoPi = 2.0 * kPi;

// Base class for every failure the solver can signal.
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

// Kernel evaluation hit a (near-)coincident target/source pair.
class SingularEvaluationError : public SimulationError {
 public:
  explicit SingularEvaluationError(const std::string& what) : SimulationError("singular evaluation: " + what) {}
};

// Chord-arc constant fell below the configured floor (pinch / self-intersection).
class ChordArcError : public SimulationError {
 public:
  explicit ChordArcError(const std::string& what) : SimulationError("chord-arc: " + what) {}
};

class ClearanceError : public SimulationError {
 public:
  explicit ClearanceError(const std::string& what) : SimulationError("clearance: " + what) {}
};

class EnergyCeilingError : public SimulationError {
 public:
  explicit EnergyCeilingError(const std::string& what) : SimulationError("energy ceiling: " + what) {}
};

class SolverError : public SimulationError {
 public:
  explicit SolverError(const std::string& what) : SimulationError("solver: " + what) {}
};

class ConfigError : public SimulationError {
 public:
  explicit ConfigError(const std::string& what) : SimulationError("config: " + what) {}
};

inline RealGrid grid_nodes(std::size_t n) {
  RealGrid alpha(n);
  for (std::size_t m = 0; m < n; ++m) alpha[m] = kTwoPi * static_cast<Real>(m) / static_cast<Real>(n);
  return alpha;
}

inline Real mean(const RealGrid& u) {
  Real s = 0.0;
  for (Real v : u) s += v;
  return s / static_cast<Real>(u.size());
}

inline Complex mean(const ComplexGrid& u) {
  Complex s = 0.0;
  for (Complex v : u) s += v;
  return s / static_cast<Real>(u.size());
}

// Trapezoid rule over one period; exact weight 2*pi/N on equispaced nodes.
inline Real integrate(const RealGrid& u) { return kTwoPi * mean(u); }
inline Complex integrate(const ComplexGrid& u) { return kTwoPi * mean(u); }

// Discrete L^2(T) norm, ||u||^2 = int |u|^2 d(alpha) by trapezoid.
inline Real l2_norm(const RealGrid& u) {
  Real s = 0.0;
  for (Real v : u) s += v * v;
  return std::sqrt(kTwoPi * s / static_cast<Real>(u.size()));
}

inline Real l2_norm(const ComplexGrid& u) {
  Real s = 0.0;
  for (Complex v : u) s += std::norm(v);
  return std::sqrt(kTwoPi * s / static_cast<Real>(u.size()));
}

inline Real max_abs(const RealGrid& u) {
  Real s = 0.0;
  for (Real v : u) s = std::max(s, std::abs(v));
  return s;
}

inline Real max_abs(const ComplexGrid& u) {
  Real s = 0.0;
  for (Complex v : u) s = std::max(s, std::abs(v));
  return s;
}

inline ComplexGrid to_complex(const RealGrid& u) {
  ComplexGrid w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i];
  return w;
}

inline RealGrid real_part(const ComplexGrid& u) {
  RealGrid w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i].real();
  return w;
}

inline RealGrid imag_part(const ComplexGrid& u) {
  RealGrid w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i].imag();
  return w;
}

}  // namespace wavetank
