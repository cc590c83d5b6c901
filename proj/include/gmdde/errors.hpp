#pragma once

#include <stdexcept>
#include <string>

namespace gmdde {

// Base of all numerical/domain failures. The CLI maps any Error to exit
// code 3; bad configuration (ConfigError) maps to exit code 2 instead.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Equilibrium cubic has no strictly positive real root.
struct NoPositiveRoot : Error {
  using Error::Error;
};

// Parameter combination leaves the analyzed instability case: requires
// b0^2 - b2^2 < 0 when b1 != 0, or b2 > 1 when b1 == 0.
struct CaseViolation : Error {
  using Error::Error;
};

// Transversality denominator vanished to machine precision.
struct DenominatorZero : Error {
  using Error::Error;
};

// |det Delta(n i omega0, gamma0)| fell below tolerance for some 2 <= n <= n_max.
struct ResonanceDetected : Error {
  int n;
  ResonanceDetected(int n_, const std::string& what) : Error(what), n(n_) {}
};

// The 2x2 real solvability system is numerically singular.
struct SingularC : Error {
  using Error::Error;
};

struct OrderOverflow : Error {
  using Error::Error;
};

// Truncated frequency series evaluated to omega <= 0; the requested epsilon
// is outside the validity range of the expansion.
struct NonpositiveFrequency : Error {
  using Error::Error;
};

struct MeshTooCoarse : Error {
  using Error::Error;
};

struct DegenerateGuess : Error {
  using Error::Error;
};

struct SingularJacobian : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  int iterations;
  double residual;
  NoConvergence(int it, double res, const std::string& what)
      : Error(what), iterations(it), residual(res) {}
};

// Delayed activator/inhibitor state hit the singular set of the kinetics.
struct PoleEncountered : Error {
  double t;
  PoleEncountered(double t_, const std::string& what) : Error(what), t(t_) {}
};

struct HistoryTooShort : Error {
  using Error::Error;
};

}  // namespace gmdde
