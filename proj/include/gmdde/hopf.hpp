#pragma once

#include <vector>

#include "gmdde/model.hpp"

namespace gmdde {

// Which branch of the delay-window analysis produced a Hopf point.  The
// characteristic function M(i omega, gamma) = 0 splits on b1: for b1 != 0 the
// crossing frequencies come from a quadratic in Omega = cos(2 tau omega), for
// b1 == 0 they sit at the resonant lattice omega = k pi / tau.
enum class HopfCase { B1Nonzero, B1Zero };

// Roots of  b2^2 Omega^2 + b1^2 b2 Omega + (b0 b1^2 - b2^2) = 0.
// delta is the reduced discriminant b1^2 (b1^2 - 4 b0) + 4 b2^2; with
// b0 = b1 - 1 it equals b1^2 (b1 - 2)^2 + 4 b2^2 and is never negative.
struct OmegaRoots {
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double delta = 0.0;
};

OmegaRoots omega_quadratic(const LinearData& lin);

// One purely imaginary root crossing.  transversality and the certified
// block are filled in by transversality() / certify(); hopf_points() leaves
// them at their defaults.
struct HopfPoint {
  double gamma0 = 0.0;
  double omega0 = 0.0;
  int branch_index = 0;   // j >= 0 within the enumerated family
  HopfCase case_ = HopfCase::B1Nonzero;
  double omega_plus = 1.0;  // cos(2 tau omega0)
  double transversality = 0.0;
  struct {
    bool simple_root = false;
    bool nonresonant = false;
    bool char_residual_ok = false;
  } certified;
};

// All Hopf points with 0 < gamma0 <= gamma_max, ordered by gamma0.
//
// b1 != 0 (|b1| >= 1e-12): requires b0^2 - b2^2 < 0, else CaseViolation.
//   With theta = arccos(Omega_plus) and theta_eff = theta (b1 > 0) or
//   2 pi - theta (b1 < 0), the family is
//     omega_j = (theta_eff + 2 pi j) / (2 tau),
//     gamma_j = b1 omega_j / (b2 sin(theta_eff)),   j = 0, 1, ...
//   theta_eff keeps sign(sin(2 omega_j tau)) = sign(b1), so every gamma_j > 0.
//
// b1 == 0: then b0 = -1; requires b2 > 1, else CaseViolation.  Family is
//   omega_k = k pi / tau, gamma_k = k pi / (tau sqrt(b2 - 1)), k = 1, 2, ...,
//   stored with branch_index j = k - 1 and omega_plus = 1 (cos(2 tau omega) = 1).
std::vector<HopfPoint> hopf_points(const LinearData& lin, double gamma_max);

// Re(d lambda / d gamma) at the crossing, from the closed-form quotient of
// M-partials evaluated on the root.  Throws DenominatorZero if |M_lambda|^2
// underflows.  Always positive in the admissible cases (the numerator is
// 4 tau gamma0 omega0^4 + 2 tau gamma0^3 omega0^2 ((b1-1)^2 + 1)).
double transversality(const LinearData& lin, const HopfPoint& hp);

struct NonresonanceReport {
  int n_max = 0;
  double min_abs_det = 0.0;  // min over 2 <= n <= n_max of |det Delta(n i omega0)|
  int argmin_n = 0;
  double dM_dlambda_abs = 0.0;  // |M_lambda(i omega0, gamma0)|
  double char_residual = 0.0;   // |M(i omega0, gamma0)|
};

// Fills hp.transversality and hp.certified:
//   char_residual_ok:  |M(i omega0, gamma0)| < 1e-9
//   simple_root:       |M_lambda(i omega0, gamma0)| > 1e-8
//   nonresonant:       min_{2<=n<=n_max} |det Delta(n i omega0, gamma0)| > 1e-8
// Conjugate symmetry covers negative n.  Flags are reported, not thrown;
// downstream expansion code refuses to divide through a near-resonant mode.
NonresonanceReport certify(const LinearData& lin, HopfPoint& hp, int n_max);

}  // namespace gmdde
