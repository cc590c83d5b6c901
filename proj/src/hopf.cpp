#include "gmdde/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gmdde {

namespace {
constexpr double kB1ZeroThreshold = 1e-12;
constexpr int kBranchCap = 10000;
}  // namespace

OmegaRoots omega_quadratic(const LinearData& lin) {
  const double b0 = lin.b0, b1 = lin.b1, b2 = lin.b2;
  OmegaRoots r;
  r.delta = b1 * b1 * (b1 * b1 - 4.0 * b0) + 4.0 * b2 * b2;
  // delta = b1^2 (b1-2)^2 + 4 b2^2 >= 0; clamp roundoff before the sqrt.
  const double sq = std::sqrt(std::max(0.0, r.delta));
  r.omega_plus = (-b1 * b1 + sq) / (2.0 * b2);
  r.omega_minus = (-b1 * b1 - sq) / (2.0 * b2);
  return r;
}

std::vector<HopfPoint> hopf_points(const LinearData& lin, double gamma_max) {
  if (!(gamma_max > 0.0)) throw ConfigError("hopf: gamma_max must be positive");
  if (!(lin.b2 > 0.0)) throw CaseViolation("hopf: b2 must be positive");
  std::vector<HopfPoint> out;

  if (std::abs(lin.b1) < kB1ZeroThreshold) {
    if (!(lin.b2 > 1.0))
      throw CaseViolation("hopf: b1 = 0 requires b2 > 1");
    const double root = std::sqrt(lin.b2 - 1.0);
    for (int k = 1; k <= kBranchCap; ++k) {
      const double omega = k * std::numbers::pi / lin.tau;
      const double gamma = omega / root;
      if (gamma > gamma_max) break;
      HopfPoint hp;
      hp.gamma0 = gamma;
      hp.omega0 = omega;
      hp.branch_index = k - 1;
      hp.case_ = HopfCase::B1Zero;
      hp.omega_plus = 1.0;
      out.push_back(hp);
      if (k == kBranchCap)
        throw ConfigError("hopf: more than 10^4 Hopf points below gamma_max");
    }
    return out;
  }

  if (!(lin.b0 * lin.b0 - lin.b2 * lin.b2 < 0.0))
    throw CaseViolation("hopf: requires b0^2 < b2^2 when b1 != 0");

  const OmegaRoots q = omega_quadratic(lin);
  // b0^2 < b2^2 pins Omega_plus inside [-1, 1] and Omega_minus outside.
  const double cos_val = std::clamp(q.omega_plus, -1.0, 1.0);
  const double theta = std::acos(cos_val);
  const double theta_eff =
      lin.b1 > 0.0 ? theta : 2.0 * std::numbers::pi - theta;
  const double s = std::sin(theta_eff);
  if (std::abs(s) < 1e-14)
    throw CaseViolation("hopf: degenerate crossing, sin(2 tau omega) = 0");

  for (int j = 0; j <= kBranchCap; ++j) {
    const double omega = (theta_eff + 2.0 * std::numbers::pi * j) / (2.0 * lin.tau);
    const double gamma = lin.b1 * omega / (lin.b2 * s);
    if (gamma > gamma_max) break;
    HopfPoint hp;
    hp.gamma0 = gamma;
    hp.omega0 = omega;
    hp.branch_index = j;
    hp.case_ = HopfCase::B1Nonzero;
    hp.omega_plus = cos_val;
    out.push_back(hp);
    if (j == kBranchCap)
      throw ConfigError("hopf: more than 10^4 Hopf points below gamma_max");
  }
  return out;
}

double transversality(const LinearData& lin, const HopfPoint& hp) {
  const double g = hp.gamma0, w = hp.omega0, t = lin.tau;
  const double b0 = lin.b0, b1 = lin.b1;
  const double num =
      4.0 * t * g * w * w * w * w +
      2.0 * t * g * g * g * w * w * (b1 * b1 - 2.0 * b0);
  const double x = g * g * b1 - 2.0 * g * t * w * w + 2.0 * g * g * g * t * b0;
  const double y = 2.0 * g * w + 2.0 * g * g * t * b1 * w;
  const double den = x * x + y * y;
  if (!(den > 1e-300)) throw DenominatorZero("hopf: transversality denominator");
  return num / den;
}

NonresonanceReport certify(const LinearData& lin, HopfPoint& hp, int n_max) {
  if (n_max < 2) throw ConfigError("hopf: n_max must be at least 2");
  NonresonanceReport rep;
  rep.n_max = n_max;

  const Complex i_omega(0.0, hp.omega0);
  rep.char_residual = std::abs(char_value(lin, i_omega, hp.gamma0));

  // M_lambda = 2 lambda + gamma b1 - 2 tau gamma^2 b2 e^{-2 tau lambda}
  const Complex dM = 2.0 * i_omega + hp.gamma0 * lin.b1 -
                     2.0 * lin.tau * hp.gamma0 * hp.gamma0 * lin.b2 *
                         std::exp(-2.0 * lin.tau * i_omega);
  rep.dM_dlambda_abs = std::abs(dM);

  rep.min_abs_det = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= n_max; ++n) {
    const Complex lam(0.0, n * hp.omega0);
    const double d = std::abs(delta_matrix(lin, lam, hp.gamma0).determinant());
    if (d < rep.min_abs_det) {
      rep.min_abs_det = d;
      rep.argmin_n = n;
    }
  }

  hp.transversality = transversality(lin, hp);
  hp.certified.char_residual_ok = rep.char_residual < 1e-9;
  hp.certified.simple_root = rep.dM_dlambda_abs > 1e-8;
  hp.certified.nonresonant = rep.min_abs_det > 1e-8;
  return rep;
}

}  // namespace gmdde
