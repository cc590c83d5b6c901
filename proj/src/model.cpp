#include "gmdde/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gmdde {

void ModelParams::validate() const {
  if (!(b > 0.0)) throw ConfigError("model: b must be positive");
  if (!(s0 > 0.0)) throw ConfigError("model: s0 must be positive");
  if (!(a >= 0.0)) throw ConfigError("model: a must be nonnegative");
  if (!(c >= 0.0)) throw ConfigError("model: c must be nonnegative");
}

double cubic_residual(const ModelParams& p, double u) {
  // monic form u^3 - ((1+a)/b) u^2 + c u - a c / b
  return ((u - (1.0 + p.a) / p.b) * u + p.c) * u - p.a * p.c / p.b;
}

namespace {

double cubic_derivative(const ModelParams& p, double u) {
  return (3.0 * u - 2.0 * (1.0 + p.a) / p.b) * u + p.c;
}

// Real roots of the monic cubic u^3 + A u^2 + B u + C.  The discriminant-zero
// boundary is resolved toward the trig (three-root) branch so double roots
// come back twice; callers dedupe after polishing.
std::vector<double> cubic_real_roots(double A, double B, double C) {
  const double p = B - A * A / 3.0;
  const double q = 2.0 * A * A * A / 27.0 - A * B / 3.0 + C;
  const double shift = -A / 3.0;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  const double scale = std::max({1.0, std::abs(p) * std::abs(p) * std::abs(p),
                                 q * q});
  std::vector<double> roots;
  if (disc > -1e-12 * scale && p < 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = 3.0 * q / (p * m);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg);
    for (int k = 0; k < 3; ++k) {
      roots.push_back(shift +
                      m * std::cos((theta - 2.0 * std::numbers::pi * k) / 3.0));
    }
  } else {
    const double half_q = q / 2.0;
    const double rad = std::sqrt(std::max(0.0, half_q * half_q + p * p * p / 27.0));
    const double t = std::cbrt(-half_q + rad) + std::cbrt(-half_q - rad);
    roots.push_back(shift + t);
  }
  return roots;
}

}  // namespace

std::vector<Equilibrium> solve_equilibria(const ModelParams& p) {
  p.validate();
  const double A = -(1.0 + p.a) / p.b;
  const double B = p.c;
  const double C = -p.a * p.c / p.b;
  std::vector<double> roots = cubic_real_roots(A, B, C);

  // Newton polish; skipped where f' vanishes (double roots, e.g. u = 0 at c = 0).
  for (double& u : roots) {
    for (int it = 0; it < 30; ++it) {
      const double f = cubic_residual(p, u);
      const double fp = cubic_derivative(p, u);
      if (std::abs(fp) < 1e-10 * std::max(1.0, u * u)) break;
      const double step = f / fp;
      u -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(u))) break;
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<Equilibrium> out;
  for (double u : roots) {
    if (!(u > 1e-12)) continue;
    if (!out.empty() && std::abs(u - out.back().u0) < 1e-8 * std::max(1.0, u))
      continue;
    out.push_back({u, u * u + p.c});
  }
  if (out.empty()) throw NoPositiveRoot("model: no strictly positive equilibrium");
  return out;
}

LinearData linearize(const ModelParams& p, const Equilibrium& eq) {
  LinearData lin;
  lin.u0 = eq.u0;
  lin.v0 = eq.v0;
  lin.s0 = p.s0;
  lin.b0 = p.b - 2.0 * eq.u0 / eq.v0;
  lin.b1 = lin.b0 + 1.0;
  lin.b2 = 2.0 * eq.u0 * eq.u0 * eq.u0 / (eq.v0 * eq.v0);
  lin.tau = (p.s0 + 1.0) / 2.0;
  lin.A << -lin.b0, 0.0, 0.0, -1.0;
  lin.B1 << 0.0, 0.0, 2.0 * eq.u0, 0.0;
  lin.B2 << 0.0, -eq.u0 * eq.u0 / (eq.v0 * eq.v0), 0.0, 0.0;
  return lin;
}

Eigen::Matrix2cd delta_matrix(const LinearData& lin, Complex lambda, double gamma) {
  return delta_tilde(lin, lambda, gamma, lambda);
}

Eigen::Matrix2cd delta_tilde(const LinearData& lin, Complex lambda, double gamma,
                             Complex z) {
  const Complex e1 = std::exp(-z);
  const Complex e2 = std::exp(-z * lin.s0);
  Eigen::Matrix2cd m = -gamma * (lin.A.cast<Complex>() + e1 * lin.B1.cast<Complex>() +
                                 e2 * lin.B2.cast<Complex>());
  m(0, 0) += lambda;
  m(1, 1) += lambda;
  return m;
}

Complex char_value(const LinearData& lin, Complex lambda, double gamma) {
  return lambda * lambda + gamma * lin.b1 * lambda + gamma * gamma * lin.b0 +
         gamma * gamma * lin.b2 * std::exp(-2.0 * lin.tau * lambda);
}

Eigen::Vector2d rhs(const ModelParams& p, const Equilibrium& eq,
                    const Eigen::Vector2d& x, const Eigen::Vector2d& x_lag1,
                    const Eigen::Vector2d& x_lag_s0) {
  const double u = x[0] + eq.u0;
  const double vd = x_lag_s0[1] + eq.v0;
  const double ud = x_lag1[0] + eq.u0;
  Eigen::Vector2d f;
  f[0] = u * u / vd - p.b * u + p.a;
  f[1] = ud * ud - (x[1] + eq.v0) + p.c;
  return f;
}

RhsJacobians rhs_jacobians(const ModelParams& p, const Equilibrium& eq,
                           const Eigen::Vector2d& x, const Eigen::Vector2d& x_lag1,
                           const Eigen::Vector2d& x_lag_s0) {
  const double u = x[0] + eq.u0;
  const double vd = x_lag_s0[1] + eq.v0;
  const double ud = x_lag1[0] + eq.u0;
  RhsJacobians j;
  j.dx << 2.0 * u / vd - p.b, 0.0, 0.0, -1.0;
  j.dlag1 << 0.0, 0.0, 2.0 * ud, 0.0;
  j.dlag_s0 << 0.0, -u * u / (vd * vd), 0.0, 0.0;
  return j;
}

}  // namespace gmdde
