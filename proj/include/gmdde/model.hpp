#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "gmdde/errors.hpp"

namespace gmdde {

using Complex = std::complex<double>;

// Two-delay activator-inhibitor kinetics
//   u'(t) = gamma [ u(t)^2 / v(t - s0) - b u(t) + a ]
//   v'(t) = gamma [ u(t - 1)^2 - v(t) + c ]
// after centering at a positive equilibrium (u0, v0).  Delays are already
// rescaled so the activator delay is exactly 1 and the inhibitor delay s0
// is measured in the same unit.
struct ModelParams {
  double a = 0.1;
  double b = 1.0;
  double c = 0.0;
  double s0 = 1.5;

  // Throws ConfigError on parameters outside the admissible region
  // (b, s0 must be positive; a, c nonnegative).
  void validate() const;
};

struct Equilibrium {
  double u0 = 0.0;
  double v0 = 0.0;  // always u0^2 + c
};

// Residual of the equilibrium cubic  b u^3 - (1+a) u^2 + b c u - a c.
double cubic_residual(const ModelParams& p, double u);

// All strictly positive equilibria, ascending in u0.  Roots are obtained in
// closed form and polished by Newton; throws NoPositiveRoot if none exist.
std::vector<Equilibrium> solve_equilibria(const ModelParams& p);

// Variational data at an equilibrium.  The linearized system is
//   x'(t) = gamma [ A x(t) + B1 x(t-1) + B2 x(t-s0) ],
// and the reduced characteristic function uses only the scalars
//   b0 = b - 2 u0 / v0,  b1 = b0 + 1,  b2 = 2 u0^3 / v0^2,  tau = (s0+1)/2.
// b1 - b0 == 1 holds exactly (b1 is computed as b0 + 1).
struct LinearData {
  Eigen::Matrix2d A;
  Eigen::Matrix2d B1;
  Eigen::Matrix2d B2;
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double tau = 0.0;
  double s0 = 0.0;
  double u0 = 0.0;
  double v0 = 0.0;
};

LinearData linearize(const ModelParams& p, const Equilibrium& eq);

// Delta(lambda, gamma) = lambda I - gamma (A + e^{-lambda} B1 + e^{-lambda s0} B2).
Eigen::Matrix2cd delta_matrix(const LinearData& lin, Complex lambda, double gamma);

// Same matrix with the exponential arguments decoupled from lambda:
// Delta~(lambda, gamma, z) = lambda I - gamma (A + e^{-z} B1 + e^{-z s0} B2).
// Jointly linear in (lambda, gamma); Delta~(l, g, l) == Delta(l, g).
Eigen::Matrix2cd delta_tilde(const LinearData& lin, Complex lambda, double gamma,
                             Complex z);

// Scalar characteristic function
//   M(lambda, gamma) = lambda^2 + gamma b1 lambda + gamma^2 b0
//                      + gamma^2 b2 e^{-2 tau lambda};
// equals det Delta(lambda, gamma) identically.
Complex char_value(const LinearData& lin, Complex lambda, double gamma);

// Centered vector field f (gamma NOT included; callers scale by gamma):
//   f_u = (u + u0)^2 / (vd + v0) - b (u + u0) + a
//   f_v = (ud + u0)^2 - (v + v0) + c
// where x = (u, v) is the current state, x_lag1 supplies ud = u(t-1) and
// x_lag_s0 supplies vd = v(t-s0).  Precondition: vd + v0 stays away from 0;
// callers that integrate guard this and report PoleEncountered.
Eigen::Vector2d rhs(const ModelParams& p, const Equilibrium& eq,
                    const Eigen::Vector2d& x, const Eigen::Vector2d& x_lag1,
                    const Eigen::Vector2d& x_lag_s0);

// Partial derivatives of f with respect to the three state slots.
// At x = x_lag1 = x_lag_s0 = 0 these reduce to A, B1, B2.
struct RhsJacobians {
  Eigen::Matrix2d dx;
  Eigen::Matrix2d dlag1;
  Eigen::Matrix2d dlag_s0;
};

RhsJacobians rhs_jacobians(const ModelParams& p, const Equilibrium& eq,
                           const Eigen::Vector2d& x, const Eigen::Vector2d& x_lag1,
                           const Eigen::Vector2d& x_lag_s0);

}  // namespace gmdde
