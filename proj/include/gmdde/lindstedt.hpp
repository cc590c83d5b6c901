#pragma once

#include <vector>

#include "gmdde/fourier.hpp"
#include "gmdde/hopf.hpp"
#include "gmdde/model.hpp"

namespace gmdde {

// Kernel data of Delta(i omega0, gamma0) at a simple Hopf crossing, plus the
// 2x2 real matrix C of the per-order solvability system.  Conventions:
//   yhat1   = (i omega0 + gamma0, 2 gamma0 u0 e^{-i omega0})^T      (column kernel)
//   psi_hat = (i omega0 + gamma0, -gamma0 (u0^2/v0^2) e^{-i omega0 s0})   (row kernel)
// Neither is normalized; the amplitude convention of the whole expansion is
// fixed by taking yhat1 as the order-1 Fourier mode.  C maps (gamma_k, omega_k)
// to (Re, Im) of psi_hat applied to the order-(k+1) forcing mode, and det C < 0
// throughout the admissible region.
struct HopfKernel {
  Eigen::Vector2cd yhat1;
  Eigen::RowVector2cd psi_hat;
  Eigen::Matrix2d C;
  double det_C = 0.0;
};

// Throws SingularC if |det C| < 1e-12.
HopfKernel build_kernel(const LinearData& lin, const HopfPoint& hp);

// Truncated periodic solution and parameter values at a concrete amplitude.
// y is 2 pi periodic in the phase variable; the orbit in time t is
// y(omega t) with period T = 2 pi / omega.
struct PeriodicGuess {
  FourierSeries2 y;
  double gamma = 0.0;
  double omega = 0.0;
  double T = 0.0;
};

// Amplitude expansion of the periodic family emerging at a Hopf point:
//   y(t, eps)  = sum_{k>=1} y_k(t) eps^k,
//   gamma(eps) = sum_{k>=0} gamma_k eps^k,
//   omega(eps) = sum_{k>=0} omega_k eps^k,
// built order by order.  Each order k >= 2 solves
//   Delta(n i omega0, gamma0) yhat_k(n) = Rhat_k(n)
// mode by mode; the n = 1 solvability condition determines
// (gamma_{k-1}, omega_{k-1}) through C, and the n = 1 component is gauged as
// yhat_k(1) = yhat1 + (minimum-norm particular solution).
//
// Orders 2 and 3 are implemented twice: a transcription of their explicit
// closed-form mode displays (the default) and the generic recurrence
// (generic_low_orders = true).  The test suite holds the two routes against
// each other; they must agree to roundoff.
class PLExpansion {
 public:
  struct Order {
    FourierSeries2 y;                   // y_k (empty for k <= 1, kernel at k = 1)
    double gamma = 0.0;                 // gamma_k
    double omega = 0.0;                 // omega_k
    double solvability_residual = 0.0;  // |psi_hat Rhat_k(1)| after the C-solve
  };

  static PLExpansion build(const ModelParams& p, const Equilibrium& eq,
                           const LinearData& lin, const HopfPoint& hp, int order,
                           bool generic_low_orders = false, int max_order = 64);

  // Grows the expansion in place to the requested order.
  void extend(int order);

  int max_computed_order() const { return static_cast<int>(orders_.size()) - 1; }
  const Order& order(int k) const { return orders_.at(k); }
  const HopfKernel& kernel() const { return kernel_; }

  // Jet of the nonlinear forcing: N_k, k >= 2 (zero for k < 2).  Exposed so
  // tests can hold the weighted-derivative recurrence against a direct
  // evaluation route.
  const FourierSeries2& nonlinear_jet(int k) const { return njet_.at(k); }

  double gamma_value(double eps, int order) const;  // truncated gamma(eps)
  double omega_value(double eps, int order) const;  // truncated omega(eps)

  // Truncated series at amplitude eps, using orders <= order.  Throws
  // NonpositiveFrequency if the truncated omega(eps) is not positive.
  PeriodicGuess evaluate(double eps, int order) const;

  // Sup over one period of |omega~ y'(t) - gamma~ f(y(t), delayed values)|,
  // the residual of the truncated series in the phase-scaled equation;
  // decays like eps^{order+1} inside the disk of validity.
  double defect(double eps, int order) const;

  nlohmann::json to_json() const;

 private:
  PLExpansion() = default;

  void compute_order_2_dedicated();
  void compute_order_3_dedicated();
  void compute_order_generic(int k);
  void append_delayed_jets(int k);  // S_k, P_k once omega_{k-1} is known
  Eigen::Vector2cd solve_mode(int n, const Eigen::Vector2cd& rhs_mode) const;
  Eigen::Vector2cd solve_mode_one(const Eigen::Vector2cd& rhs_mode,
                                  double* residual) const;
  void finish_order(int k, std::vector<Eigen::Vector2cd>& rhat,
                    const Eigen::Vector2cd& ghat1, double* residual);

  ModelParams params_;
  Equilibrium eq_;
  LinearData lin_;
  HopfPoint hp_;
  HopfKernel kernel_;
  int max_order_ = 64;
  bool generic_low_orders_ = false;

  std::vector<Order> orders_;          // index k
  std::vector<FourierSeries2> njet_;   // N_k, index k
  std::vector<FourierScalar> d_;       // quotient jet d_k
  std::vector<FourierScalar> dd_;      // jet of d^2
  std::vector<FourierScalar> sbar_;    // delayed-V jet at lag s0
  std::vector<FourierScalar> pjet_;    // delayed-U jet at lag 1
};

// Smallest amplitude whose order-3 defect falls inside [lo_defect, hi_defect],
// located by bisection in log eps; the result also satisfies
// omega(eps) > omega0 / 2 and gamma(eps) > 0.  Deterministic.
double auto_epsilon(const PLExpansion& pl, double lo_defect = 1e-6,
                    double hi_defect = 1e-4);

}  // namespace gmdde
