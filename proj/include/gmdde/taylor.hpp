#pragma once

#include <vector>

#include "gmdde/fourier.hpp"
#include "gmdde/model.hpp"

namespace gmdde {

// Taylor coefficients in eps of the delayed phase factor
//   eps -> exp(-i n s omega(eps)),   omega(eps) = sum_j omega_j eps^j,
// for one Fourier mode n and one lag s.  e[j] is the j-th coefficient; the
// recurrence is the standard exp-of-a-series one, so e[j] depends only on
// omega_0..omega_j.
//
// etilde is e[J] (J = omega.size()-1) with its omega_J-proportional part
// removed: e[J] = -i n s omega_J e[0] + etilde.  It collects exactly the
// contributions of omega_0..omega_{J-1}, so appending a different omega_J
// leaves it unchanged; expansion code exploits this to split off the
// not-yet-determined top frequency coefficient.
struct ExpDelayCoeffs {
  std::vector<Complex> e;
  Complex etilde{0.0, 0.0};
};

ExpDelayCoeffs exp_delay_coeffs(const std::vector<double>& omega, int n, double s);

// Jets of the delayed curve t -> y(t - s omega(eps), eps) given the jets of
// y itself:  S_m(n) = sum_{j=0}^{m} e_j(n; s) yhat_{m-j}(n)  per mode n.
// Requires omega coefficients 0..yjet.size()-1 when yjet[0] is nonzero;
// with yjet[0] == 0 (the usual case: curves vanish at eps = 0) one fewer.
std::vector<FourierScalar> delayed_series_jet(const std::vector<FourierScalar>& yjet,
                                              const std::vector<double>& omega,
                                              double s);

// Taylor coefficients of the quotient
//   (U(t, eps) + u0) / (V(t - s0 omega(eps), eps) + v0)
// around the equilibrium value d_0 = u0 / v0, via division-by-recurrence:
//   d_k = (1/v0) [ U_k - sum_{l=0}^{k-1} d_l S_{k-l} ],
// where S is the delayed-V jet.  dd caches the jet of d^2 (Cauchy squares),
// which downstream nonlinear terms consume.
struct QuotientJet {
  std::vector<FourierScalar> d;
  std::vector<FourierScalar> dd;
  std::vector<FourierScalar> sbar;  // delayed-V jets used in the recursion
};

QuotientJet quotient_jet(const std::vector<FourierScalar>& Ujet,
                         const std::vector<FourierScalar>& Vjet,
                         const std::vector<double>& omega, const Equilibrium& eq,
                         double s0);

}  // namespace gmdde
