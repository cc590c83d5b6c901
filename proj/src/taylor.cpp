#include "gmdde/taylor.hpp"

namespace gmdde {

ExpDelayCoeffs exp_delay_coeffs(const std::vector<double>& omega, int n, double s) {
  if (omega.empty()) throw ConfigError("taylor: empty frequency jet");
  const int J = static_cast<int>(omega.size()) - 1;
  ExpDelayCoeffs out;
  out.e.resize(J + 1);
  const Complex factor(0.0, -n * s);
  out.e[0] = std::exp(factor * omega[0]);
  for (int j = 1; j <= J; ++j) {
    Complex acc{0.0, 0.0};
    for (int l = 0; l < j; ++l)
      acc += static_cast<double>(j - l) * (factor * omega[j - l]) * out.e[l];
    out.e[j] = acc / static_cast<double>(j);
  }
  out.etilde = J >= 1 ? out.e[J] - factor * omega[J] * out.e[0] : Complex{0.0, 0.0};
  return out;
}

std::vector<FourierScalar> delayed_series_jet(const std::vector<FourierScalar>& yjet,
                                              const std::vector<double>& omega,
                                              double s) {
  const int K = static_cast<int>(yjet.size()) - 1;
  if (K < 0) return {};
  const bool zero_head = yjet[0].max_mode() < 0;
  const int need = zero_head ? K : K + 1;
  if (static_cast<int>(omega.size()) < std::max(1, need))
    throw ConfigError("taylor: frequency jet shorter than the curve jet needs");

  int max_n = 0;
  for (const auto& y : yjet) max_n = std::max(max_n, y.max_mode());

  std::vector<FourierScalar> out(K + 1);
  for (int n = 0; n <= max_n; ++n) {
    const auto ec = exp_delay_coeffs(omega, n, s);
    for (int m = 0; m <= K; ++m) {
      Complex acc{0.0, 0.0};
      const int jmax = std::min(m - (zero_head ? 1 : 0),
                                static_cast<int>(ec.e.size()) - 1);
      for (int j = 0; j <= jmax; ++j) acc += ec.e[j] * yjet[m - j].coeff(n);
      if (acc != Complex{0.0, 0.0}) out[m].set_coeff(n, acc);
    }
  }
  for (auto& sm : out) sm.trim();
  return out;
}

QuotientJet quotient_jet(const std::vector<FourierScalar>& Ujet,
                         const std::vector<FourierScalar>& Vjet,
                         const std::vector<double>& omega, const Equilibrium& eq,
                         double s0) {
  if (Ujet.size() != Vjet.size())
    throw ConfigError("taylor: U and V jets must have equal length");
  const int K = static_cast<int>(Ujet.size()) - 1;
  if (K < 0) throw ConfigError("taylor: empty curve jet");

  QuotientJet out;
  out.sbar = delayed_series_jet(Vjet, omega, s0);
  out.d.resize(K + 1);
  out.dd.resize(K + 1);
  const double d0 = eq.u0 / eq.v0;
  out.d[0].set_coeff(0, {d0, 0.0});
  out.dd[0].set_coeff(0, {d0 * d0, 0.0});
  for (int k = 1; k <= K; ++k) {
    FourierScalar acc = Ujet[k];
    for (int l = 0; l < k; ++l) acc -= cauchy_product(out.d[l], out.sbar[k - l]);
    acc *= 1.0 / eq.v0;
    acc.trim();
    out.d[k] = acc;
    FourierScalar sq;
    for (int l = 0; l <= k; ++l) sq += cauchy_product(out.d[l], out.d[k - l]);
    sq.trim();
    out.dd[k] = sq;
  }
  return out;
}

}  // namespace gmdde
