#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include <json.hpp>

#include "gmdde/errors.hpp"

namespace gmdde {

using Complex = std::complex<double>;

// Real-valued trigonometric polynomial on the 2 pi circle, stored one-sided:
// coefficients c_n for n = 0..N only, with c_{-n} = conj(c_n) implied.  Every
// operation below preserves that symmetry, so the represented function stays
// real (up to the imaginary part of c_0, which callers can check).
class FourierScalar {
 public:
  FourierScalar() = default;
  explicit FourierScalar(int max_mode) : c_(static_cast<size_t>(max_mode) + 1) {}

  // Highest stored mode; -1 for the empty (identically zero) series.
  int max_mode() const { return static_cast<int>(c_.size()) - 1; }

  // c_n for any integer n: conjugated for n < 0, zero beyond the storage.
  Complex coeff(int n) const;
  // n >= 0 only; grows the storage as needed.
  void set_coeff(int n, Complex value);

  // Re of the mode sum at phase t (radians).  For a symmetry-respecting
  // series the imaginary residue is |Im c_0|; eval_imag exposes it.
  double eval(double t) const;
  double eval_imag() const { return c_.empty() ? 0.0 : std::abs(c_[0].imag()); }

  FourierScalar delayed(double lag, double omega) const;  // y(t - omega * lag)
  FourierScalar differentiated() const;                   // d/dt in phase

  double sup_norm() const;  // max_t |y(t)|, sampled + parabolic refinement
  double l2_norm() const;   // sqrt of the mean square over one period

  // Drops trailing coefficients with |c_n| <= tol (exact zeros by default).
  void trim(double tol = 0.0);

  FourierScalar& operator+=(const FourierScalar& o);
  FourierScalar& operator-=(const FourierScalar& o);
  FourierScalar& operator*=(double s);
  friend FourierScalar operator+(FourierScalar a, const FourierScalar& b) {
    a += b;
    return a;
  }
  friend FourierScalar operator-(FourierScalar a, const FourierScalar& b) {
    a -= b;
    return a;
  }
  friend FourierScalar operator*(double s, FourierScalar a) {
    a *= s;
    return a;
  }

 private:
  std::vector<Complex> c_;
};

// (fg)_n = sum_m f_m g_{n-m} over the full symmetric index range.
// Exact zeros stay exact, so products of short series stay short after trim().
FourierScalar cauchy_product(const FourierScalar& f, const FourierScalar& g);

// Planar series (u, v) sharing one phase variable.
struct FourierSeries2 {
  FourierScalar u;
  FourierScalar v;

  int max_mode() const { return std::max(u.max_mode(), v.max_mode()); }
  Eigen::Vector2d eval(double t) const { return {u.eval(t), v.eval(t)}; }
  FourierSeries2 delayed(double lag, double omega) const {
    return {u.delayed(lag, omega), v.delayed(lag, omega)};
  }
  FourierSeries2 differentiated() const {
    return {u.differentiated(), v.differentiated()};
  }
  double sup_norm() const;  // max_t of the pointwise euclidean norm
  double l2_norm() const;
  void trim(double tol = 0.0) {
    u.trim(tol);
    v.trim(tol);
  }

  FourierSeries2& operator+=(const FourierSeries2& o) {
    u += o.u;
    v += o.v;
    return *this;
  }
  FourierSeries2& operator*=(double s) {
    u *= s;
    v *= s;
    return *this;
  }

  // {"N": int, "coeffs": [[re_u, im_u, re_v, im_v], ...]} for n = 0..N.
  nlohmann::json to_json() const;
  static FourierSeries2 from_json(const nlohmann::json& j);
};

}  // namespace gmdde
