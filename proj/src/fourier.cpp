#include "gmdde/fourier.hpp"

#include <cmath>
#include <numbers>

namespace gmdde {

namespace {
constexpr int kSamples = 512;

// One parabolic refinement around the best of f(k h), k = 0..n-1, h = 2pi/n.
template <typename F>
double refined_max(F&& f) {
  const double h = 2.0 * std::numbers::pi / kSamples;
  double best = -1.0;
  int best_k = 0;
  for (int k = 0; k < kSamples; ++k) {
    const double val = f(k * h);
    if (val > best) {
      best = val;
      best_k = k;
    }
  }
  const double fm = f((best_k - 1) * h);
  const double fp = f((best_k + 1) * h);
  const double denom = fm - 2.0 * best + fp;
  if (std::abs(denom) > 1e-300) {
    const double delta = 0.5 * h * (fm - fp) / denom;
    if (std::abs(delta) <= h) best = std::max(best, f(best_k * h + delta));
  }
  return best;
}
}  // namespace

Complex FourierScalar::coeff(int n) const {
  const int k = n < 0 ? -n : n;
  if (k >= static_cast<int>(c_.size())) return {0.0, 0.0};
  return n < 0 ? std::conj(c_[k]) : c_[k];
}

void FourierScalar::set_coeff(int n, Complex value) {
  if (n < 0) throw ConfigError("fourier: negative modes are implied by symmetry");
  if (n >= static_cast<int>(c_.size())) c_.resize(static_cast<size_t>(n) + 1);
  c_[n] = value;
}

double FourierScalar::eval(double t) const {
  if (c_.empty()) return 0.0;
  // c_0 + 2 Re sum_{n>=1} c_n e^{int}, via Horner in e^{it}.
  const Complex z = std::polar(1.0, t);
  Complex acc{0.0, 0.0};
  for (int n = max_mode(); n >= 1; --n) acc = (acc + c_[n]) * z;
  return c_[0].real() + 2.0 * acc.real();
}

FourierScalar FourierScalar::delayed(double lag, double omega) const {
  FourierScalar out = *this;
  for (int n = 1; n <= out.max_mode(); ++n)
    out.c_[n] *= std::polar(1.0, -n * omega * lag);
  return out;
}

FourierScalar FourierScalar::differentiated() const {
  FourierScalar out = *this;
  for (int n = 0; n <= out.max_mode(); ++n)
    out.c_[n] *= Complex(0.0, static_cast<double>(n));
  return out;
}

double FourierScalar::sup_norm() const {
  if (c_.empty()) return 0.0;
  return refined_max([this](double t) { return std::abs(eval(t)); });
}

double FourierScalar::l2_norm() const {
  double acc = 0.0;
  for (int n = 0; n <= max_mode(); ++n)
    acc += (n == 0 ? 1.0 : 2.0) * std::norm(c_[n]);
  return std::sqrt(acc);
}

void FourierScalar::trim(double tol) {
  while (!c_.empty() && std::abs(c_.back()) <= tol) c_.pop_back();
}

FourierScalar& FourierScalar::operator+=(const FourierScalar& o) {
  if (o.max_mode() > max_mode()) c_.resize(o.c_.size());
  for (int n = 0; n <= o.max_mode(); ++n) c_[n] += o.c_[n];
  return *this;
}

FourierScalar& FourierScalar::operator-=(const FourierScalar& o) {
  if (o.max_mode() > max_mode()) c_.resize(o.c_.size());
  for (int n = 0; n <= o.max_mode(); ++n) c_[n] -= o.c_[n];
  return *this;
}

FourierScalar& FourierScalar::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

FourierScalar cauchy_product(const FourierScalar& f, const FourierScalar& g) {
  const int nf = f.max_mode(), ng = g.max_mode();
  if (nf < 0 || ng < 0) return {};
  FourierScalar out(nf + ng);
  for (int n = 0; n <= nf + ng; ++n) {
    Complex acc{0.0, 0.0};
    const int lo = std::max(-nf, n - ng);
    const int hi = std::min(nf, n + ng);
    for (int m = lo; m <= hi; ++m) acc += f.coeff(m) * g.coeff(n - m);
    out.set_coeff(n, acc);
  }
  return out;
}

double FourierSeries2::sup_norm() const {
  if (u.max_mode() < 0 && v.max_mode() < 0) return 0.0;
  return refined_max([this](double t) { return eval(t).norm(); });
}

double FourierSeries2::l2_norm() const {
  return std::hypot(u.l2_norm(), v.l2_norm());
}

nlohmann::json FourierSeries2::to_json() const {
  const int N = max_mode();
  nlohmann::json coeffs = nlohmann::json::array();
  for (int n = 0; n <= N; ++n) {
    const Complex cu = u.coeff(n), cv = v.coeff(n);
    coeffs.push_back({cu.real(), cu.imag(), cv.real(), cv.imag()});
  }
  return {{"N", N}, {"coeffs", coeffs}};
}

FourierSeries2 FourierSeries2::from_json(const nlohmann::json& j) {
  FourierSeries2 out;
  const int N = j.at("N").get<int>();
  const auto& coeffs = j.at("coeffs");
  if (static_cast<int>(coeffs.size()) != N + 1)
    throw ConfigError("fourier: coefficient array length mismatch");
  for (int n = 0; n <= N; ++n) {
    const auto& row = coeffs.at(n);
    out.u.set_coeff(n, {row.at(0).get<double>(), row.at(1).get<double>()});
    out.v.set_coeff(n, {row.at(2).get<double>(), row.at(3).get<double>()});
  }
  return out;
}

}  // namespace gmdde
