#include "gmdde/lindstedt.hpp"

#include <cmath>
#include <numbers>

#include "gmdde/taylor.hpp"

namespace gmdde {

namespace {

const Complex kI{0.0, 1.0};

// psi . v without conjugation (Eigen's dot conjugates the left factor)
Complex row_apply(const Eigen::RowVector2cd& psi, const Eigen::Vector2cd& v) {
  return psi[0] * v[0] + psi[1] * v[1];
}

}  // namespace

HopfKernel build_kernel(const LinearData& lin, const HopfPoint& hp) {
  const double g = hp.gamma0, w = hp.omega0;
  const double b0 = lin.b0, b1 = lin.b1, s0 = lin.s0;
  HopfKernel k;
  k.yhat1 << kI * w + g, 2.0 * g * lin.u0 * std::exp(-kI * w);
  k.psi_hat << kI * w + g,
      -g * (lin.u0 * lin.u0 / (lin.v0 * lin.v0)) * std::exp(-kI * w * s0);

  k.C(0, 0) = (b1 + 2.0) * w * w;
  k.C(1, 0) = (2.0 * w * w / g - b1 * g) * w;
  k.C(0, 1) = -((b1 + 2.0) * g * w +
                (s0 + 1.0) * ((b0 + b1) * g * g * w - w * w * w));
  k.C(1, 1) = b1 * g * g - 2.0 * w * w +
              (s0 + 1.0) * ((-b1 - 1.0) * g * w * w + b0 * g * g * g);
  k.det_C = k.C.determinant();
  if (std::abs(k.det_C) < 1e-12)
    throw SingularC("lindstedt: solvability matrix is singular");
  return k;
}

PLExpansion PLExpansion::build(const ModelParams& p, const Equilibrium& eq,
                               const LinearData& lin, const HopfPoint& hp,
                               int order, bool generic_low_orders,
                               int max_order) {
  if (order < 1) throw ConfigError("lindstedt: order must be at least 1");
  PLExpansion pl;
  pl.params_ = p;
  pl.eq_ = eq;
  pl.lin_ = lin;
  pl.hp_ = hp;
  pl.kernel_ = build_kernel(lin, hp);
  pl.max_order_ = max_order;
  pl.generic_low_orders_ = generic_low_orders;

  pl.orders_.resize(2);
  pl.orders_[0].gamma = hp.gamma0;
  pl.orders_[0].omega = hp.omega0;
  pl.orders_[1].y.u.set_coeff(1, pl.kernel_.yhat1[0]);
  pl.orders_[1].y.v.set_coeff(1, pl.kernel_.yhat1[1]);

  pl.njet_.resize(2);
  pl.d_.resize(1);
  pl.d_[0].set_coeff(0, {eq.u0 / eq.v0, 0.0});
  pl.dd_.resize(1);
  pl.dd_[0].set_coeff(0, {eq.u0 * eq.u0 / (eq.v0 * eq.v0), 0.0});
  // delayed jets of order 1: plain phase shifts of the kernel mode
  pl.sbar_.resize(2);
  pl.sbar_[1].set_coeff(
      1, pl.kernel_.yhat1[1] * std::exp(-kI * hp.omega0 * lin.s0));
  pl.pjet_.resize(2);
  pl.pjet_[1].set_coeff(1, pl.kernel_.yhat1[0] * std::exp(-kI * hp.omega0));

  pl.extend(order);
  return pl;
}

void PLExpansion::extend(int order) {
  if (order > max_order_)
    throw OrderOverflow("lindstedt: requested order exceeds the cap");
  for (int k = max_computed_order() + 1; k <= order; ++k) {
    if (k == 2 && !generic_low_orders_)
      compute_order_2_dedicated();
    else if (k == 3 && !generic_low_orders_)
      compute_order_3_dedicated();
    else
      compute_order_generic(k);
    append_delayed_jets(k);
  }
}

Eigen::Vector2cd PLExpansion::solve_mode(int n,
                                         const Eigen::Vector2cd& rhs_mode) const {
  const Eigen::Matrix2cd m =
      delta_matrix(lin_, Complex(0.0, n * hp_.omega0), hp_.gamma0);
  const Complex det = m.determinant();
  if (std::abs(det) < 1e-13)
    throw ResonanceDetected(n, "lindstedt: near-singular mode " +
                                   std::to_string(n));
  Eigen::Vector2cd x;
  x[0] = (m(1, 1) * rhs_mode[0] - m(0, 1) * rhs_mode[1]) / det;
  x[1] = (m(0, 0) * rhs_mode[1] - m(1, 0) * rhs_mode[0]) / det;
  return x;
}

Eigen::Vector2cd PLExpansion::solve_mode_one(const Eigen::Vector2cd& rhs_mode,
                                             double* residual) const {
  if (residual != nullptr)
    *residual = std::abs(row_apply(kernel_.psi_hat, rhs_mode));
  // bordered system: the constraint row makes the particular solution
  // orthogonal to the kernel column; the multiplier absorbs the (tiny)
  // out-of-range component of the right hand side.
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m.topLeftCorner<2, 2>() =
      delta_matrix(lin_, Complex(0.0, hp_.omega0), hp_.gamma0);
  m.topRightCorner<2, 1>() = kernel_.yhat1;
  m.bottomLeftCorner<1, 2>() = kernel_.yhat1.adjoint();
  Eigen::Vector3cd r;
  r << rhs_mode[0], rhs_mode[1], Complex{0.0, 0.0};
  const Eigen::Vector3cd s = m.partialPivLu().solve(r);
  return kernel_.yhat1 + s.head<2>();
}

void PLExpansion::finish_order(int k, std::vector<Eigen::Vector2cd>& rhat,
                               const Eigen::Vector2cd& ghat1, double* residual) {
  const Eigen::Vector2cd g1 = ghat1;  // rhat[1] may alias ghat1

  // order-(k-1) parameter coefficients from the mode-1 solvability condition
  const Complex pg = row_apply(kernel_.psi_hat, g1);
  const Eigen::Vector2d rhs2{pg.real(), pg.imag()};
  const Eigen::Vector2d gw = kernel_.C.partialPivLu().solve(rhs2);
  orders_[k - 1].gamma = gw[0];
  orders_[k - 1].omega = gw[1];

  // Rhat_k(1) = Ghat_k(1) - [Delta~(i w_{k-1}, g_{k-1}, i w0)
  //                          + g0 i w_{k-1} (e^{-i w0} B1 + s0 e^{-i w0 s0} B2)] yhat1
  const double gc = gw[0], wc = gw[1];
  Eigen::Matrix2cd bracket =
      delta_tilde(lin_, Complex(0.0, wc), gc, Complex(0.0, hp_.omega0));
  bracket += hp_.gamma0 * (kI * wc) *
             (std::exp(-kI * hp_.omega0) * lin_.B1.cast<Complex>() +
              lin_.s0 * std::exp(-kI * hp_.omega0 * lin_.s0) *
                  lin_.B2.cast<Complex>());
  rhat[1] = g1 - bracket * kernel_.yhat1;

  Order ord;
  for (int n = 0; n <= k; ++n) {
    Eigen::Vector2cd yn;
    if (n == 1) {
      yn = solve_mode_one(rhat[1], residual);
    } else {
      yn = solve_mode(n, rhat[n]);
    }
    if (yn[0] != Complex{0.0, 0.0}) ord.y.u.set_coeff(n, yn[0]);
    if (yn[1] != Complex{0.0, 0.0}) ord.y.v.set_coeff(n, yn[1]);
  }
  ord.y.trim();
  ord.solvability_residual = residual != nullptr ? *residual : 0.0;
  orders_.push_back(std::move(ord));
}

void PLExpansion::compute_order_2_dedicated() {
  const double g0 = hp_.gamma0, w0 = hp_.omega0;
  const double u0 = eq_.u0, v0 = eq_.v0;
  const Complex U1 = kernel_.yhat1[0];
  const Complex S1 = kernel_.yhat1[1] * std::exp(-kI * w0 * lin_.s0);
  const Complex W1 = U1 - (u0 / v0) * S1;

  // quotient jet index 1 (shared state; the mode displays below are the
  // independent route for the solve itself)
  d_.push_back({});
  d_[1].set_coeff(1, W1 / v0);
  FourierScalar dd1 = cauchy_product(d_[0], d_[1]);
  dd1 *= 2.0;
  dd1.trim();
  dd_.push_back(dd1);

  // N_2 = G_2: modes 0 and 2 only, transcribed from the closed displays
  FourierSeries2 n2;
  n2.u.set_coeff(2, W1 * W1 / v0);
  n2.u.set_coeff(0, 2.0 * std::norm(W1) / v0);
  n2.v.set_coeff(2, std::exp(-2.0 * kI * w0) * U1 * U1);
  n2.v.set_coeff(0, 2.0 * std::norm(U1));
  njet_.push_back(n2);

  // mode 1 of G_2 vanishes identically, so gamma_1 = omega_1 = 0 and the
  // mode-1 right hand side is exactly zero
  orders_[1].gamma = 0.0;
  orders_[1].omega = 0.0;

  Order ord;
  const Eigen::Vector2cd r0{g0 * n2.u.coeff(0), g0 * n2.v.coeff(0)};
  const Eigen::Vector2cd r2{g0 * n2.u.coeff(2), g0 * n2.v.coeff(2)};
  const Eigen::Vector2cd y0 = solve_mode(0, r0);
  const Eigen::Vector2cd y2 = solve_mode(2, r2);
  ord.y.u.set_coeff(0, y0[0]);
  ord.y.u.set_coeff(1, kernel_.yhat1[0]);
  ord.y.u.set_coeff(2, y2[0]);
  ord.y.v.set_coeff(0, y0[1]);
  ord.y.v.set_coeff(1, kernel_.yhat1[1]);
  ord.y.v.set_coeff(2, y2[1]);
  ord.solvability_residual = 0.0;
  orders_.push_back(std::move(ord));
}

void PLExpansion::compute_order_3_dedicated() {
  const double g0 = hp_.gamma0, w0 = hp_.omega0;
  const double u0 = eq_.u0, v0 = eq_.v0;
  const double d0 = u0 / v0;
  const Complex U1 = kernel_.yhat1[0];
  const Complex S1 = kernel_.yhat1[1] * std::exp(-kI * w0 * lin_.s0);
  const Complex W1 = U1 - d0 * S1;

  auto U2 = [&](int n) { return orders_[2].y.u.coeff(n); };
  auto V2 = [&](int n) { return orders_[2].y.v.coeff(n); };
  auto W2 = [&](int n) {
    return U2(n) - d0 * V2(n) * std::exp(-Complex(0.0, n * w0 * lin_.s0));
  };

  // quotient jet index 2 (shared state)
  {
    FourierScalar acc = orders_[2].y.u;
    acc -= cauchy_product(d_[0], sbar_[2]);
    acc -= cauchy_product(d_[1], sbar_[1]);
    acc *= 1.0 / v0;
    acc.trim();
    d_.push_back(acc);
    FourierScalar sq = cauchy_product(d_[0], d_[2]);
    sq *= 2.0;
    sq += cauchy_product(d_[1], d_[1]);
    sq.trim();
    dd_.push_back(sq);
  }

  // G_3(1), with the gamma_0 factors carried inside as displayed
  Eigen::Vector2cd g1;
  g1[0] = (2.0 * g0 / v0) * (std::conj(W1) * W2(2) + W1 * W2(0)) -
          (g0 / (v0 * v0)) *
              (std::conj(S1) * W1 * W1 + 2.0 * S1 * std::norm(W1));
  g1[1] = 2.0 * g0 * std::exp(-kI * w0) *
          (std::conj(U1) * U2(2) + U1 * U2(0));

  std::vector<Eigen::Vector2cd> rhat(4, Eigen::Vector2cd::Zero());
  rhat[3][0] = 2.0 * g0 * W1 * W2(2) / v0 -
               (g0 / (v0 * v0)) * S1 * W1 * W1;
  rhat[3][1] = 2.0 * g0 * std::exp(-3.0 * kI * w0) * U1 * U2(2);
  rhat[2][0] = 2.0 * g0 * W1 * W2(1) / v0;
  rhat[2][1] = 2.0 * g0 * std::exp(-2.0 * kI * w0) * U1 * U2(1);
  rhat[0][0] = 4.0 * g0 * (W1 * std::conj(W2(1)) / v0).real();
  rhat[0][1] = 4.0 * g0 * (U1 * std::conj(U2(1))).real();

  // N_3 jet for later orders: G_3 modes divided by gamma_0 (gamma_1 = 0)
  FourierSeries2 n3;
  n3.u.set_coeff(0, rhat[0][0] / g0);
  n3.u.set_coeff(1, g1[0] / g0);
  n3.u.set_coeff(2, rhat[2][0] / g0);
  n3.u.set_coeff(3, rhat[3][0] / g0);
  n3.v.set_coeff(0, rhat[0][1] / g0);
  n3.v.set_coeff(1, g1[1] / g0);
  n3.v.set_coeff(2, rhat[2][1] / g0);
  n3.v.set_coeff(3, rhat[3][1] / g0);
  n3.trim();
  njet_.push_back(n3);

  double residual = 0.0;
  finish_order(3, rhat, g1, &residual);
}

void PLExpansion::compute_order_generic(int k) {
  const double g0 = hp_.gamma0, w0 = hp_.omega0;
  const double v0 = eq_.v0;

  // quotient jet index k-1
  {
    FourierScalar acc = orders_[k - 1].y.u;
    for (int l = 0; l <= k - 2; ++l)
      acc -= cauchy_product(d_[l], sbar_[k - 1 - l]);
    acc *= 1.0 / v0;
    acc.trim();
    d_.push_back(acc);
    FourierScalar sq;
    for (int l = 0; l <= k - 1; ++l) sq += cauchy_product(d_[l], d_[k - 1 - l]);
    sq.trim();
    dd_.push_back(sq);
  }

  // N_k from the weighted-derivative form of the nonlinear jet
  FourierSeries2 nk;
  for (int k1 = 1; k1 <= k - 1; ++k1) {
    const double wgt = static_cast<double>(k - k1);
    FourierScalar t1 = cauchy_product(d_[k1], orders_[k - k1].y.u);
    t1 *= 2.0 * wgt;
    nk.u += t1;
    FourierScalar t2 = cauchy_product(dd_[k1], sbar_[k - k1]);
    t2 *= -wgt;
    nk.u += t2;
    FourierScalar t3 = cauchy_product(pjet_[k1], pjet_[k - k1]);
    t3 *= 2.0 * wgt;
    nk.v += t3;
  }
  nk *= 1.0 / static_cast<double>(k);
  nk.trim();
  njet_.push_back(nk);

  // rho_k = sum_{k2=2}^{k} gamma_{k-k2} N_{k2}
  FourierSeries2 rho;
  for (int k2 = 2; k2 <= k; ++k2) {
    FourierSeries2 term = njet_[k2];
    term *= orders_[k - k2].gamma;
    rho += term;
  }

  auto yhat = [&](int j, int n) -> Eigen::Vector2cd {
    return {orders_[j].y.u.coeff(n), orders_[j].y.v.coeff(n)};
  };

  // G_k(n) = rho_k(n) - L_k(n), modes 0..k
  std::vector<double> omega_ext;
  for (int j = 0; j <= k - 2; ++j) omega_ext.push_back(orders_[j].omega);
  omega_ext.push_back(0.0);  // stand-in for the unknown omega_{k-1}

  std::vector<Eigen::Vector2cd> ghat(k + 1);
  for (int n = 0; n <= k; ++n) {
    const auto e1 = exp_delay_coeffs(omega_ext, n, 1.0);
    const auto es = exp_delay_coeffs(omega_ext, n, lin_.s0);
    Eigen::Vector2cd L = Eigen::Vector2cd::Zero();
    if (n == 1) {
      const Eigen::Matrix2cd et = e1.etilde * lin_.B1.cast<Complex>() +
                                  es.etilde * lin_.B2.cast<Complex>();
      L -= g0 * (et * kernel_.yhat1);
    }
    for (int k1 = 2; k1 <= k - 2; ++k1) {
      Eigen::Matrix2cd m =
          delta_tilde(lin_, Complex(0.0, n * orders_[k1].omega),
                      orders_[k1].gamma, Complex(0.0, n * w0));
      m -= g0 * (e1.e[k1] * lin_.B1.cast<Complex>() +
                 es.e[k1] * lin_.B2.cast<Complex>());
      L += m * yhat(k - k1, n);
      Eigen::Vector2cd inner = Eigen::Vector2cd::Zero();
      for (int j1 = 2; j1 <= k - k1 - 1; ++j1) {
        inner += (e1.e[j1] * lin_.B1.cast<Complex>() +
                  es.e[j1] * lin_.B2.cast<Complex>()) *
                 yhat(k - k1 - j1, n);
      }
      L -= orders_[k1].gamma * inner;
    }
    ghat[n] = Eigen::Vector2cd{rho.u.coeff(n), rho.v.coeff(n)} - L;
  }

  double residual = 0.0;
  finish_order(k, ghat, ghat[1], &residual);
}

void PLExpansion::append_delayed_jets(int k) {
  std::vector<double> omega_full;
  for (int j = 0; j <= k - 1; ++j) omega_full.push_back(orders_[j].omega);
  FourierScalar sk, pk;
  const int max_n = k;
  for (int n = 0; n <= max_n; ++n) {
    const auto es = exp_delay_coeffs(omega_full, n, lin_.s0);
    const auto e1 = exp_delay_coeffs(omega_full, n, 1.0);
    Complex accs{0.0, 0.0}, accp{0.0, 0.0};
    for (int j = 0; j <= k - 1; ++j) {
      accs += es.e[j] * orders_[k - j].y.v.coeff(n);
      accp += e1.e[j] * orders_[k - j].y.u.coeff(n);
    }
    if (accs != Complex{0.0, 0.0}) sk.set_coeff(n, accs);
    if (accp != Complex{0.0, 0.0}) pk.set_coeff(n, accp);
  }
  sk.trim();
  pk.trim();
  sbar_.push_back(sk);
  pjet_.push_back(pk);
}

double PLExpansion::gamma_value(double eps, int order) const {
  const int top = std::min(order, max_computed_order());
  double acc = 0.0;
  for (int kk = top; kk >= 0; --kk) acc = acc * eps + orders_[kk].gamma;
  return acc;
}

double PLExpansion::omega_value(double eps, int order) const {
  const int top = std::min(order, max_computed_order());
  double acc = 0.0;
  for (int kk = top; kk >= 0; --kk) acc = acc * eps + orders_[kk].omega;
  return acc;
}

PeriodicGuess PLExpansion::evaluate(double eps, int order) const {
  if (order < 1 || order > max_computed_order())
    throw ConfigError("lindstedt: evaluation order out of range");
  PeriodicGuess g;
  g.gamma = gamma_value(eps, order);
  g.omega = omega_value(eps, order);
  if (!(g.omega > 0.0))
    throw NonpositiveFrequency("lindstedt: truncated frequency is not positive");
  g.T = 2.0 * std::numbers::pi / g.omega;
  double scale = 1.0;
  for (int k = 1; k <= order; ++k) {
    scale *= eps;
    FourierSeries2 term = orders_[k].y;
    term *= scale;
    g.y += term;
  }
  g.y.trim();
  return g;
}

double PLExpansion::defect(double eps, int order) const {
  const PeriodicGuess g = evaluate(eps, order);
  const FourierSeries2 yp = g.y.differentiated();
  const FourierSeries2 lag1 = g.y.delayed(1.0, g.omega);
  const FourierSeries2 lags = g.y.delayed(lin_.s0, g.omega);
  const int samples = 512;
  double sup = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = 2.0 * std::numbers::pi * i / samples;
    const Eigen::Vector2d r =
        g.omega * yp.eval(t) -
        g.gamma * rhs(params_, eq_, g.y.eval(t), lag1.eval(t), lags.eval(t));
    sup = std::max(sup, r.norm());
  }
  return sup;
}

nlohmann::json PLExpansion::to_json() const {
  nlohmann::json orders = nlohmann::json::array();
  for (int k = 0; k <= max_computed_order(); ++k) {
    orders.push_back({{"k", k},
                      {"gamma_k", orders_[k].gamma},
                      {"omega_k", orders_[k].omega},
                      {"solvability_residual", orders_[k].solvability_residual},
                      {"series", orders_[k].y.to_json()}});
  }
  return {{"params",
           {{"a", params_.a},
            {"b", params_.b},
            {"c", params_.c},
            {"s0", params_.s0}}},
          {"equilibrium", {{"u0", eq_.u0}, {"v0", eq_.v0}}},
          {"gamma0", hp_.gamma0},
          {"omega0", hp_.omega0},
          {"branch_index", hp_.branch_index},
          {"orders", orders}};
}

double auto_epsilon(const PLExpansion& pl, double lo_defect, double hi_defect) {
  if (pl.max_computed_order() < 3)
    throw ConfigError("lindstedt: auto epsilon needs order 3");
  const double w0 = pl.order(0).omega;
  // 2 = too big (invalid or defect above band), 0 = too small, 1 = in band
  auto classify = [&](double eps) -> int {
    double d;
    try {
      if (!(pl.omega_value(eps, 3) > 0.5 * w0)) return 2;
      if (!(pl.gamma_value(eps, 3) > 0.0)) return 2;
      d = pl.defect(eps, 3);
    } catch (const Error&) {
      return 2;
    }
    if (!std::isfinite(d) || d > hi_defect) return 2;
    if (d < lo_defect) return 0;
    return 1;
  };

  double lo = 1e-4, hi = 0.5;
  if (classify(lo) == 2) return lo;  // band unreachable from below
  if (classify(hi) == 0) return hi;  // defect stays tiny everywhere
  for (int it = 0; it < 80; ++it) {
    const double mid = std::sqrt(lo * hi);
    const int c = classify(mid);
    if (c == 1) return mid;
    if (c == 0)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace gmdde
