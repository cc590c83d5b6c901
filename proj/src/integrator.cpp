#include "gmdde/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace gmdde {

namespace {

// Cubic Hermite on a unit segment: values x0, x1 and scaled slopes h*d0,
// h*d1 at the endpoints.
Eigen::Vector2d hermite(double s, const Eigen::Vector2d& x0,
                        const Eigen::Vector2d& x1, const Eigen::Vector2d& hd0,
                        const Eigen::Vector2d& hd1) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * x0 + (s3 - 2.0 * s2 + s) * hd0 +
         (-2.0 * s3 + 3.0 * s2) * x1 + (s3 - s2) * hd1;
}

}  // namespace

HistorySegment HistorySegment::constant(double length,
                                        const Eigen::Vector2d& value) {
  return {length, [value](double) { return value; }};
}

HistorySegment HistorySegment::from_guess(const PeriodicGuess& g,
                                          double length) {
  const FourierSeries2 y = g.y;
  const double omega = g.omega;
  return {length, [y, omega](double t) { return y.eval(omega * t); }};
}

HistorySegment HistorySegment::from_orbit(const PeriodicOrbit& o,
                                          double length) {
  const PeriodicOrbit orbit = o;
  return {length, [orbit](double t) { return orbit.eval(t / orbit.T); }};
}

Trajectory::Trajectory(HistorySegment history, double h,
                       std::vector<Eigen::Vector2d> nodes,
                       std::vector<Eigen::Vector2d> derivatives)
    : history_(std::move(history)),
      h_(h),
      nodes_(std::move(nodes)),
      derivs_(std::move(derivatives)) {}

Eigen::Vector2d Trajectory::eval(double t) const {
  if (t < 0.0) {
    if (t < -history_.length - 1e-12) {
      throw HistoryTooShort("trajectory evaluated before the stored history");
    }
    return history_.f(std::max(t, -history_.length));
  }
  const double end = t_end();
  if (t > end + 1e-9 * std::max(1.0, end)) {
    throw ConfigError("trajectory evaluated past its final time");
  }
  const int last = static_cast<int>(nodes_.size()) - 2;
  const int k = std::clamp(static_cast<int>(t / h_), 0, std::max(last, 0));
  if (last < 0) return nodes_.front();
  const double s = std::clamp((t - h_ * k) / h_, 0.0, 1.0);
  return hermite(s, nodes_[k], nodes_[k + 1], h_ * derivs_[k],
                 h_ * derivs_[k + 1]);
}

Trajectory integrate(const ModelParams& p, const Equilibrium& eq, double gamma,
                     const HistorySegment& history, double t_end, double h) {
  p.validate();
  if (!history.f) throw ConfigError("integrate: empty history callable");
  if (!(t_end > 0.0)) throw ConfigError("integrate: t_end must be positive");
  if (!(h > 0.0)) throw ConfigError("integrate: step must be positive");
  const double needed = std::max(1.0, p.s0);
  if (history.length < needed - 1e-12) {
    throw HistoryTooShort("history covers less than the largest delay");
  }

  // Delayed stage arguments satisfy t + c*h - delay <= t whenever
  // h <= min(1, s0), so lookups never leave completed segments.
  const double h_cap = std::min({h, 1.0, p.s0});
  const int n_steps = std::max(1, static_cast<int>(std::ceil(t_end / h_cap - 1e-9)));
  const double dt = t_end / n_steps;

  std::vector<Eigen::Vector2d> x(static_cast<size_t>(n_steps) + 1);
  std::vector<Eigen::Vector2d> d(static_cast<size_t>(n_steps) + 1);

  // Dense state lookup over history plus the segments completed so far.
  const auto lookup = [&](double t, int done) -> Eigen::Vector2d {
    if (t <= 0.0) return history.f(std::max(t, -history.length));
    const int k = std::min(static_cast<int>(t / dt), done - 1);
    const double s = std::clamp((t - dt * k) / dt, 0.0, 1.0);
    return hermite(s, x[k], x[k + 1], dt * d[k], dt * d[k + 1]);
  };
  const auto field = [&](double t, const Eigen::Vector2d& xt,
                         int done) -> Eigen::Vector2d {
    const Eigen::Vector2d x1 = lookup(t - 1.0, done);
    const Eigen::Vector2d xs = lookup(t - p.s0, done);
    if (xs(1) + eq.v0 < 1e-8) {
      throw PoleEncountered(t, "delayed inhibitor state reached the kinetics pole");
    }
    return gamma * rhs(p, eq, xt, x1, xs);
  };

  x[0] = history.f(0.0);
  d[0] = field(0.0, x[0], 0);
  for (int k = 0; k < n_steps; ++k) {
    const double t = dt * k;
    const Eigen::Vector2d k1 = d[k];
    const Eigen::Vector2d k2 = field(t + 0.5 * dt, x[k] + 0.5 * dt * k1, k);
    const Eigen::Vector2d k3 = field(t + 0.5 * dt, x[k] + 0.5 * dt * k2, k);
    const Eigen::Vector2d k4 = field(t + dt, x[k] + dt * k3, k);
    x[k + 1] = x[k] + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    d[k + 1] = field(t + dt, x[k + 1], k);
  }
  return Trajectory(history, dt, std::move(x), std::move(d));
}

double return_map_error(const ModelParams& p, const Equilibrium& eq,
                        const PeriodicOrbit& orbit, double h) {
  if (!(orbit.T > 0.0)) throw ConfigError("return_map_error: orbit period must be positive");
  const double L = std::max(1.0, p.s0);
  const HistorySegment hist = HistorySegment::from_orbit(orbit, L);
  const double step = h > 0.0 ? h : orbit.T / 2048.0;
  const Trajectory traj = integrate(p, eq, orbit.gamma, hist, orbit.T, step);

  double err = 0.0;
  constexpr int kGrid = 256;
  for (int i = 0; i < kGrid; ++i) {
    const double theta = -L * static_cast<double>(i) / (kGrid - 1);
    const Eigen::Vector2d a = traj.eval(orbit.T + theta);
    const Eigen::Vector2d b = hist.f(theta);
    err = std::max(err, (a - b).norm());
  }
  return err;
}

}  // namespace gmdde
