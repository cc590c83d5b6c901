#pragma once

#include <functional>
#include <vector>

#include "gmdde/bvp.hpp"
#include "gmdde/lindstedt.hpp"
#include "gmdde/model.hpp"

namespace gmdde {

// State history on [-length, 0] in integration time, supplied as a dense
// callable.  Must cover the largest delay of the run.
struct HistorySegment {
  double length = 0.0;
  std::function<Eigen::Vector2d(double)> f;

  static HistorySegment constant(double length, const Eigen::Vector2d& value);
  // Time-domain sampling of a phase-periodic object with period T = g.T:
  // x(t) = y(2 pi t / T), resp. orbit.eval(t / T).
  static HistorySegment from_guess(const PeriodicGuess& g, double length);
  static HistorySegment from_orbit(const PeriodicOrbit& o, double length);
};

// Fixed-step trajectory with cubic-Hermite dense output between nodes.
// Node derivatives are the exact right-hand sides at the nodes, so the
// interpolant is C^1 and locally fourth-order accurate.
class Trajectory {
 public:
  Trajectory(HistorySegment history, double h,
             std::vector<Eigen::Vector2d> nodes,
             std::vector<Eigen::Vector2d> derivatives);

  double t_end() const { return h_ * static_cast<double>(nodes_.size() - 1); }
  double step() const { return h_; }
  const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }

  // t in [-history.length, t_end]; outside throws HistoryTooShort.
  Eigen::Vector2d eval(double t) const;

 private:
  HistorySegment history_;
  double h_;
  std::vector<Eigen::Vector2d> nodes_;
  std::vector<Eigen::Vector2d> derivs_;
};

// Method-of-steps RK4 for x'(t) = gamma f(x(t), x(t-1), x(t-s0)).  The
// effective step divides t_end and is clamped to min(h, 1, s0), so every
// delayed lookup lands in already-completed history or dense output.
// Throws HistoryTooShort if the history does not cover max(1, s0), and
// PoleEncountered if the delayed inhibitor state reaches the kinetics pole.
Trajectory integrate(const ModelParams& p, const Equilibrium& eq, double gamma,
                     const HistorySegment& history, double t_end, double h);

// One-period return map defect of a corrected orbit: integrate from the
// orbit's own history over [0, T] and take the sup over a 256-point grid of
// the delay interval [-max(1, s0), 0] of |x(T + theta) - x(theta)|.
// h = 0 picks T/2048 clamped to the step bound above.
double return_map_error(const ModelParams& p, const Equilibrium& eq,
                        const PeriodicOrbit& orbit, double h = 0.0);

}  // namespace gmdde
