#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "gmdde/bvp.hpp"
#include "gmdde/lindstedt.hpp"

namespace gmdde {

// Phase reference used by the corrector along the branch.  EveryStep
// re-anchors the phase to the previously accepted orbit; Fixed keeps the
// reference of the starting orbit, which makes a forward and a backward
// pass over the same arc directly comparable.
enum class PhaseRefPolicy { EveryStep, Fixed };

enum class Termination {
  GammaBound,  // gamma left [gamma_min, gamma_max]; crossing point kept
  MaxSteps,
  StepFloor,   // corrector kept failing down to hmin
  NewtonFail,  // corrector failed with step adaptation disabled
};

struct ContinuationSettings {
  double h0 = 1e-2;
  double hmin = 1e-6;
  double hmax = 0.5;
  int max_steps = 2000;
  double gamma_min = 0.0;
  double gamma_max = 30.0;
  double tol = 1e-10;
  int newton_max_iter = 8;
  bool fixed_step = false;  // keep h = h0; a corrector failure terminates
  PhaseRefPolicy phase_ref = PhaseRefPolicy::EveryStep;
  void validate() const;
};

struct BranchPoint {
  PeriodicOrbit orbit;
  double gamma = 0.0;
  double T = 0.0;
  double l2 = 0.0;
  double sup = 0.0;
  double arclength = 0.0;  // cumulative scaled step length from the start
};

struct Branch {
  std::vector<BranchPoint> points;
  Termination termination = Termination::MaxSteps;
};

// Two phase-coherent corrected orbits bracketing the branch direction of
// growing amplitude; their secant seeds the first tangent.
struct BranchStart {
  PeriodicOrbit first;
  PeriodicOrbit second;
};

// Corrects the expansion guess at eps0 (auto-selected when 0) and at
// 1.15 * eps0.  Halves eps0 up to five times when the corrector does not
// converge before giving up.
BranchStart start_branch(const Collocation& sys, const PLExpansion& pl,
                         double eps0 = 0.0);

// Normalized branch direction from one corrected orbit to another in the
// scaled (X, T, gamma) variables.
Eigen::VectorXd secant_tangent(const Collocation& sys, const PeriodicOrbit& a,
                               const PeriodicOrbit& b);

// Pseudo-arclength continuation in (X, T, gamma) from a corrected orbit
// along an initial tangent.  Each step solves the collocation system plus
// the arclength constraint, with the exact bordered Jacobian; the tangent
// is updated from the bordered linear system, which preserves orientation.
// The step length doubles after fast corrector convergence (capped at
// hmax) and halves on failure (floored at hmin).  The starting point is
// points[0].
Branch continue_branch(const Collocation& sys, const PeriodicOrbit& start,
                       const Eigen::VectorXd& tangent,
                       const ContinuationSettings& settings);

// (gamma, T, l2, sup) rows, one per branch point.
std::vector<std::array<double, 4>> branch_summary(const Branch& b);

}  // namespace gmdde
