#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "gmdde/continuation.hpp"
#include "gmdde/hopf.hpp"
#include "gmdde/presets.hpp"

using namespace gmdde;

namespace {

struct Setup {
  ModelParams p;
  Equilibrium eq;
  LinearData lin;
  HopfPoint hp;
};

Setup first_hopf(const char* name, double s0) {
  const Preset pre = preset(name);
  const ModelParams p = make_params(pre, s0);
  const Equilibrium eq = solve_equilibria(p).at(pre.eq_index);
  const LinearData lin = linearize(p, eq);
  const HopfPoint hp = hopf_points(lin, pre.gamma_max).at(0);
  return {p, eq, lin, hp};
}

double recheck_residual(const Collocation& sys, const BranchPoint& q) {
  const Eigen::VectorXd r =
      sys.residual(q.orbit.X, q.T, q.gamma, sys.phase_ref_from(q.orbit));
  return r.lpNorm<Eigen::Infinity>();
}

// Cubic Lagrange interpolation of (gamma -> value) rows at a query gamma.
double interp_at(const std::vector<std::pair<double, double>>& tab_in,
                 double g) {
  std::vector<std::pair<double, double>> tab = tab_in;
  std::sort(tab.begin(), tab.end());
  int j = 0;
  while (j + 1 < static_cast<int>(tab.size()) && tab[j + 1].first < g) ++j;
  const int lo =
      std::max(0, std::min(static_cast<int>(tab.size()) - 4, j - 1));
  double acc = 0.0;
  for (int a = lo; a < lo + 4; ++a) {
    double l = tab[a].second;
    for (int b = lo; b < lo + 4; ++b) {
      if (a == b) continue;
      l *= (g - tab[b].first) / (tab[a].first - tab[b].first);
    }
    acc += l;
  }
  return acc;
}

}  // namespace

TEST_SUITE("continuation") {
  TEST_CASE("branch start refines the expansion guess") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 3);
    const Collocation sys(s.p, s.eq, Mesh{});
    const BranchStart bs = start_branch(sys, pl);

    CHECK(bs.first.gamma > s.hp.gamma0);
    CHECK(bs.second.gamma > bs.first.gamma);
    CHECK(bs.second.gamma < s.hp.gamma0 + 1e-3);
    CHECK(bs.first.amplitude() > 0.0);
    // The two starting amplitudes keep the 1.15 ratio of their seeds.
    CHECK(bs.second.l2_norm() / bs.first.l2_norm() ==
          doctest::Approx(1.15).epsilon(0.02));

    const Eigen::VectorXd t = secant_tangent(sys, bs.first, bs.second);
    CHECK(t.size() == sys.n_state() + 2);
    CHECK(t(sys.n_state() + 1) > 0.0);  // points toward growing gamma
  }

  TEST_CASE("oversized starting amplitude falls back to a smaller one") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 3);
    const Collocation sys(s.p, s.eq, Mesh{});
    const BranchStart bs = start_branch(sys, pl, 0.3);
    CHECK(bs.first.gamma > s.hp.gamma0);
    CHECK(bs.first.gamma < 3.0);
    CHECK(bs.second.gamma < 3.0);
    CHECK(bs.first.amplitude() > 0.1);
  }

  TEST_CASE("short branch satisfies the solver contract") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 3);
    const Collocation sys(s.p, s.eq, Mesh{});
    const BranchStart bs = start_branch(sys, pl);

    ContinuationSettings cs;
    cs.gamma_max = s.hp.gamma0 + 0.04;
    const Branch br = continue_branch(
        sys, bs.second, secant_tangent(sys, bs.first, bs.second), cs);

    CHECK(br.termination == Termination::GammaBound);
    CHECK(br.points.back().gamma > cs.gamma_max);
    REQUIRE(br.points.size() >= 10);

    for (size_t i = 0; i < br.points.size(); ++i) {
      CHECK(recheck_residual(sys, br.points[i]) < 1e-9);
      if (i > 0) {
        CHECK(br.points[i].arclength > br.points[i - 1].arclength);
      }
    }

    // Squared amplitude grows linearly in gamma - gamma0 near the
    // bifurcation: the slope stays positive and drifts slowly.
    std::vector<double> slope;
    for (size_t i = 0; i < 10; ++i) {
      const double dg = br.points[i].gamma - s.hp.gamma0;
      REQUIRE(dg > 0.0);
      slope.push_back(br.points[i].l2 * br.points[i].l2 / dg);
    }
    for (size_t i = 1; i < slope.size(); ++i) {
      CHECK(slope[i] > 0.0);
      CHECK(std::abs(slope[i] / slope[i - 1] - 1.0) < 0.15);
    }
  }

  TEST_CASE("branch follows the family to a long-period end") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 3);
    const Collocation sys(s.p, s.eq, Mesh{});
    const BranchStart bs = start_branch(sys, pl);

    ContinuationSettings cs;
    cs.gamma_max = 6.0;
    cs.max_steps = 300;
    const Branch br = continue_branch(
        sys, bs.second, secant_tangent(sys, bs.first, bs.second), cs);

    // The family ends with the period growing without bound while gamma
    // levels off near 2.93: the orbit spends most of its cycle near the
    // neighboring saddle equilibrium, whose offset has norm sqrt(26).
    CHECK(br.termination == Termination::MaxSteps);
    double gamma_peak = 0.0;
    for (const BranchPoint& q : br.points) {
      gamma_peak = std::max(gamma_peak, q.gamma);
    }
    CHECK(gamma_peak > 2.9);
    CHECK(gamma_peak < 3.0);
    CHECK(br.points.back().T > 120.0);
    CHECK(br.points.back().l2 > 4.5);
    CHECK(br.points.back().l2 < std::sqrt(26.0));
    CHECK(recheck_residual(sys, br.points.back()) < 1e-9);
  }

  TEST_CASE("termination reports the configured cause") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 3);
    const Collocation sys(s.p, s.eq, Mesh{});
    const BranchStart bs = start_branch(sys, pl);
    const Eigen::VectorXd t0 = secant_tangent(sys, bs.first, bs.second);

    ContinuationSettings budget;
    budget.max_steps = 5;
    const Branch b1 = continue_branch(sys, bs.second, t0, budget);
    CHECK(b1.termination == Termination::MaxSteps);
    CHECK(b1.points.size() == 6);  // start + max_steps accepted points

    ContinuationSettings floor;
    floor.tol = 1e-16;  // unreachable, so every step fails and halves
    floor.hmin = 1e-3;
    const Branch b2 = continue_branch(sys, bs.second, t0, floor);
    CHECK(b2.termination == Termination::StepFloor);
    CHECK(b2.points.size() == 1);

    ContinuationSettings fixed;
    fixed.tol = 1e-16;
    fixed.fixed_step = true;
    const Branch b3 = continue_branch(sys, bs.second, t0, fixed);
    CHECK(b3.termination == Termination::NewtonFail);
    CHECK(b3.points.size() == 1);

    ContinuationSettings bad;
    bad.gamma_min = 2.0;
    bad.gamma_max = 1.0;
    CHECK_THROWS_AS(continue_branch(sys, bs.second, t0, bad), ConfigError);
    CHECK_THROWS_AS(
        continue_branch(sys, bs.second, Eigen::VectorXd::Zero(3),
                        ContinuationSettings{}),
        ConfigError);
    CHECK_THROWS_AS(
        continue_branch(sys, bs.second,
                        Eigen::VectorXd::Zero(sys.n_state() + 2),
                        ContinuationSettings{}),
        ConfigError);
  }

  TEST_CASE("a backward pass retraces the branch") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 3);
    const Collocation sys(s.p, s.eq, Mesh{});
    const BranchStart bs = start_branch(sys, pl);

    ContinuationSettings cs;
    cs.h0 = 5e-3;
    cs.fixed_step = true;
    cs.max_steps = 24;
    cs.phase_ref = PhaseRefPolicy::Fixed;

    const Branch fwd = continue_branch(
        sys, bs.second, secant_tangent(sys, bs.first, bs.second), cs);
    REQUIRE(fwd.points.size() == 25);
    const size_t nf = fwd.points.size();
    const Branch bwd = continue_branch(
        sys, fwd.points[nf - 1].orbit,
        secant_tangent(sys, fwd.points[nf - 1].orbit,
                       fwd.points[nf - 2].orbit),
        cs);
    REQUIRE(bwd.points.size() == 25);
    CHECK(bwd.points.back().gamma ==
          doctest::Approx(fwd.points.front().gamma).epsilon(1e-5));

    // Fixed steps advance by almost exactly the requested arclength: the
    // constraint pins the tangential component and curvature only adds a
    // second-order correction.
    for (size_t i = 1; i < nf; ++i) {
      const double ds =
          fwd.points[i].arclength - fwd.points[i - 1].arclength;
      CHECK(ds >= cs.h0 * (1.0 - 1e-12));
      CHECK(ds <= cs.h0 * 1.0001);
    }

    // Period and mean-square norm are functions of gamma along this arc;
    // compare the passes at matched gamma, which is insensitive to the
    // phase and step placement.
    std::vector<std::pair<double, double>> tabT, tabL;
    for (const BranchPoint& q : bwd.points) {
      tabT.push_back({q.gamma, q.T});
      tabL.push_back({q.gamma, q.l2});
    }
    double worstT = 0.0, worstL = 0.0;
    for (size_t k = 4; k + 4 < nf; ++k) {
      const double g = fwd.points[k].gamma;
      worstT = std::max(worstT, std::abs(interp_at(tabT, g) - fwd.points[k].T));
      worstL =
          std::max(worstL, std::abs(interp_at(tabL, g) - fwd.points[k].l2));
    }
    CHECK(worstT < 1e-6);
    CHECK(worstL < 1e-6);
  }

  TEST_CASE("branch summary mirrors the points") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 3);
    const Collocation sys(s.p, s.eq, Mesh{});
    const BranchStart bs = start_branch(sys, pl);
    ContinuationSettings cs;
    cs.max_steps = 4;
    const Branch br = continue_branch(
        sys, bs.second, secant_tangent(sys, bs.first, bs.second), cs);

    const auto rows = branch_summary(br);
    REQUIRE(rows.size() == br.points.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i][0] == br.points[i].gamma);
      CHECK(rows[i][1] == br.points[i].T);
      CHECK(rows[i][2] == br.points[i].l2);
      CHECK(rows[i][3] == br.points[i].sup);
    }
    CHECK(branch_summary(Branch{}).empty());
  }

  TEST_CASE("continuation is deterministic") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 3);
    const Collocation sys(s.p, s.eq, Mesh{});
    const BranchStart bs = start_branch(sys, pl);
    ContinuationSettings cs;
    cs.max_steps = 6;
    const Eigen::VectorXd t0 = secant_tangent(sys, bs.first, bs.second);
    const Branch b1 = continue_branch(sys, bs.second, t0, cs);
    const Branch b2 = continue_branch(sys, bs.second, t0, cs);
    REQUIRE(b1.points.size() == b2.points.size());
    for (size_t i = 0; i < b1.points.size(); ++i) {
      CHECK(b1.points[i].gamma == b2.points[i].gamma);
      CHECK(b1.points[i].T == b2.points[i].T);
      CHECK(b1.points[i].arclength == b2.points[i].arclength);
      CHECK(b1.points[i].orbit.X == b2.points[i].orbit.X);
    }
  }
}
