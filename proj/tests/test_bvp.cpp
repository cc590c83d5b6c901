#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gmdde/bvp.hpp"
#include "gmdde/hopf.hpp"
#include "gmdde/lindstedt.hpp"
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

PeriodicGuess guess_at(const Setup& s, double eps, int order) {
  PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, order);
  return pl.evaluate(eps, order);
}

}  // namespace

TEST_SUITE("bvp") {
  TEST_CASE("collocation nodes and weights are the classical values") {
    const Setup s = first_hopf("set1", 1.5);
    const Collocation c2(s.p, s.eq, Mesh{8, 2});
    const double r3 = std::sqrt(3.0);
    CHECK(c2.gauss_nodes()[0] == doctest::Approx(0.5 - r3 / 6.0).epsilon(1e-14));
    CHECK(c2.gauss_nodes()[1] == doctest::Approx(0.5 + r3 / 6.0).epsilon(1e-14));
    CHECK(c2.gauss_weights()[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c2.gauss_weights()[1] == doctest::Approx(0.5).epsilon(1e-14));

    const Collocation c3(s.p, s.eq, Mesh{8, 3});
    const double r35 = 0.5 * std::sqrt(3.0 / 5.0);
    CHECK(c3.gauss_nodes()[0] == doctest::Approx(0.5 - r35).epsilon(1e-14));
    CHECK(c3.gauss_nodes()[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c3.gauss_nodes()[2] == doctest::Approx(0.5 + r35).epsilon(1e-14));
    CHECK(c3.gauss_weights()[0] == doctest::Approx(5.0 / 18.0).epsilon(1e-14));
    CHECK(c3.gauss_weights()[1] == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(c3.gauss_weights()[2] == doctest::Approx(5.0 / 18.0).epsilon(1e-14));

    CHECK_THROWS_AS((Mesh{4, 4}.validate()), ConfigError);
    CHECK_THROWS_AS((Mesh{16, 1}.validate()), ConfigError);
    CHECK_THROWS_AS((Mesh{16, 8}.validate()), ConfigError);
  }

  TEST_CASE("representation reproduces piecewise polynomials exactly") {
    const Setup s = first_hopf("set1", 1.5);
    const Mesh mesh{8, 4};
    const Collocation sys(s.p, s.eq, mesh);
    // A degree-4 polynomial with matching endpoint values survives the
    // periodic wrap of the sample at theta = 1, so every subinterval
    // interpolant reproduces it exactly.
    const auto poly = [](double t) { return t * t * (1.0 - t) * (1.0 - t); };
    const auto dpoly = [](double t) {
      return 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    };
    const int np = sys.n_points();
    Eigen::VectorXd X(2 * np);
    for (int p = 0; p < np; ++p) {
      const double t = static_cast<double>(p) / np;
      X(2 * p) = 3.0 * poly(t) + 0.25;
      X(2 * p + 1) = -2.0 * poly(t) + 0.5;
    }
    for (double t : {0.013, 0.21, 0.4999, 0.62, 0.875, 0.9903}) {
      const Eigen::Vector2d v = sys.eval_state(X, t);
      CHECK(v(0) == doctest::Approx(3.0 * poly(t) + 0.25).epsilon(1e-13));
      CHECK(v(1) == doctest::Approx(-2.0 * poly(t) + 0.5).epsilon(1e-13));
      const Eigen::Vector2d d = sys.eval_state_derivative(X, t);
      CHECK(d(0) == doctest::Approx(3.0 * dpoly(t)).epsilon(1e-10));
      CHECK(d(1) == doctest::Approx(-2.0 * dpoly(t)).epsilon(1e-10));
    }
  }

  TEST_CASE("jacobian matches finite differences") {
    const Setup s = first_hopf("set1", 1.5);
    const Mesh mesh{8, 3};
    const Collocation sys(s.p, s.eq, mesh);
    const PeriodicGuess g = guess_at(s, 0.05, 2);
    const Eigen::VectorXd X = sys.state_from(g);
    const Eigen::VectorXd ref = sys.phase_ref_from(g);
    const double T = g.T;
    const double gamma = g.gamma;

    const Eigen::MatrixXd J = sys.jacobian(X, T, gamma, ref, true);
    const int n = sys.n_state();
    REQUIRE(J.rows() == n + 1);
    REQUIRE(J.cols() == n + 2);

    const double h = 1e-6;
    Eigen::MatrixXd Jfd(n + 1, n + 2);
    for (int c = 0; c < n; ++c) {
      Eigen::VectorXd Xp = X;
      Eigen::VectorXd Xm = X;
      Xp(c) += h;
      Xm(c) -= h;
      Jfd.col(c) = (sys.residual(Xp, T, gamma, ref) -
                    sys.residual(Xm, T, gamma, ref)) /
                   (2.0 * h);
    }
    Jfd.col(n) = (sys.residual(X, T + h, gamma, ref) -
                  sys.residual(X, T - h, gamma, ref)) /
                 (2.0 * h);
    Jfd.col(n + 1) = (sys.residual(X, T, gamma + h, ref) -
                      sys.residual(X, T, gamma - h, ref)) /
                     (2.0 * h);
    const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
    CHECK((J - Jfd).cwiseAbs().maxCoeff() / scale <= 5e-6);

    // Phase gradient row is nonzero.
    CHECK(J.row(n).head(n).norm() > 1e-3);
  }

  TEST_CASE("equilibrium state solves the equations but is a rejected guess") {
    const Setup s = first_hopf("set1", 1.5);
    const Collocation sys(s.p, s.eq, Mesh{});
    const Eigen::VectorXd X = Eigen::VectorXd::Zero(sys.n_state());
    const Eigen::VectorXd ref = Eigen::VectorXd::Ones(sys.n_state());
    const Eigen::VectorXd r =
        sys.residual(X, 2.0 * std::numbers::pi / s.hp.omega0, s.hp.gamma0, ref);
    CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-12);

    PeriodicGuess flat;
    flat.gamma = s.hp.gamma0;
    flat.omega = s.hp.omega0;
    flat.T = 2.0 * std::numbers::pi / s.hp.omega0;
    CHECK_THROWS_AS(newton_correct(sys, flat), DegenerateGuess);
  }

  TEST_CASE("newton corrects the expansion guess") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 4);
    const double eps = auto_epsilon(pl);
    const PeriodicGuess g = pl.evaluate(eps, 3);
    const Collocation sys(s.p, s.eq, Mesh{});
    const NewtonResult res = newton_correct(sys, g);

    CHECK(res.iterations <= 10);
    CHECK(res.residual < 1e-10);
    CHECK(res.initial_residual < 1e-3);
    CHECK(res.orbit.T == doctest::Approx(g.T).epsilon(1e-4));
    CHECK(res.orbit.gamma == g.gamma);

    // Re-evaluated residual at the solution, phase row included.
    const Eigen::VectorXd r = sys.residual(res.orbit.X, res.orbit.T,
                                           res.orbit.gamma,
                                           sys.phase_ref_from(g));
    CHECK(r.lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(std::abs(r(sys.n_state())) < 1e-10);  // phase residual

    // Dense defect between nodes is bounded by the interpolation order.
    double defect = 0.0;
    for (int i = 0; i < 1024; ++i) {
      const double th = static_cast<double>(i) / 1024;
      const Eigen::Vector2d x = res.orbit.eval(th);
      const Eigen::Vector2d x1 = res.orbit.eval(th - 1.0 / res.orbit.T);
      const Eigen::Vector2d xs = res.orbit.eval(th - s.p.s0 / res.orbit.T);
      const Eigen::Vector2d f = rhs(s.p, s.eq, x, x1, xs);
      defect = std::max(defect,
                        (res.orbit.derivative(th) -
                         res.orbit.T * res.orbit.gamma * f)
                            .norm());
    }
    CHECK(defect < 1e-6);

    // The orbit is periodic by construction and positive in original
    // coordinates.
    for (int i = 0; i < 64; ++i) {
      const double th = static_cast<double>(i) / 64;
      CHECK((res.orbit.eval(th + 1.0) - res.orbit.eval(th)).norm() == 0.0);
      const Eigen::Vector2d x = res.orbit.eval(th);
      CHECK(x(0) + s.eq.u0 > 0.0);
      CHECK(x(1) + s.eq.v0 > 0.0);
    }

    // A corrected orbit re-inserted as its own guess is a fixed point.
    const NewtonResult again =
        newton_correct(sys, res.orbit.X, res.orbit.T, res.orbit.gamma,
                       sys.phase_ref_from(res.orbit));
    CHECK(again.iterations <= 2);
    CHECK(again.residual < 1e-10);
  }

  TEST_CASE("distance to the truncated expansion scales at third order") {
    // Correcting at the series-truncated gamma leaves an amplitude
    // mismatch of size (gamma_4 / 2 gamma_2) eps^3 along the branch, so
    // the phase-aligned distance scales with the cube of eps, not with
    // the first neglected series order.
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 4);
    const double eps = auto_epsilon(pl);
    const Collocation sys(s.p, s.eq, Mesh{});
    double d[2];
    for (int k = 0; k < 2; ++k) {
      const PeriodicGuess g = pl.evaluate(eps / (k == 0 ? 1.0 : 2.0), 3);
      const NewtonResult res = newton_correct(sys, g);
      d[k] = orbit_distance(g, res.orbit);
    }
    CHECK(d[0] > d[1]);
    const double expo = std::log2(d[0] / d[1]);
    CHECK(expo >= 2.6);
    CHECK(expo <= 3.4);
  }

  TEST_CASE("residual of a resampled fine orbit decays at the degree order") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 4);
    const double eps = auto_epsilon(pl);
    const NewtonResult fine =
        newton_correct(Collocation(s.p, s.eq, Mesh{256, 4}),
                       pl.evaluate(eps, 3));
    // The derivative interpolation error of the degree-m representation
    // dominates, so the node residual decays at order m (not m+1) once
    // the mesh resolves the orbit.
    std::vector<double> resid;
    for (int M : {12, 24, 48, 96}) {
      const Collocation coarse(s.p, s.eq, Mesh{M, 4});
      const Eigen::VectorXd Xc = coarse.state_from(fine.orbit);
      const Eigen::VectorXd r =
          coarse.residual(Xc, fine.orbit.T, fine.orbit.gamma,
                          coarse.phase_ref_from(fine.orbit));
      resid.push_back(r.lpNorm<Eigen::Infinity>());
    }
    for (size_t i = 1; i < resid.size(); ++i) {
      CHECK(resid[i] < resid[i - 1]);
      CHECK(std::log2(resid[i - 1] / resid[i]) >= 3.4);
    }
    CHECK(std::log2(resid[2] / resid[3]) <= 4.6);
  }

  TEST_CASE("delay wrapping beyond the supported bound is rejected") {
    const Setup s = first_hopf("set1", 10.0);
    const Collocation sys(s.p, s.eq, Mesh{});
    const Eigen::VectorXd X = Eigen::VectorXd::Constant(sys.n_state(), 0.01);
    const Eigen::VectorXd ref = Eigen::VectorXd::Ones(sys.n_state());
    CHECK_THROWS_AS(sys.residual(X, 1.0, 1.0, ref), MeshTooCoarse);
    CHECK_THROWS_AS(sys.jacobian(X, 1.0, 1.0, ref, false), MeshTooCoarse);
  }

  TEST_CASE("orbit distance is phase aligned") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 4);
    const double eps = auto_epsilon(pl);
    const Collocation sys(s.p, s.eq, Mesh{});
    const PeriodicOrbit o = newton_correct(sys, pl.evaluate(eps, 3)).orbit;

    CHECK(orbit_distance(o, o) == 0.0);
    for (double shift : {0.3, 0.2971113}) {
      const double d = orbit_distance(
          [&](double t) { return o.eval(t + shift); },
          [&](double t) { return o.eval(t); });
      CHECK(d <= 2e-5);
    }
    // Orbits at different amplitudes stay separated.
    const PeriodicOrbit o2 =
        newton_correct(sys, pl.evaluate(eps / 2.0, 3)).orbit;
    CHECK(orbit_distance(o, o2) > 1e-3);
  }

  TEST_CASE("orbit serialization round trips") {
    const Setup s = first_hopf("set1", 1.5);
    PLExpansion pl = PLExpansion::build(s.p, s.eq, s.lin, s.hp, 3);
    const Collocation sys(s.p, s.eq, Mesh{});
    const PeriodicOrbit o =
        newton_correct(sys, pl.evaluate(auto_epsilon(pl), 3)).orbit;
    const nlohmann::json j = o.to_json();
    CHECK(j.at("samples").size() == 256);  // default mesh: 64 * 4 points
    const PeriodicOrbit back = PeriodicOrbit::from_json(j);
    CHECK(back.T == o.T);
    CHECK(back.gamma == o.gamma);
    CHECK(back.mesh.M == o.mesh.M);
    CHECK(back.X == o.X);
  }
}
