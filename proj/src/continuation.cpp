#include "gmdde/continuation.hpp"

#include <cmath>

#include "gmdde/errors.hpp"

namespace gmdde {

namespace {

// Inner product on packed (X, T, gamma) vectors.  The state block is
// averaged over its entries so that mesh refinement leaves step lengths
// comparable.
double scaled_dot(int nx, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.head(nx).dot(b.head(nx)) / nx + a(nx) * b(nx) +
         a(nx + 1) * b(nx + 1);
}

double scaled_norm(int nx, const Eigen::VectorXd& a) {
  return std::sqrt(scaled_dot(nx, a, a));
}

Eigen::VectorXd pack(const Collocation& sys, const PeriodicOrbit& o) {
  if (o.X.size() != sys.n_state()) {
    throw ConfigError("orbit state size does not match the mesh");
  }
  Eigen::VectorXd z(sys.n_state() + 2);
  z << o.X, o.T, o.gamma;
  return z;
}

// Scaled constraint gradient written into the last row of the bordered
// matrix.
void set_border_row(Eigen::MatrixXd& A, int nx, const Eigen::VectorXd& t) {
  A.row(nx + 1).head(nx) = t.head(nx).transpose() / nx;
  A(nx + 1, nx) = t(nx);
  A(nx + 1, nx + 1) = t(nx + 1);
}

// Tangent at an accepted point: null direction of the bordered system,
// oriented by the previous tangent.  Falls back to the previous tangent
// when the bordered matrix degenerates.
Eigen::VectorXd update_tangent(const Collocation& sys, const Eigen::VectorXd& z,
                               const Eigen::VectorXd& t_prev,
                               const Eigen::VectorXd& phase_ref) {
  const int n = sys.n_state();
  Eigen::MatrixXd A(n + 2, n + 2);
  A.topRows(n + 1) =
      sys.jacobian(z.head(n), z(n), z(n + 1), phase_ref, true);
  set_border_row(A, n, t_prev);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 2);
  rhs(n + 1) = 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (lu.rcond() < 1e-14) return t_prev;
  Eigen::VectorXd t = lu.solve(rhs);
  const double norm = scaled_norm(n, t);
  if (!(norm > 0.0) || !std::isfinite(norm)) return t_prev;
  return t / norm;
}

struct StepOutcome {
  bool ok = false;
  int iterations = 0;
  Eigen::VectorXd z;
};

// Newton on the collocation system plus the arclength constraint
// <z - z_prev, t>_c = h at fixed tangent.  Any model-side failure
// (kinetics pole, delay wrap, singular iteration matrix, no convergence)
// reports a failed step instead of throwing, so the driver can shorten
// the step.
StepOutcome correct_step(const Collocation& sys, const Eigen::VectorXd& z_prev,
                         const Eigen::VectorXd& tangent, double h,
                         const Eigen::VectorXd& phase_ref, double tol,
                         int max_iter) {
  const int n = sys.n_state();
  StepOutcome out;
  Eigen::VectorXd z = z_prev + h * tangent;
  Eigen::VectorXd r(n + 2);
  try {
    for (int it = 0; it <= max_iter; ++it) {
      r.head(n + 1) = sys.residual(z.head(n), z(n), z(n + 1), phase_ref);
      r(n + 1) = scaled_dot(n, z - z_prev, tangent) - h;
      if (r.lpNorm<Eigen::Infinity>() < tol) {
        out.ok = true;
        out.iterations = it;
        out.z = std::move(z);
        return out;
      }
      if (it == max_iter) break;
      Eigen::MatrixXd A(n + 2, n + 2);
      A.topRows(n + 1) =
          sys.jacobian(z.head(n), z(n), z(n + 1), phase_ref, true);
      set_border_row(A, n, tangent);
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rcond() < 1e-14) return out;
      z += lu.solve(-r);
    }
  } catch (const Error&) {
    // fall through to the failed outcome
  }
  return out;
}

}  // namespace

void ContinuationSettings::validate() const {
  if (!(h0 > 0.0) || !(hmin > 0.0) || !(hmax >= h0) || hmin > h0) {
    throw ConfigError("continuation steps need 0 < hmin <= h0 <= hmax");
  }
  if (max_steps < 1) throw ConfigError("max_steps must be positive");
  if (!(gamma_min < gamma_max)) {
    throw ConfigError("gamma_min must lie below gamma_max");
  }
  if (!(tol > 0.0) || newton_max_iter < 1) {
    throw ConfigError("corrector tolerance and iteration cap must be positive");
  }
}

BranchStart start_branch(const Collocation& sys, const PLExpansion& pl,
                         double eps0) {
  double e = eps0 > 0.0 ? eps0 : auto_epsilon(pl);
  for (int attempt = 0;; ++attempt) {
    try {
      BranchStart bs;
      bs.first = newton_correct(sys, pl.evaluate(e, 3)).orbit;
      bs.second = newton_correct(sys, pl.evaluate(1.15 * e, 3)).orbit;
      return bs;
    } catch (const Error&) {
      // An oversized guess can also leave the corrector through the
      // kinetics-pole or period guards; all of these shrink away with eps.
      if (attempt == 5) throw;
      e /= 2.0;
    }
  }
}

Eigen::VectorXd secant_tangent(const Collocation& sys, const PeriodicOrbit& a,
                               const PeriodicOrbit& b) {
  Eigen::VectorXd d = pack(sys, b) - pack(sys, a);
  const double norm = scaled_norm(sys.n_state(), d);
  if (!(norm > 0.0)) {
    throw ConfigError("secant endpoints coincide; no branch direction");
  }
  return d / norm;
}

Branch continue_branch(const Collocation& sys, const PeriodicOrbit& start,
                       const Eigen::VectorXd& tangent,
                       const ContinuationSettings& settings) {
  settings.validate();
  const int n = sys.n_state();
  if (tangent.size() != n + 2) {
    throw ConfigError("tangent size does not match the mesh");
  }
  Eigen::VectorXd t = tangent;
  {
    const double norm = scaled_norm(n, t);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ConfigError("tangent must be nonzero and finite");
    }
    t /= norm;
  }

  Branch br;
  const auto push = [&](const PeriodicOrbit& o, double arc) {
    br.points.push_back({o, o.gamma, o.T, o.l2_norm(), o.sup_norm(), arc});
  };

  Eigen::VectorXd ref = sys.phase_ref_from(start);
  Eigen::VectorXd z_prev = pack(sys, start);
  push(start, 0.0);

  t = update_tangent(sys, z_prev, t, ref);
  double h = settings.h0;
  for (int step = 0; step < settings.max_steps; ++step) {
    StepOutcome out;
    while (true) {
      out = correct_step(sys, z_prev, t, h, ref, settings.tol,
                         settings.newton_max_iter);
      if (out.ok) break;
      if (settings.fixed_step) {
        br.termination = Termination::NewtonFail;
        return br;
      }
      h /= 2.0;
      if (h < settings.hmin) {
        br.termination = Termination::StepFloor;
        return br;
      }
    }

    const double ds = scaled_norm(n, out.z - z_prev);
    const PeriodicOrbit o =
        sys.make_orbit(out.z.head(n), out.z(n), out.z(n + 1));
    push(o, br.points.back().arclength + ds);
    z_prev = std::move(out.z);
    if (settings.phase_ref == PhaseRefPolicy::EveryStep) {
      ref = sys.phase_ref_from(o);
    }
    if (o.gamma > settings.gamma_max || o.gamma < settings.gamma_min) {
      br.termination = Termination::GammaBound;
      return br;
    }
    t = update_tangent(sys, z_prev, t, ref);
    if (!settings.fixed_step && out.iterations <= 3) {
      h = std::min(2.0 * h, settings.hmax);
    }
  }
  br.termination = Termination::MaxSteps;
  return br;
}

std::vector<std::array<double, 4>> branch_summary(const Branch& b) {
  std::vector<std::array<double, 4>> rows;
  rows.reserve(b.points.size());
  for (const BranchPoint& p : b.points) {
    rows.push_back({p.gamma, p.T, p.l2, p.sup});
  }
  return rows;
}

}  // namespace gmdde
