#include "gmdde/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace gmdde {

namespace {

// Largest number of period wraps a delayed argument may take before the
// discretization is rejected as under-resolved.
constexpr double kMaxDelayWraps = 8.0;

// Gauss-Legendre nodes and weights on [0, 1], ascending; weights sum to 1.
void gauss_legendre_unit(int m, std::vector<double>& nodes,
                         std::vector<double>& weights) {
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double pp = 1.0;
    for (int it = 0; it < 64; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * (pp * pp));
  }
}

// Degree-m Lagrange basis on the equispaced local points j/m.
std::vector<double> lagrange_values(int m, double sigma) {
  std::vector<double> out(m + 1, 1.0);
  for (int j = 0; j <= m; ++j) {
    const double sj = static_cast<double>(j) / m;
    for (int k = 0; k <= m; ++k) {
      if (k == j) continue;
      const double sk = static_cast<double>(k) / m;
      out[j] *= (sigma - sk) / (sj - sk);
    }
  }
  return out;
}

std::vector<double> lagrange_derivatives(int m, double sigma) {
  std::vector<double> out(m + 1, 0.0);
  for (int j = 0; j <= m; ++j) {
    const double sj = static_cast<double>(j) / m;
    double den = 1.0;
    for (int k = 0; k <= m; ++k) {
      if (k != j) den *= sj - static_cast<double>(k) / m;
    }
    double num = 0.0;
    for (int i = 0; i <= m; ++i) {
      if (i == j) continue;
      double prod = 1.0;
      for (int k = 0; k <= m; ++k) {
        if (k != j && k != i) prod *= sigma - static_cast<double>(k) / m;
      }
      num += prod;
    }
    out[j] = num / den;
  }
  return out;
}

struct Location {
  int interval = 0;
  double sigma = 0.0;
};

Location locate(const Mesh& mesh, double theta) {
  double w = theta - std::floor(theta);
  double u = w * mesh.M;
  int i = static_cast<int>(u);
  if (i >= mesh.M) {
    i = mesh.M - 1;
    u = mesh.M;
  }
  return {i, u - i};
}

int point_index(const Mesh& mesh, int interval, int j) {
  return (interval * mesh.m + j) % (mesh.M * mesh.m);
}

Eigen::Vector2d point_value(const Eigen::VectorXd& X, int p) {
  return {X(2 * p), X(2 * p + 1)};
}

Eigen::Vector2d eval_on(const Mesh& mesh, const Eigen::VectorXd& X,
                        double theta) {
  const Location loc = locate(mesh, theta);
  const std::vector<double> l = lagrange_values(mesh.m, loc.sigma);
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  for (int j = 0; j <= mesh.m; ++j) {
    out += l[j] * point_value(X, point_index(mesh, loc.interval, j));
  }
  return out;
}

Eigen::Vector2d eval_deriv_on(const Mesh& mesh, const Eigen::VectorXd& X,
                              double theta) {
  const Location loc = locate(mesh, theta);
  const std::vector<double> d = lagrange_derivatives(mesh.m, loc.sigma);
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  for (int j = 0; j <= mesh.m; ++j) {
    out += d[j] * point_value(X, point_index(mesh, loc.interval, j));
  }
  return mesh.M * out;
}

double state_amplitude(const Eigen::VectorXd& X) {
  const int np = static_cast<int>(X.size()) / 2;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (int p = 0; p < np; ++p) mean += point_value(X, p);
  mean /= static_cast<double>(np);
  double amp = 0.0;
  for (int p = 0; p < np; ++p) {
    amp = std::max(amp, (point_value(X, p) - mean).norm());
  }
  return amp;
}

}  // namespace

void Mesh::validate() const {
  if (M < 8) throw ConfigError("mesh: at least 8 subintervals required");
  if (m < 2 || m > 7) throw ConfigError("mesh: degree must lie in [2, 7]");
}

Eigen::Vector2d PeriodicOrbit::eval(double theta) const {
  return eval_on(mesh, X, theta);
}

Eigen::Vector2d PeriodicOrbit::derivative(double theta) const {
  return eval_deriv_on(mesh, X, theta);
}

double PeriodicOrbit::amplitude() const { return state_amplitude(X); }

double PeriodicOrbit::l2_norm() const {
  std::vector<double> nodes;
  std::vector<double> weights;
  gauss_legendre_unit(mesh.m, nodes, weights);
  double acc = 0.0;
  for (int i = 0; i < mesh.M; ++i) {
    for (int q = 0; q < mesh.m; ++q) {
      const double theta = (i + nodes[q]) / mesh.M;
      acc += weights[q] / mesh.M * eval(theta).squaredNorm();
    }
  }
  return std::sqrt(acc);
}

double PeriodicOrbit::sup_norm() const {
  double out = 0.0;
  constexpr int kSamples = 1024;
  for (int i = 0; i < kSamples; ++i) {
    out = std::max(out, eval(static_cast<double>(i) / kSamples).norm());
  }
  return out;
}

nlohmann::json PeriodicOrbit::to_json() const {
  nlohmann::json samples = nlohmann::json::array();
  const int np = mesh.M * mesh.m;
  for (int p = 0; p < np; ++p) {
    const double t = static_cast<double>(p) / np;
    samples.push_back({t, X(2 * p), X(2 * p + 1)});
  }
  return {{"gamma", gamma},
          {"T", T},
          {"mesh", {{"M", mesh.M}, {"m", mesh.m}}},
          {"samples", samples}};
}

PeriodicOrbit PeriodicOrbit::from_json(const nlohmann::json& j) {
  PeriodicOrbit o;
  o.mesh.M = j.at("mesh").at("M").get<int>();
  o.mesh.m = j.at("mesh").at("m").get<int>();
  o.mesh.validate();
  o.T = j.at("T").get<double>();
  o.gamma = j.at("gamma").get<double>();
  const auto& samples = j.at("samples");
  const int np = o.mesh.M * o.mesh.m;
  if (static_cast<int>(samples.size()) != np) {
    throw ConfigError("orbit samples do not match the mesh");
  }
  o.X.resize(2 * np);
  for (int p = 0; p < np; ++p) {
    o.X(2 * p) = samples.at(p).at(1).get<double>();
    o.X(2 * p + 1) = samples.at(p).at(2).get<double>();
  }
  return o;
}

Collocation::Collocation(const ModelParams& p, const Equilibrium& eq,
                         const Mesh& mesh)
    : params_(p), eq_(eq), mesh_(mesh) {
  params_.validate();
  mesh_.validate();
  gauss_legendre_unit(mesh_.m, nodes_, weights_);
  P_.resize(mesh_.m + 1, mesh_.m);
  D_.resize(mesh_.m + 1, mesh_.m);
  for (int q = 0; q < mesh_.m; ++q) {
    const std::vector<double> l = lagrange_values(mesh_.m, nodes_[q]);
    const std::vector<double> d = lagrange_derivatives(mesh_.m, nodes_[q]);
    for (int j = 0; j <= mesh_.m; ++j) {
      P_(j, q) = l[j];
      D_(j, q) = d[j];
    }
  }
}

Eigen::VectorXd Collocation::state_from(const PeriodicGuess& g) const {
  const int np = n_points();
  Eigen::VectorXd X(2 * np);
  for (int p = 0; p < np; ++p) {
    const double phase =
        2.0 * std::numbers::pi * static_cast<double>(p) / np;
    const Eigen::Vector2d x = g.y.eval(phase);
    X(2 * p) = x(0);
    X(2 * p + 1) = x(1);
  }
  return X;
}

Eigen::VectorXd Collocation::state_from(const PeriodicOrbit& o) const {
  const int np = n_points();
  if (o.mesh.M == mesh_.M && o.mesh.m == mesh_.m) return o.X;
  Eigen::VectorXd X(2 * np);
  for (int p = 0; p < np; ++p) {
    const Eigen::Vector2d x = o.eval(static_cast<double>(p) / np);
    X(2 * p) = x(0);
    X(2 * p + 1) = x(1);
  }
  return X;
}

Eigen::VectorXd Collocation::phase_ref_from(const PeriodicGuess& g) const {
  FourierScalar du = g.y.u.differentiated();
  FourierScalar dv = g.y.v.differentiated();
  Eigen::VectorXd ref(n_state());
  for (int i = 0; i < mesh_.M; ++i) {
    for (int q = 0; q < mesh_.m; ++q) {
      const double theta = (i + nodes_[q]) / mesh_.M;
      const double phase = 2.0 * std::numbers::pi * theta;
      const int at = 2 * (i * mesh_.m + q);
      ref(at) = 2.0 * std::numbers::pi * du.eval(phase);
      ref(at + 1) = 2.0 * std::numbers::pi * dv.eval(phase);
    }
  }
  return ref;
}

Eigen::VectorXd Collocation::phase_ref_from(const PeriodicOrbit& o) const {
  Eigen::VectorXd ref(n_state());
  for (int i = 0; i < mesh_.M; ++i) {
    for (int q = 0; q < mesh_.m; ++q) {
      const double theta = (i + nodes_[q]) / mesh_.M;
      const Eigen::Vector2d d = o.derivative(theta);
      const int at = 2 * (i * mesh_.m + q);
      ref(at) = d(0);
      ref(at + 1) = d(1);
    }
  }
  return ref;
}

Eigen::Vector2d Collocation::eval_state(const Eigen::VectorXd& X,
                                        double theta) const {
  return eval_on(mesh_, X, theta);
}

Eigen::Vector2d Collocation::eval_state_derivative(const Eigen::VectorXd& X,
                                                   double theta) const {
  return eval_deriv_on(mesh_, X, theta);
}

Eigen::VectorXd Collocation::residual(const Eigen::VectorXd& X, double T,
                                      double gamma,
                                      const Eigen::VectorXd& phase_ref) const {
  const int n = n_state();
  if (X.size() != n || phase_ref.size() != n) {
    throw ConfigError("collocation state/reference size mismatch");
  }
  if (!(T > 0.0)) throw Error("collocation: period became nonpositive");
  if (std::max(1.0, params_.s0) / T > kMaxDelayWraps) {
    throw MeshTooCoarse("delay wraps the period more than 8 times");
  }

  Eigen::VectorXd r(n + 1);
  double phase = 0.0;
  for (int i = 0; i < mesh_.M; ++i) {
    for (int q = 0; q < mesh_.m; ++q) {
      const double theta = (i + nodes_[q]) / mesh_.M;
      Eigen::Vector2d xc = Eigen::Vector2d::Zero();
      Eigen::Vector2d dxc = Eigen::Vector2d::Zero();
      for (int j = 0; j <= mesh_.m; ++j) {
        const Eigen::Vector2d v = point_value(X, point_index(mesh_, i, j));
        xc += P_(j, q) * v;
        dxc += D_(j, q) * v;
      }
      dxc *= mesh_.M;
      const Eigen::Vector2d x1 = eval_on(mesh_, X, theta - 1.0 / T);
      const Eigen::Vector2d xs = eval_on(mesh_, X, theta - params_.s0 / T);
      if (xs(1) + eq_.v0 < 1e-8) {
        throw PoleEncountered(theta,
                              "delayed inhibitor state reached the kinetics pole");
      }
      const Eigen::Vector2d f = rhs(params_, eq_, xc, x1, xs);
      const int at = 2 * (i * mesh_.m + q);
      r.segment<2>(at) = dxc - T * gamma * f;
      phase += weights_[q] / mesh_.M *
               (xc(0) * phase_ref(at) + xc(1) * phase_ref(at + 1));
    }
  }
  r(n) = phase;
  return r;
}

Eigen::MatrixXd Collocation::jacobian(const Eigen::VectorXd& X, double T,
                                      double gamma,
                                      const Eigen::VectorXd& phase_ref,
                                      bool with_gamma) const {
  const int n = n_state();
  if (X.size() != n || phase_ref.size() != n) {
    throw ConfigError("collocation state/reference size mismatch");
  }
  if (!(T > 0.0)) throw Error("collocation: period became nonpositive");
  if (std::max(1.0, params_.s0) / T > kMaxDelayWraps) {
    throw MeshTooCoarse("delay wraps the period more than 8 times");
  }

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1 + (with_gamma ? 1 : 0));
  for (int i = 0; i < mesh_.M; ++i) {
    for (int q = 0; q < mesh_.m; ++q) {
      const double theta = (i + nodes_[q]) / mesh_.M;
      Eigen::Vector2d xc = Eigen::Vector2d::Zero();
      for (int j = 0; j <= mesh_.m; ++j) {
        xc += P_(j, q) * point_value(X, point_index(mesh_, i, j));
      }
      const double t1 = theta - 1.0 / T;
      const double ts = theta - params_.s0 / T;
      const Eigen::Vector2d x1 = eval_on(mesh_, X, t1);
      const Eigen::Vector2d xs = eval_on(mesh_, X, ts);
      if (xs(1) + eq_.v0 < 1e-8) {
        throw PoleEncountered(theta,
                              "delayed inhibitor state reached the kinetics pole");
      }
      const Eigen::Vector2d f = rhs(params_, eq_, xc, x1, xs);
      const RhsJacobians jac = rhs_jacobians(params_, eq_, xc, x1, xs);
      const int at = 2 * (i * mesh_.m + q);

      for (int j = 0; j <= mesh_.m; ++j) {
        const int col = 2 * point_index(mesh_, i, j);
        J.block<2, 2>(at, col) +=
            mesh_.M * D_(j, q) * Eigen::Matrix2d::Identity() -
            T * gamma * P_(j, q) * jac.dx;
        J.row(n).segment<2>(col) +=
            weights_[q] / mesh_.M * P_(j, q) *
            phase_ref.segment<2>(at).transpose();
      }
      const Location loc1 = locate(mesh_, t1);
      const std::vector<double> l1 = lagrange_values(mesh_.m, loc1.sigma);
      for (int j = 0; j <= mesh_.m; ++j) {
        const int col = 2 * point_index(mesh_, loc1.interval, j);
        J.block<2, 2>(at, col) += -T * gamma * l1[j] * jac.dlag1;
      }
      const Location locs = locate(mesh_, ts);
      const std::vector<double> ls = lagrange_values(mesh_.m, locs.sigma);
      for (int j = 0; j <= mesh_.m; ++j) {
        const int col = 2 * point_index(mesh_, locs.interval, j);
        J.block<2, 2>(at, col) += -T * gamma * ls[j] * jac.dlag_s0;
      }

      // d theta_delay / dT = delay / T^2 feeds the delayed arguments.
      const Eigen::Vector2d d1 = eval_deriv_on(mesh_, X, t1);
      const Eigen::Vector2d ds = eval_deriv_on(mesh_, X, ts);
      J.col(n).segment<2>(at) =
          -gamma * f -
          (gamma / T) * (jac.dlag1 * d1 + params_.s0 * jac.dlag_s0 * ds);
      if (with_gamma) J.col(n + 1).segment<2>(at) = -T * f;
    }
  }
  return J;
}

PeriodicOrbit Collocation::make_orbit(const Eigen::VectorXd& X, double T,
                                      double gamma) const {
  return {mesh_, X, T, gamma};
}

NewtonResult newton_correct(const Collocation& sys, const PeriodicGuess& guess,
                            double tol, int max_iter) {
  return newton_correct(sys, sys.state_from(guess), guess.T, guess.gamma,
                        sys.phase_ref_from(guess), tol, max_iter);
}

NewtonResult newton_correct(const Collocation& sys, const Eigen::VectorXd& X0,
                            double T0, double gamma,
                            const Eigen::VectorXd& phase_ref, double tol,
                            int max_iter) {
  if (state_amplitude(X0) < 1e-8) {
    throw DegenerateGuess("guess is indistinguishable from the equilibrium");
  }
  const int n = sys.n_state();
  Eigen::VectorXd X = X0;
  double T = T0;
  Eigen::VectorXd r = sys.residual(X, T, gamma, phase_ref);
  double rn = r.lpNorm<Eigen::Infinity>();
  const double initial = rn;
  for (int it = 0; it <= max_iter; ++it) {
    if (rn < tol) {
      return {sys.make_orbit(X, T, gamma), it, rn, initial};
    }
    if (it == max_iter) break;
    const Eigen::MatrixXd J = sys.jacobian(X, T, gamma, phase_ref, false);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    if (lu.rcond() < 1e-14) {
      throw SingularJacobian("collocation Jacobian is numerically singular");
    }
    const Eigen::VectorXd delta = lu.solve(-r);
    X += delta.head(n);
    T += delta(n);
    r = sys.residual(X, T, gamma, phase_ref);
    rn = r.lpNorm<Eigen::Infinity>();
  }
  throw NoConvergence(max_iter, rn, "periodic orbit correction did not converge");
}

double orbit_distance(const std::function<Eigen::Vector2d(double)>& a,
                      const std::function<Eigen::Vector2d(double)>& b) {
  constexpr int kGrid = 512;
  std::vector<Eigen::Vector2d> av(kGrid);
  std::vector<Eigen::Vector2d> bv(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    const double t = static_cast<double>(i) / kGrid;
    av[i] = a(t);
    bv[i] = b(t);
  }
  const auto coarse = [&](int shift) {
    double d = 0.0;
    for (int i = 0; i < kGrid; ++i) {
      d = std::max(d, (av[(i + shift) % kGrid] - bv[i]).norm());
    }
    return d;
  };
  int best_shift = 0;
  double best = coarse(0);
  for (int s = 1; s < kGrid; ++s) {
    const double d = coarse(s);
    if (d < best) {
      best = d;
      best_shift = s;
    }
  }
  const auto dist_at = [&](double sigma) {
    double d = 0.0;
    for (int i = 0; i < kGrid; ++i) {
      const double t = static_cast<double>(i) / kGrid;
      d = std::max(d, (a(t + sigma) - bv[i]).norm());
    }
    return d;
  };
  double sigma = static_cast<double>(best_shift) / kGrid;
  double window = 1.0 / kGrid;
  for (int round = 0; round < 2; ++round) {
    constexpr int kProbe = 16;
    double local_best = best;
    double local_sigma = sigma;
    for (int i = -kProbe; i <= kProbe; ++i) {
      const double s = sigma + window * i / kProbe;
      const double d = dist_at(s);
      if (d < local_best) {
        local_best = d;
        local_sigma = s;
      }
    }
    best = local_best;
    sigma = local_sigma;
    window /= kProbe;
  }
  return best;
}

double orbit_distance(const PeriodicOrbit& a, const PeriodicOrbit& b) {
  return orbit_distance([&a](double t) { return a.eval(t); },
                        [&b](double t) { return b.eval(t); });
}

double orbit_distance(const PeriodicGuess& a, const PeriodicOrbit& b) {
  const FourierSeries2 y = a.y;
  return orbit_distance(
      [y](double t) { return y.eval(2.0 * std::numbers::pi * t); },
      [&b](double t) { return b.eval(t); });
}

}  // namespace gmdde
