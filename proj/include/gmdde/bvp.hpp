#pragma once

#include <Eigen/Dense>
#include <functional>
#include <nlohmann/json.hpp>

#include "gmdde/lindstedt.hpp"
#include "gmdde/model.hpp"

namespace gmdde {

// Uniform collocation mesh: M subintervals, polynomial degree m per
// subinterval, Gauss-Legendre collocation nodes.
struct Mesh {
  int M = 64;
  int m = 4;
  void validate() const;  // M >= 8, 2 <= m <= 7
};

// Periodic orbit of the period-rescaled system on [0, 1], stored as values
// at the M*m distinct representation points theta_p = p / (M*m) (degree-m
// local interpolants on equispaced points per subinterval, endpoints
// shared).  Continuity and periodicity hold by construction.  Coordinates
// are deviations from the equilibrium.
struct PeriodicOrbit {
  Mesh mesh;
  Eigen::VectorXd X;  // 2*M*m values, point-major (u, v) pairs
  double T = 0.0;
  double gamma = 0.0;

  Eigen::Vector2d eval(double theta) const;        // theta taken mod 1
  Eigen::Vector2d derivative(double theta) const;  // d/dtheta
  double amplitude() const;  // sup over samples of |x - mean|_2
  double l2_norm() const;    // sqrt(int_0^1 |x|_2^2), Gauss quadrature
  double sup_norm() const;   // max over a 1024-sample grid of |x|_2

  nlohmann::json to_json() const;  // gamma, T, mesh, 256 samples
  static PeriodicOrbit from_json(const nlohmann::json& j);
};

// Discretized periodic boundary-value problem at fixed model parameters:
// residual rows are the collocation equations
//   x'(c) - T gamma f(x(c), x(c - 1/T), x(c - s0/T)) = 0
// at every Gauss node c, plus one integral phase row
//   int_0^1 <x(t), ref'(t)> dt = 0
// against a reference derivative sampled at the collocation nodes.  Delayed
// arguments are reduced modulo 1; the Jacobian is exact, including the
// chain through the delayed arguments and through T.
class Collocation {
 public:
  Collocation(const ModelParams& p, const Equilibrium& eq, const Mesh& mesh);

  int n_points() const { return mesh_.M * mesh_.m; }
  int n_state() const { return 2 * n_points(); }

  const Mesh& mesh() const { return mesh_; }
  const ModelParams& params() const { return params_; }
  const Equilibrium& equilibrium() const { return eq_; }

  // Representation values of a guess at the mesh points.
  Eigen::VectorXd state_from(const PeriodicGuess& g) const;
  Eigen::VectorXd state_from(const PeriodicOrbit& o) const;

  // Reference derivative at all collocation nodes, point-major, for the
  // phase row.
  Eigen::VectorXd phase_ref_from(const PeriodicGuess& g) const;
  Eigen::VectorXd phase_ref_from(const PeriodicOrbit& o) const;

  // Residual of size n_state() + 1 (collocation rows then the phase row).
  // Throws MeshTooCoarse when s0/T exceeds the supported wrap count and
  // PoleEncountered when a delayed inhibitor value reaches the kinetics
  // pole.
  Eigen::VectorXd residual(const Eigen::VectorXd& X, double T, double gamma,
                           const Eigen::VectorXd& phase_ref) const;

  // Jacobian over (X, T) and, when with_gamma is set, a trailing gamma
  // column: (n_state()+1) x (n_state()+1 [+1]).
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& X, double T, double gamma,
                           const Eigen::VectorXd& phase_ref,
                           bool with_gamma) const;

  PeriodicOrbit make_orbit(const Eigen::VectorXd& X, double T,
                           double gamma) const;

  // Dense evaluation of the representation (used by the delayed-argument
  // terms; exposed for defect checks).
  Eigen::Vector2d eval_state(const Eigen::VectorXd& X, double theta) const;
  Eigen::Vector2d eval_state_derivative(const Eigen::VectorXd& X,
                                        double theta) const;

  const std::vector<double>& gauss_nodes() const { return nodes_; }
  const std::vector<double>& gauss_weights() const { return weights_; }

 private:
  ModelParams params_;
  Equilibrium eq_;
  Mesh mesh_;
  std::vector<double> nodes_;    // Gauss-Legendre on [0, 1], size m
  std::vector<double> weights_;  // matching weights, sum 1
  Eigen::MatrixXd P_;  // P_(j, q) = l_j(nodes_[q]), j = 0..m
  Eigen::MatrixXd D_;  // D_(j, q) = l_j'(nodes_[q]), local scale
};

struct NewtonResult {
  PeriodicOrbit orbit;
  int iterations = 0;
  double residual = 0.0;
  double initial_residual = 0.0;
};

// Damped-free Newton on (X, T) at fixed gamma.  The phase reference is the
// guess itself.  Throws DegenerateGuess when the guess amplitude is below
// 1e-8, SingularJacobian on a numerically singular iteration matrix, and
// NoConvergence (with iteration count and last residual) past max_iter.
NewtonResult newton_correct(const Collocation& sys, const PeriodicGuess& guess,
                            double tol = 1e-10, int max_iter = 20);

// Same iteration from an explicit state and phase reference.
NewtonResult newton_correct(const Collocation& sys, const Eigen::VectorXd& X0,
                            double T0, double gamma,
                            const Eigen::VectorXd& phase_ref,
                            double tol = 1e-10, int max_iter = 20);

// Phase-aligned distance between two 1-periodic curves: min over shifts
// sigma on a 512-point grid, then two local refinement rounds, of
// sup_t |a(t + sigma) - b(t)|_2 on a 512-point grid.
double orbit_distance(const std::function<Eigen::Vector2d(double)>& a,
                      const std::function<Eigen::Vector2d(double)>& b);
double orbit_distance(const PeriodicOrbit& a, const PeriodicOrbit& b);
// The guess is evaluated in the same unit-interval variable.
double orbit_distance(const PeriodicGuess& a, const PeriodicOrbit& b);

}  // namespace gmdde
