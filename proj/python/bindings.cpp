// Python module over the C++ core.  Scalars, tuples, lists and plain str
// JSON cross the boundary; Eigen types never do (vectors are copied into
// std::vector<double>), so the module has no numpy requirement.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <Eigen/Dense>
#include <sstream>
#include <string>
#include <vector>

#include "gmdde/bvp.hpp"
#include "gmdde/continuation.hpp"
#include "gmdde/hopf.hpp"
#include "gmdde/integrator.hpp"
#include "gmdde/lindstedt.hpp"
#include "gmdde/model.hpp"
#include "gmdde/presets.hpp"

namespace py = pybind11;
using namespace gmdde;

namespace {

py::tuple pair_of(const Eigen::Vector2d& v) { return py::make_tuple(v[0], v[1]); }

std::vector<double> vec_of(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd eigen_of(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

std::string repr_double(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Periodic orbits of a two-delay activator-inhibitor model: equilibria, "
      "instability crossings, amplitude expansions, collocation correction, "
      "and branch continuation.";

  // Translators run newest-first; the two hierarchies are disjoint, so each
  // catches exactly its own tree (every numerical failure derives from Error).
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def(py::init([](double a, double b, double c, double s0) {
             return ModelParams{a, b, c, s0};
           }),
           py::arg("a"), py::arg("b"), py::arg("c"), py::arg("s0") = 1.5)
      .def_readwrite("a", &ModelParams::a)
      .def_readwrite("b", &ModelParams::b)
      .def_readwrite("c", &ModelParams::c)
      .def_readwrite("s0", &ModelParams::s0)
      .def("validate", &ModelParams::validate)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(a=" + repr_double(p.a) + ", b=" + repr_double(p.b) +
               ", c=" + repr_double(p.c) + ", s0=" + repr_double(p.s0) + ")";
      });

  py::class_<Equilibrium>(m, "Equilibrium")
      .def(py::init<>())
      .def(py::init([](double u0, double v0) {
             return Equilibrium{u0, v0};
           }),
           py::arg("u0"), py::arg("v0"))
      .def_readonly("u0", &Equilibrium::u0)
      .def_readonly("v0", &Equilibrium::v0)
      .def("__repr__", [](const Equilibrium& e) {
        return "Equilibrium(u0=" + repr_double(e.u0) +
               ", v0=" + repr_double(e.v0) + ")";
      });

  m.def("cubic_residual", &cubic_residual, py::arg("params"), py::arg("u"),
        "Residual of the equilibrium cubic at u.");
  m.def("solve_equilibria", &solve_equilibria, py::arg("params"),
        "All strictly positive equilibria, ascending in u0.");

  py::class_<LinearData>(m, "LinearData")
      .def_readonly("b0", &LinearData::b0)
      .def_readonly("b1", &LinearData::b1)
      .def_readonly("b2", &LinearData::b2)
      .def_readonly("tau", &LinearData::tau)
      .def_readonly("s0", &LinearData::s0)
      .def_readonly("u0", &LinearData::u0)
      .def_readonly("v0", &LinearData::v0)
      .def("__repr__", [](const LinearData& l) {
        return "LinearData(b0=" + repr_double(l.b0) + ", b1=" + repr_double(l.b1) +
               ", b2=" + repr_double(l.b2) + ", tau=" + repr_double(l.tau) + ")";
      });

  m.def("linearize", &linearize, py::arg("params"), py::arg("equilibrium"),
        "Variational data of the model at an equilibrium.");
  m.def("char_value", &char_value, py::arg("lin"), py::arg("lam"),
        py::arg("gamma"),
        "Scalar characteristic function M(lambda, gamma) of the linearization.");

  py::enum_<HopfCase>(m, "HopfCase")
      .value("B1Nonzero", HopfCase::B1Nonzero)
      .value("B1Zero", HopfCase::B1Zero);

  py::class_<HopfPoint>(m, "HopfPoint")
      .def_readonly("gamma0", &HopfPoint::gamma0)
      .def_readonly("omega0", &HopfPoint::omega0)
      .def_readonly("branch_index", &HopfPoint::branch_index)
      .def_readonly("case_", &HopfPoint::case_)
      .def_readonly("omega_plus", &HopfPoint::omega_plus)
      .def_readonly("transversality", &HopfPoint::transversality)
      .def_property_readonly("certified",
                             [](const HopfPoint& h) {
                               py::dict d;
                               d["simple_root"] = h.certified.simple_root;
                               d["nonresonant"] = h.certified.nonresonant;
                               d["char_residual_ok"] = h.certified.char_residual_ok;
                               return d;
                             })
      .def("__repr__", [](const HopfPoint& h) {
        return "HopfPoint(gamma0=" + repr_double(h.gamma0) +
               ", omega0=" + repr_double(h.omega0) +
               ", branch_index=" + std::to_string(h.branch_index) + ")";
      });

  m.def("hopf_points", &hopf_points, py::arg("lin"), py::arg("gamma_max"),
        "All purely imaginary root crossings with 0 < gamma0 <= gamma_max, "
        "ordered by gamma0.");
  m.def("transversality",
        py::overload_cast<const LinearData&, const HopfPoint&>(&transversality),
        py::arg("lin"), py::arg("point"),
        "Re(d lambda / d gamma) at the crossing; positive in the admissible "
        "cases.");

  py::class_<NonresonanceReport>(m, "NonresonanceReport")
      .def_readonly("n_max", &NonresonanceReport::n_max)
      .def_readonly("min_abs_det", &NonresonanceReport::min_abs_det)
      .def_readonly("argmin_n", &NonresonanceReport::argmin_n)
      .def_readonly("dM_dlambda_abs", &NonresonanceReport::dM_dlambda_abs)
      .def_readonly("char_residual", &NonresonanceReport::char_residual);

  m.def("certify", &certify, py::arg("lin"), py::arg("point"),
        py::arg("n_max") = 50,
        "Fills point.transversality and point.certified in place and returns "
        "the underlying measurements.");

  py::class_<Preset>(m, "Preset")
      .def_readonly("name", &Preset::name)
      .def_readonly("a", &Preset::a)
      .def_readonly("b", &Preset::b)
      .def_readonly("c", &Preset::c)
      .def_readonly("gamma_max", &Preset::gamma_max)
      .def_readonly("eq_index", &Preset::eq_index)
      .def("__repr__",
           [](const Preset& p) { return "Preset('" + p.name + "')"; });

  m.def("preset", &preset, py::arg("name"),
        "Canonical parameter set by name: set1, set2, or set3.");
  m.def("make_params", &make_params, py::arg("preset"), py::arg("s0"),
        "ModelParams of a preset at the chosen inhibitor delay.");

  py::class_<HopfKernel>(m, "HopfKernel")
      .def_readonly("det_C", &HopfKernel::det_C);

  m.def("build_kernel", &build_kernel, py::arg("lin"), py::arg("point"),
        "Kernel data and solvability matrix at a simple crossing.");

  py::class_<PeriodicGuess>(m, "PeriodicGuess")
      .def_readonly("gamma", &PeriodicGuess::gamma)
      .def_readonly("omega", &PeriodicGuess::omega)
      .def_readonly("T", &PeriodicGuess::T)
      .def("eval",
           [](const PeriodicGuess& g, double phase) {
             return pair_of(g.y.eval(phase));
           },
           py::arg("phase"),
           "Series value at a phase in radians (the orbit in time is "
           "eval(omega * t)).")
      .def("sup_norm", [](const PeriodicGuess& g) { return g.y.sup_norm(); })
      .def("max_mode", [](const PeriodicGuess& g) { return g.y.max_mode(); })
      .def("__repr__", [](const PeriodicGuess& g) {
        return "PeriodicGuess(gamma=" + repr_double(g.gamma) +
               ", omega=" + repr_double(g.omega) + ", T=" + repr_double(g.T) +
               ")";
      });

  py::class_<PLExpansion::Order>(m, "ExpansionOrder")
      .def_readonly("gamma", &PLExpansion::Order::gamma)
      .def_readonly("omega", &PLExpansion::Order::omega)
      .def_readonly("solvability_residual",
                    &PLExpansion::Order::solvability_residual)
      .def_property_readonly(
          "sup_norm",
          [](const PLExpansion::Order& o) { return o.y.sup_norm(); })
      .def_property_readonly(
          "max_mode", [](const PLExpansion::Order& o) { return o.y.max_mode(); });

  py::class_<PLExpansion>(m, "PLExpansion")
      .def_static(
          "build",
          [](const ModelParams& p, const Equilibrium& eq, const LinearData& lin,
             const HopfPoint& hp, int order, bool generic_low_orders) {
            return PLExpansion::build(p, eq, lin, hp, order, generic_low_orders);
          },
          py::arg("params"), py::arg("equilibrium"), py::arg("lin"),
          py::arg("point"), py::arg("order"),
          py::arg("generic_low_orders") = false,
          py::call_guard<py::gil_scoped_release>(),
          "Amplitude expansion of the periodic family at a crossing, built "
          "through the requested order.")
      .def("extend", &PLExpansion::extend, py::arg("order"),
           py::call_guard<py::gil_scoped_release>())
      .def("max_computed_order", &PLExpansion::max_computed_order)
      .def("order", &PLExpansion::order, py::arg("k"),
           "Per-order data: coefficient series, parameter and frequency "
           "corrections, solvability residual.")
      .def("gamma_value", &PLExpansion::gamma_value, py::arg("eps"),
           py::arg("order"))
      .def("omega_value", &PLExpansion::omega_value, py::arg("eps"),
           py::arg("order"))
      .def("evaluate", &PLExpansion::evaluate, py::arg("eps"), py::arg("order"),
           "Truncated series at amplitude eps.")
      .def("defect", &PLExpansion::defect, py::arg("eps"), py::arg("order"),
           py::call_guard<py::gil_scoped_release>(),
           "Sup-norm residual of the truncated series in the phase-scaled "
           "equation.")
      .def("to_json",
           [](const PLExpansion& pl) { return pl.to_json().dump(); });

  m.def("auto_epsilon", &auto_epsilon, py::arg("expansion"),
        py::arg("lo_defect") = 1e-6, py::arg("hi_defect") = 1e-4,
        py::call_guard<py::gil_scoped_release>(),
        "Smallest amplitude whose order-3 defect falls inside the given "
        "window.");

  py::class_<Mesh>(m, "Mesh")
      .def(py::init<>())
      .def(py::init([](int M, int m_) {
             return Mesh{M, m_};
           }),
           py::arg("M"), py::arg("m"))
      .def_readwrite("M", &Mesh::M)
      .def_readwrite("m", &Mesh::m)
      .def("validate", &Mesh::validate)
      .def("__repr__", [](const Mesh& mm) {
        return "Mesh(M=" + std::to_string(mm.M) + ", m=" + std::to_string(mm.m) +
               ")";
      });

  py::class_<PeriodicOrbit>(m, "PeriodicOrbit")
      .def_readonly("mesh", &PeriodicOrbit::mesh)
      .def_readonly("T", &PeriodicOrbit::T)
      .def_readonly("gamma", &PeriodicOrbit::gamma)
      .def_property_readonly(
          "X", [](const PeriodicOrbit& o) { return vec_of(o.X); },
          "Representation values, point-major (u, v) pairs.")
      .def("eval",
           [](const PeriodicOrbit& o, double theta) {
             return pair_of(o.eval(theta));
           },
           py::arg("theta"), "State at a rescaled time, taken mod 1.")
      .def("derivative",
           [](const PeriodicOrbit& o, double theta) {
             return pair_of(o.derivative(theta));
           },
           py::arg("theta"))
      .def("amplitude", &PeriodicOrbit::amplitude)
      .def("l2_norm", &PeriodicOrbit::l2_norm)
      .def("sup_norm", &PeriodicOrbit::sup_norm)
      .def("to_json",
           [](const PeriodicOrbit& o) { return o.to_json().dump(); })
      .def_static("from_json",
                  [](const std::string& text) {
                    return PeriodicOrbit::from_json(nlohmann::json::parse(text));
                  },
                  py::arg("text"))
      .def("__repr__", [](const PeriodicOrbit& o) {
        return "PeriodicOrbit(gamma=" + repr_double(o.gamma) +
               ", T=" + repr_double(o.T) + ", mesh=Mesh(M=" +
               std::to_string(o.mesh.M) + ", m=" + std::to_string(o.mesh.m) +
               "))";
      });

  py::class_<Collocation>(m, "Collocation")
      .def(py::init<const ModelParams&, const Equilibrium&, const Mesh&>(),
           py::arg("params"), py::arg("equilibrium"), py::arg("mesh"))
      .def("n_points", &Collocation::n_points)
      .def("n_state", &Collocation::n_state)
      .def_property_readonly("mesh", &Collocation::mesh)
      .def_property_readonly("params", &Collocation::params)
      .def_property_readonly("equilibrium", &Collocation::equilibrium);

  py::class_<NewtonResult>(m, "NewtonResult")
      .def_readonly("orbit", &NewtonResult::orbit)
      .def_readonly("iterations", &NewtonResult::iterations)
      .def_readonly("residual", &NewtonResult::residual)
      .def_readonly("initial_residual", &NewtonResult::initial_residual)
      .def("__repr__", [](const NewtonResult& r) {
        return "NewtonResult(iterations=" + std::to_string(r.iterations) +
               ", residual=" + repr_double(r.residual) + ")";
      });

  m.def("newton_correct",
        py::overload_cast<const Collocation&, const PeriodicGuess&, double, int>(
            &newton_correct),
        py::arg("system"), py::arg("guess"), py::arg("tol") = 1e-10,
        py::arg("max_iter") = 20, py::call_guard<py::gil_scoped_release>(),
        "Newton iteration on the collocation system from a series guess.");

  m.def("orbit_distance",
        py::overload_cast<const PeriodicOrbit&, const PeriodicOrbit&>(
            &orbit_distance),
        py::arg("a"), py::arg("b"),
        "Phase-aligned sup distance between two orbits.");
  m.def("orbit_distance",
        py::overload_cast<const PeriodicGuess&, const PeriodicOrbit&>(
            &orbit_distance),
        py::arg("guess"), py::arg("orbit"));

  m.def("return_map_error", &return_map_error, py::arg("params"),
        py::arg("equilibrium"), py::arg("orbit"), py::arg("h") = 0.0,
        py::call_guard<py::gil_scoped_release>(),
        "Distance between the orbit and its once-around integration under the "
        "full delay dynamics (h = 0 picks T/2048).");

  py::enum_<PhaseRefPolicy>(m, "PhaseRefPolicy")
      .value("EveryStep", PhaseRefPolicy::EveryStep)
      .value("Fixed", PhaseRefPolicy::Fixed);

  py::enum_<Termination>(m, "Termination")
      .value("GammaBound", Termination::GammaBound)
      .value("MaxSteps", Termination::MaxSteps)
      .value("StepFloor", Termination::StepFloor)
      .value("NewtonFail", Termination::NewtonFail);

  py::class_<ContinuationSettings>(m, "ContinuationSettings")
      .def(py::init<>())
      .def_readwrite("h0", &ContinuationSettings::h0)
      .def_readwrite("hmin", &ContinuationSettings::hmin)
      .def_readwrite("hmax", &ContinuationSettings::hmax)
      .def_readwrite("max_steps", &ContinuationSettings::max_steps)
      .def_readwrite("gamma_min", &ContinuationSettings::gamma_min)
      .def_readwrite("gamma_max", &ContinuationSettings::gamma_max)
      .def_readwrite("tol", &ContinuationSettings::tol)
      .def_readwrite("newton_max_iter", &ContinuationSettings::newton_max_iter)
      .def_readwrite("fixed_step", &ContinuationSettings::fixed_step)
      .def_readwrite("phase_ref", &ContinuationSettings::phase_ref)
      .def("validate", &ContinuationSettings::validate);

  py::class_<BranchPoint>(m, "BranchPoint")
      .def_readonly("orbit", &BranchPoint::orbit)
      .def_readonly("gamma", &BranchPoint::gamma)
      .def_readonly("T", &BranchPoint::T)
      .def_readonly("l2", &BranchPoint::l2)
      .def_readonly("sup", &BranchPoint::sup)
      .def_readonly("arclength", &BranchPoint::arclength)
      .def("__repr__", [](const BranchPoint& p) {
        return "BranchPoint(gamma=" + repr_double(p.gamma) +
               ", T=" + repr_double(p.T) + ", l2=" + repr_double(p.l2) + ")";
      });

  py::class_<Branch>(m, "Branch")
      .def_readonly("points", &Branch::points)
      .def_readonly("termination", &Branch::termination);

  py::class_<BranchStart>(m, "BranchStart")
      .def_readonly("first", &BranchStart::first)
      .def_readonly("second", &BranchStart::second);

  m.def("start_branch", &start_branch, py::arg("system"), py::arg("expansion"),
        py::arg("eps0") = 0.0, py::call_guard<py::gil_scoped_release>(),
        "Two phase-coherent corrected orbits bracketing the direction of "
        "growing amplitude.");

  m.def("secant_tangent",
        [](const Collocation& sys, const PeriodicOrbit& a,
           const PeriodicOrbit& b) {
          return vec_of(secant_tangent(sys, a, b));
        },
        py::arg("system"), py::arg("a"), py::arg("b"),
        "Normalized branch direction from a to b in the scaled (X, T, gamma) "
        "variables.");

  m.def("continue_branch",
        [](const Collocation& sys, const PeriodicOrbit& start,
           const std::vector<double>& tangent,
           const ContinuationSettings& settings) {
          Eigen::VectorXd t = eigen_of(tangent);
          py::gil_scoped_release release;
          return continue_branch(sys, start, t, settings);
        },
        py::arg("system"), py::arg("start"), py::arg("tangent"),
        py::arg("settings"),
        "Pseudo-arclength continuation from a corrected orbit along a "
        "tangent.");

  m.def("trace_branch",
        [](const Collocation& sys, const PLExpansion& pl,
           const ContinuationSettings& settings, double eps0) {
          BranchStart bs = start_branch(sys, pl, eps0);
          Eigen::VectorXd t = secant_tangent(sys, bs.first, bs.second);
          return continue_branch(sys, bs.second, t, settings);
        },
        py::arg("system"), py::arg("expansion"), py::arg("settings"),
        py::arg("eps0") = 0.0, py::call_guard<py::gil_scoped_release>(),
        "start_branch, the seeding secant, and continue_branch in one call.");

  m.def("branch_summary", &branch_summary, py::arg("branch"),
        "(gamma, T, l2, sup) rows, one per branch point.");

  m.attr("__version__") = "0.1.0";
}
