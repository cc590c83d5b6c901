// Command-line front end: resolves a run configuration from preset,
// optional JSON config file, and flags (in that precedence order), then
// dispatches to the library.  Every CSV starts with the resolved
// configuration as a one-line JSON comment; orbit JSON files embed it as a
// "config" field.  Exit codes: 0 success, 2 configuration problems,
// 3 numerical failures.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gmdde/continuation.hpp"
#include "gmdde/hopf.hpp"
#include "gmdde/integrator.hpp"
#include "gmdde/lindstedt.hpp"
#include "gmdde/presets.hpp"

using namespace gmdde;
using nlohmann::json;

namespace {

struct Cfg {
  std::string preset_name = "set1";
  double a = 0.0, b = 0.0, c = 0.0;
  double s0 = 1.5;
  int eq_index = 0;
  double gamma_max = 30.0;
  int order = 3;
  double eps = 0.0;  // 0 = auto-select where supported
  int mesh_M = 64, mesh_m = 4;
  ContinuationSettings cont;
  bool cont_gamma_max_set = false;
  std::string out = ".";
  int hopf_index = -1;  // continue: -1 = every point in range; else index 0
  int jobs = 1;
  int snapshot_every = 0;
  double h = 0.0;  // integrator step, 0 = period/2048
};

std::string d2s(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string g2s(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

json cfg_json(const Cfg& c, const char* cmd) {
  return json{
      {"cmd", cmd},
      {"preset", c.preset_name},
      {"a", c.a},
      {"b", c.b},
      {"c", c.c},
      {"s0", c.s0},
      {"eq_index", c.eq_index},
      {"gamma_max", c.gamma_max},
      {"order", c.order},
      {"eps", c.eps},
      {"mesh", json{{"M", c.mesh_M}, {"m", c.mesh_m}}},
      {"continuation",
       json{{"h0", c.cont.h0},
            {"hmin", c.cont.hmin},
            {"hmax", c.cont.hmax},
            {"max_steps", c.cont.max_steps},
            {"gamma_min", c.cont.gamma_min},
            {"gamma_max", c.cont.gamma_max}}},
      {"out", c.out},
      {"hopf_index", c.hopf_index},
      {"jobs", c.jobs},
      {"snapshot_every", c.snapshot_every},
      {"h", c.h}};
}

std::string header(const Cfg& c, const char* cmd) {
  return "# " + cfg_json(c, cmd).dump() + "\n";
}

ModelParams params_of(const Cfg& c) {
  ModelParams p;
  p.a = c.a;
  p.b = c.b;
  p.c = c.c;
  p.s0 = c.s0;
  p.validate();
  return p;
}

Equilibrium pick_equilibrium(const Cfg& c, const ModelParams& p) {
  const std::vector<Equilibrium> eqs = solve_equilibria(p);
  if (c.eq_index < 0 || c.eq_index >= static_cast<int>(eqs.size())) {
    throw ConfigError("eq_index " + std::to_string(c.eq_index) +
                      " out of range; model has " +
                      std::to_string(eqs.size()) + " equilibria");
  }
  return eqs[static_cast<size_t>(c.eq_index)];
}

HopfPoint pick_hopf(const Cfg& c, const LinearData& lin, int fallback) {
  const std::vector<HopfPoint> pts = hopf_points(lin, c.gamma_max);
  const int j = c.hopf_index >= 0 ? c.hopf_index : fallback;
  if (j >= static_cast<int>(pts.size())) {
    throw ConfigError("hopf_index " + std::to_string(j) +
                      " out of range; found " + std::to_string(pts.size()) +
                      " Hopf points");
  }
  return pts[static_cast<size_t>(j)];
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << body;
}

std::filesystem::path out_dir(const Cfg& c) {
  std::filesystem::path dir(c.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + c.out);
  return dir;
}

const char* term_name(Termination t) {
  switch (t) {
    case Termination::GammaBound: return "GammaBound";
    case Termination::MaxSteps: return "MaxSteps";
    case Termination::StepFloor: return "StepFloor";
    case Termination::NewtonFail: return "NewtonFail";
  }
  return "?";
}

double series_sup(const FourierSeries2& y) {
  return std::max(y.u.sup_norm(), y.v.sup_norm());
}

std::string file_tag(const Cfg& c) {
  return c.preset_name + "_s0_" + g2s(c.s0);
}

json orbit_json(const PeriodicOrbit& o, const Cfg& c, const char* cmd) {
  json j = o.to_json();
  j["config"] = cfg_json(c, cmd);
  return j;
}

int run_equilibria(const Cfg& c) {
  const ModelParams p = params_of(c);
  const std::vector<Equilibrium> eqs = solve_equilibria(p);
  std::string s = header(c, "equilibria");
  s += "index,u0,v0\n";
  for (size_t i = 0; i < eqs.size(); ++i) {
    s += std::to_string(i) + "," + d2s(eqs[i].u0) + "," + d2s(eqs[i].v0) +
         "\n";
  }
  std::fputs(s.c_str(), stdout);
  return 0;
}

int run_hopf(const Cfg& c) {
  const ModelParams p = params_of(c);
  const LinearData lin = linearize(p, pick_equilibrium(c, p));
  std::string s = header(c, "hopf");
  s += "s0,j,gamma0,omega0,transversality\n";
  for (const HopfPoint& pt : hopf_points(lin, c.gamma_max)) {
    s += d2s(p.s0) + "," + std::to_string(pt.branch_index) + "," +
         d2s(pt.gamma0) + "," + d2s(pt.omega0) + "," +
         d2s(transversality(lin, pt)) + "\n";
  }
  std::fputs(s.c_str(), stdout);
  return 0;
}

// The table reaches order K, so the expansion is built one order further:
// each gamma_k/omega_k pair is produced by the solvability condition of
// order k+1.
int run_lindstedt(const Cfg& c) {
  const ModelParams p = params_of(c);
  const Equilibrium eq = pick_equilibrium(c, p);
  const LinearData lin = linearize(p, eq);
  const HopfPoint hp = pick_hopf(c, lin, 0);
  const PLExpansion pl = PLExpansion::build(p, eq, lin, hp, c.order + 1);
  std::string s = header(c, "lindstedt");
  s += "k,gamma_k,omega_k,sup_y_k,eps_pow_k_sup\n";
  double ek = 1.0;
  for (int k = 0; k <= c.order; ++k) {
    const double sup = series_sup(pl.order(k).y);
    s += std::to_string(k) + "," + d2s(pl.order(k).gamma) + "," +
         d2s(pl.order(k).omega) + "," + d2s(sup) + "," + d2s(ek * sup) + "\n";
    ek *= c.eps;
  }
  std::fputs(s.c_str(), stdout);
  return 0;
}

int run_correct(Cfg c) {
  const ModelParams p = params_of(c);
  const Equilibrium eq = pick_equilibrium(c, p);
  const LinearData lin = linearize(p, eq);
  const HopfPoint hp = pick_hopf(c, lin, 0);
  // One order beyond the evaluation order, so the parameter and frequency
  // series carry their full eps^order terms.
  const PLExpansion pl =
      PLExpansion::build(p, eq, lin, hp, std::max(c.order, 3) + 1);
  if (c.eps <= 0.0) c.eps = auto_epsilon(pl);
  const Mesh mesh{c.mesh_M, c.mesh_m};
  mesh.validate();
  const Collocation sys(p, eq, mesh);
  const PeriodicGuess guess = pl.evaluate(c.eps, c.order);
  const NewtonResult res = newton_correct(sys, guess);
  const double dist = orbit_distance(guess, res.orbit);

  const int j = c.hopf_index >= 0 ? c.hopf_index : 0;
  const std::filesystem::path file =
      out_dir(c) / ("orbit_" + file_tag(c) + "_j" + std::to_string(j) +
                    ".json");
  write_file(file, orbit_json(res.orbit, c, "correct").dump(2) + "\n");

  std::string s = header(c, "correct");
  s += "gamma,T,iterations,residual,initial_residual,distance\n";
  s += d2s(res.orbit.gamma) + "," + d2s(res.orbit.T) + "," +
       std::to_string(res.iterations) + "," + d2s(res.residual) + "," +
       d2s(res.initial_residual) + "," + d2s(dist) + "\n";
  std::fputs(s.c_str(), stdout);
  return 0;
}

int run_continue(const Cfg& c) {
  const ModelParams p = params_of(c);
  const Equilibrium eq = pick_equilibrium(c, p);
  const LinearData lin = linearize(p, eq);
  const std::vector<HopfPoint> pts = hopf_points(lin, c.gamma_max);
  std::vector<int> which;
  if (c.hopf_index >= 0) {
    if (c.hopf_index >= static_cast<int>(pts.size())) {
      throw ConfigError("hopf_index out of range; found " +
                        std::to_string(pts.size()) + " Hopf points");
    }
    which.push_back(c.hopf_index);
  } else {
    for (int j = 0; j < static_cast<int>(pts.size()); ++j) which.push_back(j);
  }
  const std::filesystem::path dir = out_dir(c);

  const auto trace = [&](int j) -> std::string {
    const HopfPoint& hp = pts[static_cast<size_t>(j)];
    const PLExpansion pl = PLExpansion::build(p, eq, lin, hp, 3);
    const Collocation sys(p, eq, Mesh{c.mesh_M, c.mesh_m});
    const BranchStart bs = start_branch(sys, pl);
    const Branch br = continue_branch(
        sys, bs.second, secant_tangent(sys, bs.first, bs.second), c.cont);

    Cfg cj = c;
    cj.hopf_index = j;
    std::string body = header(cj, "continue");
    body += "gamma,T,l2,sup,arclength\n";
    for (const BranchPoint& pt : br.points) {
      body += d2s(pt.gamma) + "," + d2s(pt.T) + "," + d2s(pt.l2) + "," +
              d2s(pt.sup) + "," + d2s(pt.arclength) + "\n";
    }
    const std::string stem = "branch_" + file_tag(c) + "_j" + std::to_string(j);
    write_file(dir / (stem + ".csv"), body);
    if (c.snapshot_every > 0) {
      for (size_t i = 0; i < br.points.size();
           i += static_cast<size_t>(c.snapshot_every)) {
        write_file(dir / (stem + "_pt" + std::to_string(i) + ".json"),
                   orbit_json(br.points[i].orbit, cj, "continue").dump(2) +
                       "\n");
      }
    }
    const BranchPoint& last = br.points.back();
    return std::to_string(j) + "," + d2s(hp.gamma0) + "," +
           std::to_string(br.points.size()) + "," +
           term_name(br.termination) + "," + d2s(last.gamma) + "," +
           d2s(last.T) + "," + d2s(last.l2) + "," + d2s(last.arclength) +
           "\n";
  };

  std::string s = header(c, "continue");
  s += "j,gamma0,points,termination,gamma_end,T_end,l2_end,arclength_end\n";
  if (c.jobs > 1 && which.size() > 1) {
    std::vector<std::future<std::string>> futs;
    futs.reserve(which.size());
    for (int j : which) {
      futs.push_back(std::async(std::launch::async, trace, j));
    }
    for (auto& f : futs) s += f.get();
  } else {
    for (int j : which) s += trace(j);
  }
  std::fputs(s.c_str(), stdout);
  return 0;
}

int run_validate(Cfg c) {
  const ModelParams p = params_of(c);
  const Equilibrium eq = pick_equilibrium(c, p);
  const LinearData lin = linearize(p, eq);
  const HopfPoint hp = pick_hopf(c, lin, 0);
  const PLExpansion pl =
      PLExpansion::build(p, eq, lin, hp, std::max(c.order, 3) + 1);
  if (c.eps <= 0.0) c.eps = auto_epsilon(pl);
  const Mesh mesh{c.mesh_M, c.mesh_m};
  mesh.validate();
  const Collocation sys(p, eq, mesh);
  const NewtonResult res = newton_correct(sys, pl.evaluate(c.eps, c.order));
  const double rme = return_map_error(p, eq, res.orbit, c.h);
  const double h_used = c.h > 0.0 ? c.h : res.orbit.T / 2048.0;

  const int j = c.hopf_index >= 0 ? c.hopf_index : 0;
  std::string s = header(c, "validate");
  s += "j,gamma,T,return_map_error,h\n";
  s += std::to_string(j) + "," + d2s(res.orbit.gamma) + "," +
       d2s(res.orbit.T) + "," + d2s(rme) + "," + d2s(h_used) + "\n";
  std::fputs(s.c_str(), stdout);
  return 0;
}

struct FlagStore {
  std::string preset = "set1";
  std::string config_path;
  std::string out;
  double a = 0, b = 0, c = 0, s0 = 0, gamma_max = 0, eps = 0, h = 0;
  double h0 = 0, hmin = 0, hmax = 0, cont_gamma_min = 0, cont_gamma_max = 0;
  int eq_index = 0, order = 0, mesh_M = 0, mesh_m = 0, max_steps = 0;
  int hopf_index = 0, jobs = 0, snapshot_every = 0;
};

using Applier = std::pair<CLI::Option*, std::function<void(Cfg&)>>;

void apply_config_file(Cfg& c, const std::string& path, bool preset_from_flag) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  const json j = json::parse(is);  // json parse errors map to exit code 2
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

  if (j.contains("preset") && !preset_from_flag) {
    const Preset pre = preset(j.at("preset").get<std::string>());
    c.preset_name = pre.name;
    c.a = pre.a;
    c.b = pre.b;
    c.c = pre.c;
    c.gamma_max = pre.gamma_max;
    c.eq_index = pre.eq_index;
  }
  for (const auto& [key, val] : j.items()) {
    if (key == "preset") continue;
    if (key == "a") c.a = val.get<double>();
    else if (key == "b") c.b = val.get<double>();
    else if (key == "c") c.c = val.get<double>();
    else if (key == "s0") c.s0 = val.get<double>();
    else if (key == "eq_index") c.eq_index = val.get<int>();
    else if (key == "gamma_max") c.gamma_max = val.get<double>();
    else if (key == "order") c.order = val.get<int>();
    else if (key == "eps") c.eps = val.get<double>();
    else if (key == "out") c.out = val.get<std::string>();
    else if (key == "hopf_index") c.hopf_index = val.get<int>();
    else if (key == "jobs") c.jobs = val.get<int>();
    else if (key == "snapshot_every") c.snapshot_every = val.get<int>();
    else if (key == "h") c.h = val.get<double>();
    else if (key == "mesh") {
      if (val.contains("M")) c.mesh_M = val.at("M").get<int>();
      if (val.contains("m")) c.mesh_m = val.at("m").get<int>();
    } else if (key == "continuation") {
      const json& v = val;
      if (v.contains("h0")) c.cont.h0 = v.at("h0").get<double>();
      if (v.contains("hmin")) c.cont.hmin = v.at("hmin").get<double>();
      if (v.contains("hmax")) c.cont.hmax = v.at("hmax").get<double>();
      if (v.contains("max_steps")) c.cont.max_steps = v.at("max_steps").get<int>();
      if (v.contains("gamma_min")) c.cont.gamma_min = v.at("gamma_min").get<double>();
      if (v.contains("gamma_max")) {
        c.cont.gamma_max = v.at("gamma_max").get<double>();
        c.cont_gamma_max_set = true;
      }
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Hopf-branch toolkit for a two-delay activator-inhibitor model"};
  app.require_subcommand(1);

  FlagStore f;
  std::vector<Applier> appliers;
  // One instance per subcommand; only the parsed subcommand's copy can have
  // a nonzero count.
  std::vector<CLI::Option*> preset_opts, config_opts;

  const auto add_common = [&](CLI::App* sub) {
    preset_opts.push_back(sub->add_option(
        "--preset", f.preset, "Parameter preset: set1, set2, or set3"));
    config_opts.push_back(
        sub->add_option("--config", f.config_path, "JSON config file"));
    const auto bind = [&](const char* name, auto& slot, auto assign,
                          const char* desc) {
      CLI::Option* opt = sub->add_option(name, slot, desc);
      appliers.emplace_back(opt, [&slot, assign](Cfg& c) { assign(c, slot); });
    };
    bind("--a", f.a, [](Cfg& c, double v) { c.a = v; }, "Source term a");
    bind("--b", f.b, [](Cfg& c, double v) { c.b = v; }, "Decay rate b");
    bind("--c", f.c, [](Cfg& c, double v) { c.c = v; }, "Inhibitor source c");
    bind("--s0", f.s0, [](Cfg& c, double v) { c.s0 = v; },
         "Second delay (first delay is 1)");
    bind("--eq-index", f.eq_index, [](Cfg& c, int v) { c.eq_index = v; },
         "Equilibrium index into the ascending root list");
    bind("--gamma-max", f.gamma_max,
         [](Cfg& c, double v) { c.gamma_max = v; },
         "Upper end of the Hopf search window");
    bind("--out", f.out, [](Cfg& c, const std::string& v) { c.out = v; },
         "Output directory for generated files");
  };
  const auto add_order = [&](CLI::App* sub) {
    CLI::Option* opt = sub->add_option("--order", f.order,
                                       "Expansion truncation order");
    appliers.emplace_back(opt, [&f](Cfg& c) { c.order = f.order; });
  };
  const auto add_hopf_index = [&](CLI::App* sub) {
    CLI::Option* opt = sub->add_option(
        "--hopf-index", f.hopf_index,
        "Hopf point index (continue default: every point in range)");
    appliers.emplace_back(opt, [&f](Cfg& c) { c.hopf_index = f.hopf_index; });
  };
  const auto add_mesh = [&](CLI::App* sub) {
    CLI::Option* oM =
        sub->add_option("--mesh-M", f.mesh_M, "Mesh subintervals");
    appliers.emplace_back(oM, [&f](Cfg& c) { c.mesh_M = f.mesh_M; });
    CLI::Option* om =
        sub->add_option("--mesh-m", f.mesh_m, "Polynomial degree per cell");
    appliers.emplace_back(om, [&f](Cfg& c) { c.mesh_m = f.mesh_m; });
  };
  const auto add_eps = [&](CLI::App* sub, bool required) {
    CLI::Option* opt = sub->add_option(
        "--eps", f.eps,
        required ? "Amplitude parameter" : "Amplitude parameter (0 = auto)");
    if (required) opt->required();
    appliers.emplace_back(opt, [&f](Cfg& c) { c.eps = f.eps; });
  };

  CLI::App* cmd_eq = app.add_subcommand("equilibria", "List equilibria");
  add_common(cmd_eq);

  CLI::App* cmd_hopf =
      app.add_subcommand("hopf", "Enumerate certified Hopf points");
  add_common(cmd_hopf);

  CLI::App* cmd_pl = app.add_subcommand(
      "lindstedt", "Amplitude-expansion coefficient table");
  add_common(cmd_pl);
  add_order(cmd_pl);
  add_hopf_index(cmd_pl);
  add_eps(cmd_pl, true);

  CLI::App* cmd_correct = app.add_subcommand(
      "correct", "Newton-correct the expansion guess into an orbit");
  add_common(cmd_correct);
  add_order(cmd_correct);
  add_hopf_index(cmd_correct);
  add_mesh(cmd_correct);
  add_eps(cmd_correct, false);

  CLI::App* cmd_cont = app.add_subcommand(
      "continue", "Trace periodic-orbit branches from Hopf points");
  add_common(cmd_cont);
  add_hopf_index(cmd_cont);
  add_mesh(cmd_cont);
  {
    CLI::Option* o;
    o = cmd_cont->add_option("--jobs", f.jobs, "Concurrent branch jobs");
    appliers.emplace_back(o, [&f](Cfg& c) { c.jobs = f.jobs; });
    o = cmd_cont->add_option("--snapshot-every", f.snapshot_every,
                             "Write every k-th orbit as JSON (0 = off)");
    appliers.emplace_back(o,
                          [&f](Cfg& c) { c.snapshot_every = f.snapshot_every; });
    o = cmd_cont->add_option("--max-steps", f.max_steps,
                             "Continuation step budget");
    appliers.emplace_back(o, [&f](Cfg& c) { c.cont.max_steps = f.max_steps; });
    o = cmd_cont->add_option("--h0", f.h0, "Initial arclength step");
    appliers.emplace_back(o, [&f](Cfg& c) { c.cont.h0 = f.h0; });
    o = cmd_cont->add_option("--hmin", f.hmin, "Smallest arclength step");
    appliers.emplace_back(o, [&f](Cfg& c) { c.cont.hmin = f.hmin; });
    o = cmd_cont->add_option("--hmax", f.hmax, "Largest arclength step");
    appliers.emplace_back(o, [&f](Cfg& c) { c.cont.hmax = f.hmax; });
    o = cmd_cont->add_option("--cont-gamma-min", f.cont_gamma_min,
                             "Lower continuation bound on gamma");
    appliers.emplace_back(
        o, [&f](Cfg& c) { c.cont.gamma_min = f.cont_gamma_min; });
    o = cmd_cont->add_option("--cont-gamma-max", f.cont_gamma_max,
                             "Upper continuation bound on gamma");
    appliers.emplace_back(o, [&f](Cfg& c) {
      c.cont.gamma_max = f.cont_gamma_max;
      c.cont_gamma_max_set = true;
    });
  }

  CLI::App* cmd_val = app.add_subcommand(
      "validate", "Return-map error of a corrected orbit");
  add_common(cmd_val);
  add_order(cmd_val);
  add_hopf_index(cmd_val);
  add_mesh(cmd_val);
  add_eps(cmd_val, false);
  {
    CLI::Option* o =
        cmd_val->add_option("--step", f.h, "Integrator step (0 = period/2048)");
    appliers.emplace_back(o, [&f](Cfg& c) { c.h = f.h; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto any_given = [](const std::vector<CLI::Option*>& opts) {
    for (const CLI::Option* o : opts) {
      if (o->count() > 0) return true;
    }
    return false;
  };

  try {
    Cfg c;
    const bool preset_given = any_given(preset_opts);
    const Preset pre = preset(f.preset);
    c.preset_name = pre.name;
    c.a = pre.a;
    c.b = pre.b;
    c.c = pre.c;
    c.gamma_max = pre.gamma_max;
    c.eq_index = pre.eq_index;
    if (any_given(config_opts)) {
      apply_config_file(c, f.config_path, preset_given);
    }
    for (const Applier& ap : appliers) {
      if (ap.first->count() > 0) ap.second(c);
    }
    if (!c.cont_gamma_max_set) c.cont.gamma_max = c.gamma_max;

    if (app.got_subcommand(cmd_eq)) return run_equilibria(c);
    if (app.got_subcommand(cmd_hopf)) return run_hopf(c);
    if (app.got_subcommand(cmd_pl)) return run_lindstedt(c);
    if (app.got_subcommand(cmd_correct)) return run_correct(c);
    if (app.got_subcommand(cmd_cont)) return run_continue(c);
    return run_validate(c);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 3;
  }
}
