#pragma once

#include <string>

#include "gmdde/model.hpp"

namespace gmdde {

// Canonical parameter sets used throughout the tests and the CLI.
//   set1: a = 0.1, b = 11/60, c = 11.  The equilibrium cubic factors as
//         (u-1)(u-2)(u-3); eq_index 2 picks (3, 20).
//   set2: a = 0.1, b = 1, c = 1e-6.  Single equilibrium near (1.1, 1.21).
//   set3: a = 0.1, b = 1, c = 0.  Equilibrium exactly (1.1, 1.21).
// gamma_max is the default search window for Hopf points; s0 is chosen per
// run, so it is not part of the preset.
struct Preset {
  std::string name;
  double a;
  double b;
  double c;
  double gamma_max;
  int eq_index;
};

inline Preset preset(const std::string& name) {
  if (name == "set1") return {"set1", 0.1, 11.0 / 60.0, 11.0, 30.0, 2};
  if (name == "set2") return {"set2", 0.1, 1.0, 1e-6, 2.0, 0};
  if (name == "set3") return {"set3", 0.1, 1.0, 0.0, 2.0, 0};
  throw ConfigError("unknown preset: " + name);
}

inline ModelParams make_params(const Preset& pre, double s0) {
  ModelParams p;
  p.a = pre.a;
  p.b = pre.b;
  p.c = pre.c;
  p.s0 = s0;
  p.validate();
  return p;
}

}  // namespace gmdde
