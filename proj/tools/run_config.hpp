#pragma once

// Run configuration for `tpair generate`, read from JSON:
//
// {
//   "metric": {"nx": 64, "ny": 64, "lx": 1, "ly": 1,
//              "lambda": [{"amplitude": 0.1, "kx": 1, "ky": 0, "x_trig": "cos", "y_trig": "cos"}]},
//   "chain": [{"type": "constant", "axis": [0.3, -0.5, 0.8]},
//             {"type": "factory"},
//             {"type": "factory", "poles": [{"at": [0.31, 0.27], "strength": 0.15}],
//              "constant": [0.2, -0.1], "alpha": [1, 0], "beta": [0, 0], "tolerance": 1e-6},
//             {"type": "random_factory"},
//             {"type": "q"}],
//   "tolerances": {"gmero": 1e-6, "input_transport": 1e-6, "transport": 1e-6,
//                  "mode_leak": 1e-10, "antisymmetry": 1e-9},
//   "seed": 1,
//   "output_dir": "out"
// }
//
// Every key is optional except "metric".  Pole positions "at" are fractions
// of (Lx, Ly).  A factory step without "poles" uses the default spec.
// "random_factory" draws one pole, strength in [0.1, 0.3], constant, alpha
// and beta from the seeded stream.  Unknown keys are errors.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tpair/backlund.hpp"
#include "tpair/torus.hpp"

namespace tpair::cli {

struct ChainEntry {
  enum class Kind { constant, factory, random_factory, q } kind = Kind::constant;
  Vec3 axis = Vec3::UnitZ();
  bool default_spec = true;
  FactorySpec spec;  ///< pole positions as fractions of the cell
};

struct RunConfig {
  MetricSpec metric;
  std::vector<ChainEntry> chain;
  BacklundTolerances tolerances;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
};

/// Throws Error(invalid_argument) for anything unparseable or out of range:
/// grid sizes below 16, non-positive lengths or tolerances, unknown keys.
RunConfig parse_run_config(std::string_view text);

/// Concrete steps on the built metric; random draws depend only on the seed.
std::vector<StepSpec> build_steps(const RunConfig& cfg, const TorusMetric& metric);

}  // namespace tpair::cli
