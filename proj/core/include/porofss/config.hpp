#pragma once

#include <porofss/coupling.hpp>

#include <string>

namespace porofss {

struct OutputOptions {
  std::string directory = "out";
  int vtk_every = 0;  ///< 0 = only the final state; n > 0 = every n steps
  std::string csv_name = "iterations.csv";
};

/// A fully validated problem description assembled from a config file.
struct SimConfig {
  Grid grid;
  MaterialSet materials;
  CouplingOptions coupling;
  double dt = 0.0;
  double t_end = 0.0;
  OutputOptions output;
  double source_q = 0.0;   ///< uniform volumetric source density
  double initial_p = 0.0;  ///< uniform initial pressure

  explicit SimConfig(Grid g) : grid(std::move(g)) {}
};

/**
 * Parses and validates a JSON config file. Unknown keys anywhere are
 * rejected; every diagnostic names the offending key and the violated
 * constraint. See the README for the full schema and the symbol-to-key
 * table.
 */
SimConfig parse_config(const std::string& path);

/// Same, but from an in-memory JSON string (used by tests).
SimConfig parse_config_text(const std::string& text);

/// Builds a ready-to-run Simulation from a parsed config.
Simulation make_simulation(const SimConfig& cfg);

} // namespace porofss
