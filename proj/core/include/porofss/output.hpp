#pragma once

#include <porofss/coupling.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace porofss {

/// Locale-independent shortest-17-significant-digit formatting used by all
/// text outputs.
std::string format_double(double v);

/**
 * Iteration log, one row per coupling iteration of every committed step:
 *   step,time,k,criterion,T1,T2,T3,T4,T5,Bracket,RHS,contraction_satisfied,wall_ms
 * Numbers carry 17 significant digits, '.' decimal separator, ',' delimiter,
 * LF line endings. RHS is empty and contraction_satisfied is "na" on first
 * iterations, where no previous increment exists. Every column except
 * wall_ms is bitwise reproducible across reruns.
 */
void write_iteration_csv(std::ostream& os, const std::vector<StepRecord>& steps);
void write_iteration_csv(const std::string& path,
                         const std::vector<StepRecord>& steps);

/// Legacy-ASCII VTK structured-points snapshot: cell data p, zeta, phi_p,
/// the six cell-averaged stress components (and the yield value when a
/// yield surface is configured), point data u.
void write_vtk(std::ostream& os, const Grid& g, const MaterialSet& mats,
               const SimulationState& st);
void write_vtk(const std::string& path, const Grid& g, const MaterialSet& mats,
               const SimulationState& st);

} // namespace porofss
