#pragma once

#include <porofss/grid.hpp>
#include <porofss/linsolve.hpp>
#include <porofss/materials.hpp>

#include <vector>

namespace porofss {

/**
 * Precomputed flux stencil for one face of the lowest-order mixed
 * discretization with vertex quadrature, which reduces the Darcy block to a
 * two-point flux per face:
 *
 *   z_f = trans * (psi_minus - psi_plus),   psi = p - rho0 * g . x,
 *
 * evaluated at cell centers (face centroid on a pressure boundary, where the
 * datum replaces the cell pressure). `grav` caches rho0 * g . (x_plus -
 * x_minus) so the flux law is trans * (p_minus - p_plus + grav). The
 * transmissibility harmonically averages the mobility of the two cells;
 * no-flux faces carry trans = 0 and a hard zero flux.
 */
struct FaceGeom {
  enum class Kind { Interior, Pressure, NoFlux };
  Kind kind = Kind::NoFlux;
  int minus = -1;          ///< cell on the minus side, -1 if exterior
  int plus = -1;           ///< cell on the plus side, -1 if exterior
  int axis = 0;
  double trans = 0.0;
  double grav = 0.0;
  double dirichlet = 0.0;  ///< pressure datum when one side is exterior
};

struct FluxGeometry {
  std::vector<FaceGeom> face;
};

FluxGeometry build_flux_geometry(const Grid& g, const FlowProps& fp);

/// Frozen data entering one pressure solve. The stress and plastic-porosity
/// increments are cell averages of (B : sigma) and phi_p relative to the
/// previous time level; they come from the latest mechanics sweep (or the
/// old time level on the first coupling iteration).
struct FlowInputs {
  double dt = 0.0;
  Eigen::VectorXd p_old;   ///< p^n per cell
  Eigen::VectorXd q;       ///< volumetric source density per cell
  Eigen::VectorXd d_bsig;  ///< B:sigma_frozen - B:sigma^n per cell
  Eigen::VectorXd d_phip;  ///< phi_p_frozen - phi_p^n per cell
};

struct FlowSystem {
  SparseMat A;             ///< SPD cell-pressure matrix
  Eigen::VectorXd rhs;
};

/// Backward-Euler mass balance per cell E with the total stress frozen:
///   C V (p - p^n) + dt * sum_f s_Ef z_f(p) + V d_phip
///     = dt V q - (C/3) V d_bsig  (+ boundary and gravity terms moved right).
FlowSystem assemble_flow(const Grid& g, const CouplingConstants& cc,
                         const FluxGeometry& fg, const FlowInputs& in);

/// Face fluxes induced by a cell pressure vector.
Eigen::VectorXd face_fluxes(const FluxGeometry& fg, const Eigen::VectorXd& p);

/// Squared flux norm in the diagonal Darcy mass matrix of the vertex
/// quadrature: sum_f z_f^2 / trans_f over faces with trans_f > 0.
double flux_mass_norm_sq(const FluxGeometry& fg, const Eigen::VectorXd& z);

struct FlowSolveOptions {
  double rel_tol = 1e-13;       ///< CG tolerance on |b - Ax| / |b|
  int max_iter_per_cell = 10;   ///< iteration cap = this * num_cells
};

struct FlowState {
  Eigen::VectorXd p;   ///< cell pressures
  Eigen::VectorXd z;   ///< face fluxes, oriented along +axis
  PcgResult solve;
};

FlowState solve_flow(const Grid& g, const CouplingConstants& cc,
                     const FluxGeometry& fg, const FlowInputs& in,
                     const FlowSolveOptions& opts = {});

} // namespace porofss
