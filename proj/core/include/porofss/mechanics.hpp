#pragma once

#include <porofss/grid.hpp>
#include <porofss/linsolve.hpp>
#include <porofss/materials.hpp>
#include <porofss/return_map.hpp>

#include <Eigen/SparseCholesky>

#include <cstdint>
#include <vector>

namespace porofss {

/// 2x2x2 Gauss quadrature on trilinear hexahedra.
constexpr int kQpPerCell = 8;

/// Pins one displacement component of one node to a value. Used internally
/// for fixed/roller planes and exposed for displacement-driven setups.
struct NodalConstraint {
  int node = 0;
  int comp = 0;
  double value = 0.0;
};

/// Quadrature-point mechanics state after one solve. All tensor fields are
/// stored per quadrature point (cell-major, 8 points per cell); the elastic
/// law sigma = D : (eps - eps_p) - alpha p holds for every point by
/// construction of the update.
struct MechState {
  Eigen::VectorXd u;                  ///< nodal displacements (3 per node)
  std::vector<Mat3> eps;              ///< total strain
  std::vector<Mat3> eps_e;            ///< elastic strain eps - eps_p
  std::vector<Mat3> eps_p;            ///< plastic strain
  std::vector<Mat3> sigma;            ///< total stress (tension positive)
  std::vector<double> gamma_inc;      ///< plastic multiplier increments
  std::vector<std::uint8_t> apex;     ///< cone-tip return flags
  int outer_iterations = 0;           ///< plastic fixed-point sweeps used
};

/**
 * Quasi-static poro-elastoplastic mechanics on the structured grid: trilinear
 * displacement elements, 2x2x2 Gauss points, pressure and plastic strain
 * entering the momentum balance as fixed right-hand-side loads:
 *
 *   (D eps(u) : eps(q)) = (t, q) + (f, q) + (alpha p : eps(q)) + (D eps_p : eps(q)).
 *
 * The stiffness depends on neither pressure nor plasticity, so it is
 * assembled and factored exactly once (sparse LDLT) and reused by every
 * solve of the run. Plasticity is resolved by a fixed point over the
 * quadrature-point plastic strains: solve displacements, map trial stresses
 * back to the yield surface, repeat until the plastic-strain update
 * stagnates below 1e-10 (max-norm). Trial states are always built against
 * the reference plastic strain passed in by the caller, not the sweep
 * iterate, so a converged elastic step passes through bitwise.
 */
class MechSolver {
public:
  MechSolver(const Grid& g, const MaterialSet& mats,
             std::vector<NodalConstraint> extra_constraints = {});

  MechSolver(const MechSolver&) = delete;
  MechSolver& operator=(const MechSolver&) = delete;

  /// Full elastoplastic solve against frozen cell pressures. eps_p_ref is
  /// the reference plastic strain (empty = zero); it is the state the
  /// incremental return mapping measures from.
  MechState solve(const Eigen::VectorXd& p_cell,
                  const std::vector<Mat3>& eps_p_ref) const;

  /// One linear displacement solve with both pressure and plastic strain
  /// frozen as loads.
  Eigen::VectorXd solve_displacement(const Eigen::VectorXd& p_cell,
                                     const std::vector<Mat3>& eps_p) const;

  /// Quadrature-point strains of a displacement field.
  std::vector<Mat3> strains(const Eigen::VectorXd& u) const;

  /// Internal force vector of a quadrature-point stress field,
  /// sum_qp w B^T sigma. Equals the external force on free dofs when the
  /// state solves the weak form.
  Eigen::VectorXd assemble_internal_force(const std::vector<Mat3>& sigma) const;
  /// Tractions plus body force (gravity with the pressure-dependent fluid
  /// density law rho = rho0 (1 + c p)).
  Eigen::VectorXd assemble_external_force(const Eigen::VectorXd& p_cell) const;

  int num_dofs() const { return 3 * grid_.num_nodes(); }
  int num_free_dofs() const { return num_free_; }
  int num_qp() const { return kQpPerCell * grid_.num_cells(); }
  double qp_weight() const { return grid_.cell_volume() / kQpPerCell; }
  bool dof_constrained(int dof) const { return free_index_[dof] < 0; }

private:
  void build_element_matrices();
  void build_constraints(const std::vector<NodalConstraint>& extra);
  void assemble_and_factor();
  void add_coupling_loads(const Eigen::VectorXd& p_cell,
                          const std::vector<Mat3>& eps_p,
                          Eigen::VectorXd& F) const;

  Grid grid_;
  MaterialSet mats_;

  std::array<Eigen::Matrix<double, 6, 24>, kQpPerCell> B_;
  Eigen::Matrix<double, 24, 24> Ke_;

  std::vector<int> free_index_;        ///< dof -> free slot, -1 constrained
  std::vector<int> free_dofs_;
  Eigen::VectorXd constrained_values_; ///< full-length, zero on free dofs
  int num_free_ = 0;

  SparseMat K_fc_;                     ///< free rows x constrained columns
  Eigen::SimplicialLDLT<SparseMat> ldlt_;
};

} // namespace porofss
