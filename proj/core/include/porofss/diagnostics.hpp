#pragma once

#include <porofss/flow.hpp>
#include <porofss/grid.hpp>
#include <porofss/materials.hpp>
#include <porofss/mechanics.hpp>

#include <optional>
#include <vector>

namespace porofss {

/**
 * One coupled iterate, sampled at a consistent instant (after a full
 * half-sweep): cell pressures, face fluxes, quadrature-point tensors, and
 * the derived scalars the convergence theory tracks. The fluid content is
 * always evaluated from its state law
 *
 *   zeta = C p + (C/3) B : sigma + phi_p,      phi_p = beta : eps_p,
 *
 * never time-integrated, so consistency residuals isolate bookkeeping
 * errors rather than accumulation error.
 */
struct IterateSnapshot {
  Eigen::VectorXd p;           ///< per cell
  Eigen::VectorXd z;           ///< per face
  std::vector<Mat3> sigma;     ///< per quadrature point
  std::vector<Mat3> eps_e;     ///< per quadrature point
  std::vector<Mat3> eps_p;     ///< per quadrature point
  Eigen::VectorXd bsig;        ///< per qp: B : sigma
  Eigen::VectorXd phi_p;       ///< per qp: beta : eps_p
  Eigen::VectorXd zeta;        ///< per qp: C p + (C/3) bsig + phi_p
};

IterateSnapshot make_snapshot(const Grid& g, const CouplingConstants& cc,
                              const Eigen::VectorXd& p,
                              const Eigen::VectorXd& z, const MechState& m);

/**
 * Fieldwise difference of two iterates. The derived scalars are evaluated
 * on the incremental tensors (bsig = B : d_sigma, phi_p = beta : d_eps_p,
 * zeta = C dp + (C/3) bsig + phi_p) rather than by differencing the
 * snapshots' rounded arrays: the state laws are linear, so this is exact in
 * exact arithmetic and keeps round-off at the scale of the increments, not
 * of the full fields.
 */
struct IterateDelta {
  Eigen::VectorXd p;
  Eigen::VectorXd z;
  std::vector<Mat3> sigma;
  std::vector<Mat3> eps_e;
  std::vector<Mat3> eps_p;
  Eigen::VectorXd bsig;
  Eigen::VectorXd phi_p;
  Eigen::VectorXd zeta;
};

/// b - a.
IterateDelta make_delta(const CouplingConstants& cc, const Grid& g,
                        const IterateSnapshot& a, const IterateSnapshot& b);

/// Fieldwise x + y over every stored array, so that the full iterate delta
/// equals the flow delta plus the mechanics delta bitwise by construction.
IterateDelta delta_add(const IterateDelta& x, const IterateDelta& y);

/// Cell averages of a per-quadrature-point scalar field.
Eigen::VectorXd cell_average(const Grid& g, const Eigen::VectorXd& qp_field);

/**
 * Every term of the per-iteration contraction inequality. With delta = full
 * iterate increment and delta_p = its mechanics half:
 *
 *   T1 = |B : d sigma|^2           (quadrature-point norm)
 *   T2 = |d p|^2                   (cell norm)
 *   T3 = (3/C) dt |d z|^2 in the inverse-transmissibility flux norm
 *   T4 = (3/C) (d sigma : D^-1 : d sigma)
 *   T5 = 3/(2 C^2) |d zeta|^2
 *   Bracket = (3/C^2) [ 7/2 |d_p zeta - d_p phi_p|^2 + 1/2 |d phi_p|^2
 *                       + (C/3)(B : d sigma, d phi_p) ]
 *
 * and the inequality under test is
 *
 *   T1 + T2 + T3 + T4 + T5 - Bracket <= (1/2) |B : d sigma_prev|^2
 *
 * with contraction constant 1/2. The right side needs the previous
 * iteration's increment, so it is unavailable at k = 1.
 */
struct LedgerEntry {
  double T1 = 0.0, T2 = 0.0, T3 = 0.0, T4 = 0.0, T5 = 0.0;
  double bracket = 0.0;
  double rhs = 0.0;
  bool rhs_available = false;
  bool satisfied = true;  ///< inequality holds (vacuously true at k = 1)
  double margin = 0.0;    ///< rhs - lhs when available

  double lhs() const { return T1 + T2 + T3 + T4 + T5 - bracket; }
};

/// Contraction constant of the inequality.
inline constexpr double kContractionConstant = 0.5;

LedgerEntry compute_ledger(const ElasticityTensor& D,
                           const CouplingConstants& cc, const Grid& g,
                           const FluxGeometry& fg, double dt,
                           const IterateDelta& d_full,
                           const IterateDelta& d_mech,
                           std::optional<double> prev_T1);

/// Re-evaluates the inequality on an entry (lhs/rhs/satisfied/margin), with
/// absolute slack 1e-12 * max(1, rhs) for round-off.
struct ContractionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
  double margin = 0.0;
};
ContractionCheck check_contraction(const LedgerEntry& e);

/**
 * Relative residuals of the four fluid-content consistency identities (full
 * delta, flow half, mechanics half, and the squared-norm link the
 * convergence criterion rests on). Each residual is normalized by the scale
 * of the terms entering that identity; all must sit at round-off for
 * consistent snapshots.
 */
struct IdentityReport {
  double full_content = 0.0;    ///< d zeta = C dp + (C/3) B:d sigma + d phi_p
  double flow_content = 0.0;    ///< d_f zeta = C dp + d_f phi_p
  double mech_content = 0.0;    ///< d_p zeta = (C/3) B:d sigma + d_p phi_p
  double criterion_link = 0.0;  ///< |d_p zeta - d_p phi_p|^2 = (C^2/9)|B:d sigma|^2

  double max() const;
};

IdentityReport check_identities(const CouplingConstants& cc, const Grid& g,
                                const IterateDelta& d_full,
                                const IterateDelta& d_flow,
                                const IterateDelta& d_mech);

/// True when every entry of the half-sweep deltas that must vanish by
/// construction (stress, plastic fields in the flow half; pressure in the
/// mechanics half) is exactly zero.
struct StructuralZeros {
  bool flow_sigma = true;
  bool flow_eps_p = true;
  bool flow_phi_p = true;
  bool mech_p = true;
  bool all() const { return flow_sigma && flow_eps_p && flow_phi_p && mech_p; }
};
StructuralZeros check_structural_zeros(const IterateDelta& d_flow,
                                       const IterateDelta& d_mech);

} // namespace porofss
