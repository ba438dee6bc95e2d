#pragma once

#include <porofss/diagnostics.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace porofss {

/// Which scalar decides coupling convergence. Standard is the derived
/// strain-increment criterion
///   6 |alpha : d_p eps_e|^2 + |alpha : d_p eps_e + beta : d_p eps_p|^2 <= TOL;
/// StressChange is the naive fallback |B : d sigma|^2 <= TOL kept for
/// cross-checking experiments.
enum class CriterionMode { Standard, StressChange };

struct CouplingOptions {
  double tol = 1e-10;      ///< threshold on the (squared-norm) criterion value
  int k_max = 50;          ///< max coupling iterations per step
  CriterionMode criterion_mode = CriterionMode::Standard;
  bool relative = false;   ///< measure TOL against the first iteration's value
  bool fatal_contraction = false;  ///< violated ledger inequality aborts the run
  bool halve_on_failure = true;    ///< one dt/2 retry before giving up
  FlowSolveOptions flow;
};

/// The derived coupling convergence criterion evaluated on the mechanics
/// half-sweep increments (quadrature norm matching mechanics assembly).
/// d_eps_e must be the elastic-strain change attributable to the sweep's
/// stress change, i.e. D^-1 applied to the stress increment: the pressure is
/// frozen during the sweep, so its contribution to the stored elastic strain
/// belongs to the flow half and must not enter here.
double convergence_criterion(const CouplingConstants& cc,
                             const std::vector<Mat3>& d_eps_e,
                             const std::vector<Mat3>& d_eps_p,
                             double qp_weight);

struct IterationRecord {
  int k = 0;
  double criterion = 0.0;   ///< criterion value (mode-dependent)
  double bsig_sq = 0.0;     ///< |B : d sigma|^2 for this iteration (= ledger T1)
  bool converged = false;
  LedgerEntry ledger;
  double wall_ms = 0.0;
};

struct StepRecord {
  int step = 0;          ///< 1-based committed step index
  double t_end = 0.0;    ///< time at the end of the step
  double dt = 0.0;
  int iterations = 0;    ///< coupling iterations used
  bool converged = false;
  bool halved = false;   ///< produced by the dt/2 retry policy
  std::vector<IterationRecord> iters;
};

struct RunResult {
  std::vector<StepRecord> steps;            ///< committed steps, in order
  std::vector<StepRecord> failed_attempts;  ///< attempts discarded by retries
  bool completed = false;
  std::string halt_reason;         ///< empty when completed
  int contraction_violations = 0;  ///< ledger entries with satisfied == false
};

/// Everything a per-iteration observer may inspect: the three consistent
/// snapshots and the split/full increments of the iteration just finished.
struct IterationView {
  int step = 0;
  int k = 0;
  double dt = 0.0;
  const IterateSnapshot& prev;
  const IterateSnapshot& after_flow;
  const IterateSnapshot& after_mech;
  const IterateDelta& d_flow;
  const IterateDelta& d_mech;
  const IterateDelta& d_full;
  const IterationRecord& record;
};

/// Full simulation state at a committed time level.
struct SimulationState {
  double time = 0.0;
  Eigen::VectorXd p;
  Eigen::VectorXd z;
  MechState mech;
  Eigen::VectorXd zeta_cell;  ///< cell-averaged fluid content (for output)
};

/**
 * Fixed-stress split driver. Per time step, Backward Euler in time:
 * repeat, for k = 1, 2, ...
 *   1. flow solve with the volumetric total-stress and plastic-porosity
 *      fields frozen at the previous mechanics sweep (time level n at k = 1);
 *   2. mechanics solve with the new pressure frozen;
 *   3. evaluate the convergence criterion on the mechanics half-sweep
 *      increments and the contraction ledger on the full increments;
 * until the criterion drops below TOL or k_max is reached. A converged
 * step commits the state; a failed step leaves it untouched (run() then
 * retries once at dt/2 before halting with a reason).
 *
 * Deterministic: fixed assembly and iteration orders, direct mechanics
 * factorization reused across all steps, no randomness, no threads.
 */
class Simulation {
public:
  Simulation(const Grid& g, const MaterialSet& mats,
             const CouplingOptions& opts,
             Eigen::VectorXd source = Eigen::VectorXd(),
             Eigen::VectorXd p_initial = Eigen::VectorXd(),
             std::vector<NodalConstraint> extra_constraints = {});

  /// One fixed-stress time step. Commits on success; returns a record with
  /// converged = false (state untouched) when k_max is exhausted.
  StepRecord advance(double dt);

  /// Marches to t_end in steps of dt (the last step shrinks to land on
  /// t_end exactly), applying the retry policy on failures.
  RunResult run(double dt, double t_end);

  const SimulationState& state() const { return state_; }
  const Grid& grid() const { return grid_; }
  const MaterialSet& materials() const { return mats_; }
  const FluxGeometry& flux_geometry() const { return fluxgeo_; }
  const MechSolver& mech_solver() const { return *mech_; }
  const CouplingOptions& options() const { return opts_; }

  /// Observer invoked after every coupling iteration; on the converging
  /// iteration it runs after the state commit, so state() is current.
  void set_observer(std::function<void(const IterationView&)> obs) {
    observer_ = std::move(obs);
  }

private:
  Grid grid_;
  MaterialSet mats_;
  CouplingOptions opts_;
  FluxGeometry fluxgeo_;
  std::unique_ptr<MechSolver> mech_;
  Eigen::VectorXd source_;
  SimulationState state_;
  int committed_steps_ = 0;
  std::function<void(const IterationView&)> observer_;
};

} // namespace porofss
