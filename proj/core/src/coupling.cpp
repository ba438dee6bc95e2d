#include <porofss/coupling.hpp>

#include <porofss/error.hpp>

#include <chrono>
#include <optional>
#include <sstream>
#include <utility>

namespace porofss {

namespace {

IterateSnapshot make_snapshot_from_fields(const Grid& g,
                                          const CouplingConstants& cc,
                                          const Eigen::VectorXd& p,
                                          const Eigen::VectorXd& z,
                                          const IterateSnapshot& tensor_src) {
  IterateSnapshot s;
  s.p = p;
  s.z = z;
  s.sigma = tensor_src.sigma;
  s.eps_e = tensor_src.eps_e;
  s.eps_p = tensor_src.eps_p;
  const int nqp = static_cast<int>(s.sigma.size());
  s.bsig = tensor_src.bsig;
  s.phi_p = tensor_src.phi_p;
  s.zeta.resize(nqp);
  for (int iq = 0; iq < nqp; ++iq) {
    const int c = iq / kQpPerCell;
    s.zeta(iq) = cc.C * p(c) + (cc.C / 3.0) * s.bsig(iq) + s.phi_p(iq);
  }
  return s;
}

int count_violations(const StepRecord& rec) {
  int n = 0;
  for (const IterationRecord& ir : rec.iters) {
    if (ir.ledger.rhs_available && !ir.ledger.satisfied) ++n;
  }
  return n;
}

} // namespace

double convergence_criterion(const CouplingConstants& cc,
                             const std::vector<Mat3>& d_eps_e,
                             const std::vector<Mat3>& d_eps_p,
                             double qp_weight) {
  if (d_eps_e.size() != d_eps_p.size()) {
    throw Error("criterion: strain increment fields differ in size");
  }
  double s1 = 0.0, s2 = 0.0;
  for (size_t i = 0; i < d_eps_e.size(); ++i) {
    const double a = ddot(cc.alpha, d_eps_e[i]);
    const double b = ddot(cc.beta, d_eps_p[i]);
    const double ab = a + b;
    s1 += qp_weight * a * a;
    s2 += qp_weight * ab * ab;
  }
  return 6.0 * s1 + s2;
}

Simulation::Simulation(const Grid& g, const MaterialSet& mats,
                       const CouplingOptions& opts, Eigen::VectorXd source,
                       Eigen::VectorXd p_initial,
                       std::vector<NodalConstraint> extra_constraints)
    : grid_(g),
      mats_(mats),
      opts_(opts),
      fluxgeo_(build_flux_geometry(g, mats.flow)),
      mech_(std::make_unique<MechSolver>(grid_, mats_,
                                         std::move(extra_constraints))) {
  if (!(opts_.tol > 0.0)) {
    throw ConfigError("coupling: tol must be > 0");
  }
  if (opts_.k_max < 1) {
    throw ConfigError("coupling: k_max must be >= 1");
  }
  const int n = grid_.num_cells();
  if (source.size() == 0) {
    source_ = Eigen::VectorXd::Zero(n);
  } else if (source.size() == n) {
    source_ = std::move(source);
  } else {
    throw ConfigError("coupling: source field size does not match cell count");
  }
  Eigen::VectorXd p0;
  if (p_initial.size() == 0) {
    p0 = Eigen::VectorXd::Zero(n);
  } else if (p_initial.size() == n) {
    p0 = std::move(p_initial);
  } else {
    throw ConfigError("coupling: initial pressure size does not match cell count");
  }

  // Initial state: mechanical equilibrium against the initial pressure,
  // Darcy fluxes induced by it.
  state_.time = 0.0;
  state_.p = p0;
  state_.mech = mech_->solve(state_.p, {});
  state_.z = face_fluxes(fluxgeo_, state_.p);
  const IterateSnapshot s0 =
      make_snapshot(grid_, mats_.couple, state_.p, state_.z, state_.mech);
  state_.zeta_cell = cell_average(grid_, s0.zeta);
}

StepRecord Simulation::advance(double dt) {
  if (!(dt > 0.0)) {
    throw Error("coupling: time step must be > 0");
  }
  const CouplingConstants& cc = mats_.couple;

  // Time-level-n data. The plastic reference strain stays pinned at the old
  // time level for every coupling iteration: each mechanics solve re-derives
  // the full step increment, so iterations never ratchet plastic strain.
  const Eigen::VectorXd p_n = state_.p;
  const std::vector<Mat3> eps_p_n = state_.mech.eps_p;

  IterateSnapshot snap_prev =
      make_snapshot(grid_, cc, state_.p, state_.z, state_.mech);
  const Eigen::VectorXd bsig_n_cell = cell_average(grid_, snap_prev.bsig);
  const Eigen::VectorXd phip_n_cell = cell_average(grid_, snap_prev.phi_p);

  // Frozen volumetric fields seen by the flow solve; the first iteration is
  // time-lagged (previous time level).
  Eigen::VectorXd frozen_bsig = bsig_n_cell;
  Eigen::VectorXd frozen_phip = phip_n_cell;

  StepRecord rec;
  rec.step = committed_steps_ + 1;
  rec.t_end = state_.time + dt;
  rec.dt = dt;

  std::optional<double> prev_T1;
  double first_criterion = 0.0;

  for (int k = 1; k <= opts_.k_max; ++k) {
    const auto tic = std::chrono::steady_clock::now();

    FlowInputs fin;
    fin.dt = dt;
    fin.p_old = p_n;
    fin.q = source_;
    fin.d_bsig = frozen_bsig - bsig_n_cell;
    fin.d_phip = frozen_phip - phip_n_cell;
    const FlowState fs = solve_flow(grid_, cc, fluxgeo_, fin, opts_.flow);

    const IterateSnapshot snap_flow =
        make_snapshot_from_fields(grid_, cc, fs.p, fs.z, snap_prev);

    MechState ms = mech_->solve(fs.p, eps_p_n);
    const IterateSnapshot snap_mech = make_snapshot(grid_, cc, fs.p, fs.z, ms);

    const IterateDelta d_flow = make_delta(cc, grid_, snap_prev, snap_flow);
    const IterateDelta d_mech = make_delta(cc, grid_, snap_flow, snap_mech);
    const IterateDelta d_full = delta_add(d_flow, d_mech);

    const LedgerEntry led = compute_ledger(mats_.D, cc, grid_, fluxgeo_, dt,
                                           d_full, d_mech, prev_T1);
    prev_T1 = led.T1;

    // The criterion's elastic-strain increment is the part driven by the
    // sweep's stress change (D^-1 : delta sigma). The raw eps_e delta also
    // carries the pressure update made by the flow half and would overcount.
    std::vector<Mat3> d_eps_e_sweep(d_mech.sigma.size());
    for (size_t iq = 0; iq < d_mech.sigma.size(); ++iq) {
      d_eps_e_sweep[iq] = mats_.D.apply_inverse(d_mech.sigma[iq]);
    }
    const double crit =
        opts_.criterion_mode == CriterionMode::StressChange
            ? led.T1
            : convergence_criterion(cc, d_eps_e_sweep, d_mech.eps_p,
                                    grid_.cell_volume() / kQpPerCell);
    if (k == 1) first_criterion = crit;
    const double threshold =
        opts_.relative ? opts_.tol * first_criterion : opts_.tol;
    const bool converged = crit <= threshold;

    const auto toc = std::chrono::steady_clock::now();

    IterationRecord ir;
    ir.k = k;
    ir.criterion = crit;
    ir.bsig_sq = led.T1;
    ir.converged = converged;
    ir.ledger = led;
    ir.wall_ms = std::chrono::duration<double, std::milli>(toc - tic).count();
    rec.iters.push_back(ir);
    rec.iterations = k;

    if (converged) {
      rec.converged = true;
      state_.p = fs.p;
      state_.z = fs.z;
      state_.mech = std::move(ms);
      state_.zeta_cell = cell_average(grid_, snap_mech.zeta);
      state_.time += dt;
      ++committed_steps_;
    }

    if (observer_) {
      observer_(IterationView{rec.step, k, dt, snap_prev, snap_flow, snap_mech,
                              d_flow, d_mech, d_full, rec.iters.back()});
    }

    if (converged) return rec;

    frozen_bsig = cell_average(grid_, snap_mech.bsig);
    frozen_phip = cell_average(grid_, snap_mech.phi_p);
    snap_prev = snap_mech;
  }

  rec.converged = false;  // state untouched; caller decides how to retry
  return rec;
}

RunResult Simulation::run(double dt, double t_end) {
  if (!(dt > 0.0)) throw ConfigError("time: dt must be > 0");
  if (!(t_end > 0.0)) throw ConfigError("time: T must be > 0");

  RunResult rr;
  const double tiny = 1e-9 * dt;

  const auto fatal_check = [&](const StepRecord& rec) -> bool {
    if (!opts_.fatal_contraction) return false;
    return count_violations(rec) > 0;
  };
  const auto commit = [&](StepRecord&& rec) {
    rr.contraction_violations += count_violations(rec);
    rr.steps.push_back(std::move(rec));
  };

  while (state_.time < t_end - tiny) {
    const double dt_i = std::min(dt, t_end - state_.time);
    StepRecord rec = advance(dt_i);

    if (rec.converged) {
      const bool fatal = fatal_check(rec);
      const int step = rec.step;
      const double t = rec.t_end;
      commit(std::move(rec));
      if (fatal) {
        std::ostringstream os;
        os << "contraction inequality violated at step " << step << " (t = "
           << t << ") while running with the fatal-contraction flag";
        rr.halt_reason = os.str();
        return rr;
      }
      continue;
    }

    rr.failed_attempts.push_back(rec);
    if (!opts_.halve_on_failure) {
      std::ostringstream os;
      os << "coupling did not converge within k_max = " << opts_.k_max
         << " iterations at t = " << rec.t_end << " (criterion "
         << rec.iters.back().criterion << ")";
      rr.halt_reason = os.str();
      return rr;
    }

    // Retry policy: the failed window is re-run as two half steps, then the
    // nominal dt resumes.
    bool ok = true;
    for (int h = 0; h < 2 && ok; ++h) {
      StepRecord r2 = advance(dt_i / 2.0);
      if (!r2.converged) {
        rr.failed_attempts.push_back(std::move(r2));
        std::ostringstream os;
        os << "coupling did not converge at t = " << rec.t_end
           << " even after halving dt to " << dt_i / 2.0;
        rr.halt_reason = os.str();
        ok = false;
        break;
      }
      r2.halved = true;
      const bool fatal = fatal_check(r2);
      commit(std::move(r2));
      if (fatal) {
        rr.halt_reason = "contraction inequality violated during a halved "
                         "retry step while running with the fatal-contraction "
                         "flag";
        ok = false;
      }
    }
    if (!ok) return rr;
  }

  rr.completed = true;
  return rr;
}

} // namespace porofss
