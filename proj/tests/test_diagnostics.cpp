#include <doctest.h>

#include "helpers.hpp"

#include <porofss/coupling.hpp>
#include <porofss/diagnostics.hpp>

#include <random>
#include <vector>

using namespace porofss;
using testutil::consolidation_column_x;
using testutil::iso_mats;

TEST_SUITE_BEGIN("diagnostics");

namespace {

/// Hand-built trio of consistent snapshots (prev -> flow half -> mech half)
/// with random fields; the derived scalars follow the state laws exactly.
struct SnapshotTrio {
  IterateSnapshot prev, flow, mech;
  IterateDelta d_flow, d_mech, d_full;
};

IterateSnapshot random_snapshot(const Grid& g, const CouplingConstants& cc,
                                std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int ncell = g.num_cells();
  const int nqp = kQpPerCell * ncell;
  IterateSnapshot s;
  s.p.resize(ncell);
  for (int c = 0; c < ncell; ++c) s.p(c) = u(rng);
  s.z.resize(g.num_faces());
  for (int f = 0; f < g.num_faces(); ++f) s.z(f) = u(rng);
  s.sigma.resize(nqp);
  s.eps_e.resize(nqp);
  s.eps_p.resize(nqp);
  s.bsig.resize(nqp);
  s.phi_p.resize(nqp);
  s.zeta.resize(nqp);
  for (int q = 0; q < nqp; ++q) {
    s.sigma[q] = testutil::random_sym(rng, 2.0);
    s.eps_e[q] = testutil::random_sym(rng, 0.1);
    s.eps_p[q] = testutil::random_sym(rng, 0.05);
    s.bsig(q) = ddot(cc.B, s.sigma[q]);
    s.phi_p(q) = ddot(cc.beta, s.eps_p[q]);
    s.zeta(q) = cc.C * s.p(q / kQpPerCell) + (cc.C / 3.0) * s.bsig(q) +
                s.phi_p(q);
  }
  return s;
}

SnapshotTrio random_trio(const Grid& g, const CouplingConstants& cc,
                         unsigned seed) {
  std::mt19937 rng(seed);
  SnapshotTrio t;
  t.prev = random_snapshot(g, cc, rng);

  // Flow half-sweep: pressure and flux move, tensor fields frozen.
  t.flow = random_snapshot(g, cc, rng);
  t.flow.sigma = t.prev.sigma;
  t.flow.eps_e = t.prev.eps_e;
  t.flow.eps_p = t.prev.eps_p;
  t.flow.bsig = t.prev.bsig;
  t.flow.phi_p = t.prev.phi_p;
  for (int q = 0; q < static_cast<int>(t.flow.zeta.size()); ++q) {
    t.flow.zeta(q) = cc.C * t.flow.p(q / kQpPerCell) +
                     (cc.C / 3.0) * t.flow.bsig(q) + t.flow.phi_p(q);
  }

  // Mechanics half-sweep: tensors move, pressure and flux frozen.
  t.mech = random_snapshot(g, cc, rng);
  t.mech.p = t.flow.p;
  t.mech.z = t.flow.z;
  for (int q = 0; q < static_cast<int>(t.mech.zeta.size()); ++q) {
    t.mech.zeta(q) = cc.C * t.mech.p(q / kQpPerCell) +
                     (cc.C / 3.0) * t.mech.bsig(q) + t.mech.phi_p(q);
  }

  t.d_flow = make_delta(cc, g, t.prev, t.flow);
  t.d_mech = make_delta(cc, g, t.flow, t.mech);
  t.d_full = delta_add(t.d_flow, t.d_mech);
  return t;
}

/// One iteration's worth of diagnostics collected by the observer.
struct IterProbe {
  int step = 0, k = 0;
  bool converged = false;
  double criterion = 0.0;
  double xsq = 0.0;  ///< |alpha : d_p eps_e|^2 in the quadrature norm
  double ysq = 0.0;  ///< |beta : d_p eps_p|^2 in the quadrature norm
  LedgerEntry ledger;
  IdentityReport ids;
  StructuralZeros zeros;
  bool primitive_split_exact = true;
};

std::vector<IterProbe> run_with_probes(Simulation& sim, double dt, int steps) {
  std::vector<IterProbe> probes;
  const CouplingConstants& cc = sim.materials().couple;
  const double w = sim.mech_solver().qp_weight();
  sim.set_observer([&](const IterationView& v) {
    IterProbe pr;
    pr.step = v.step;
    pr.k = v.k;
    pr.converged = v.record.converged;
    pr.criterion = v.record.criterion;
    pr.ledger = v.record.ledger;
    pr.ids = check_identities(cc, sim.grid(), v.d_full, v.d_flow, v.d_mech);
    pr.zeros = check_structural_zeros(v.d_flow, v.d_mech);
    for (size_t q = 0; q < v.d_mech.eps_e.size(); ++q) {
      // Elastic term of the criterion: the sweep's stress change mapped back
      // through the compliance (pressure is frozen during the sweep).
      const double x = (cc.C / 3.0) * ddot(cc.B, v.d_mech.sigma[q]);
      const double y = ddot(cc.beta, v.d_mech.eps_p[q]);
      pr.xsq += w * x * x;
      pr.ysq += w * y * y;
    }
    // The primitive increments must recombine to the snapshot differences
    // bitwise; only the derived scalars are evaluated by linearity.
    pr.primitive_split_exact =
        (v.d_full.p - (v.after_mech.p - v.prev.p)).isZero(0.0) &&
        (v.d_full.z - (v.after_mech.z - v.prev.z)).isZero(0.0);
    for (size_t q = 0; q < v.d_full.sigma.size(); ++q) {
      pr.primitive_split_exact =
          pr.primitive_split_exact &&
          (v.d_full.sigma[q] - (v.after_mech.sigma[q] - v.prev.sigma[q]))
              .isZero(0.0) &&
          (v.d_full.eps_p[q] - (v.after_mech.eps_p[q] - v.prev.eps_p[q]))
              .isZero(0.0);
    }
    probes.push_back(pr);
  });
  for (int s = 0; s < steps; ++s) {
    const StepRecord rec = sim.advance(dt);
    REQUIRE(rec.converged);
  }
  sim.set_observer({});
  return probes;
}

} // namespace

TEST_CASE("hand-built consistent snapshots: identities at round-off") {
  const Grid g(2, 2, 1, 0.5, 0.5, 1.0, testutil::sealed_roller_box());
  const MaterialSet m = testutil::ortho_mats(4.0, 1.0);
  const SnapshotTrio t = random_trio(g, m.couple, 101);

  const IdentityReport ids =
      check_identities(m.couple, g, t.d_full, t.d_flow, t.d_mech);
  CHECK(ids.full_content <= 1e-13);
  CHECK(ids.flow_content <= 1e-13);
  CHECK(ids.mech_content <= 1e-13);
  CHECK(ids.criterion_link <= 1e-13);
  CHECK(ids.max() ==
        std::max({ids.full_content, ids.flow_content, ids.mech_content,
                  ids.criterion_link}));

  const StructuralZeros z = check_structural_zeros(t.d_flow, t.d_mech);
  CHECK(z.flow_sigma);
  CHECK(z.flow_eps_p);
  CHECK(z.flow_phi_p);
  CHECK(z.mech_p);
  CHECK(z.all());

  // delta_add recombines to the end-to-end difference bitwise on the
  // primitive fields.
  CHECK((t.d_full.p - (t.mech.p - t.prev.p)).isZero(0.0));
  for (size_t q = 0; q < t.d_full.sigma.size(); ++q) {
    CHECK((t.d_full.sigma[q] - (t.mech.sigma[q] - t.prev.sigma[q]))
              .isZero(0.0));
  }
}

TEST_CASE("zero deltas produce an all-zero ledger, trivially satisfied") {
  const Grid g(2, 1, 1, 0.5, 1.0, 1.0, testutil::sealed_roller_box());
  const MaterialSet m = iso_mats(10.0, 0.25, 1.0, 10.0, 1.0);
  const FluxGeometry fg = build_flux_geometry(g, m.flow);
  const SnapshotTrio t = random_trio(g, m.couple, 7);
  const IterateDelta zero = make_delta(m.couple, g, t.prev, t.prev);

  LedgerEntry e = compute_ledger(m.D, m.couple, g, fg, 0.1, zero, zero, 0.7);
  CHECK(e.T1 == 0.0);
  CHECK(e.T2 == 0.0);
  CHECK(e.T3 == 0.0);
  CHECK(e.T4 == 0.0);
  CHECK(e.T5 == 0.0);
  CHECK(e.bracket == 0.0);
  CHECK(e.rhs == doctest::Approx(0.35));  // half the previous T1
  CHECK(e.rhs_available);
  CHECK(e.satisfied);
  CHECK(e.lhs() == 0.0);

  LedgerEntry first =
      compute_ledger(m.D, m.couple, g, fg, 0.1, zero, zero, std::nullopt);
  CHECK_FALSE(first.rhs_available);
  CHECK(first.satisfied);  // vacuously
}

TEST_CASE("manufactured unit stress field: T4 equals the compliance oracle") {
  const double E = 10.0, nu = 0.25;
  const Grid g(3, 2, 2, 0.25, 0.5, 0.5, testutil::sealed_roller_box());
  const MaterialSet m = iso_mats(E, nu, 1.0, 10.0, 1.0);
  const FluxGeometry fg = build_flux_geometry(g, m.flow);

  const int nqp = kQpPerCell * g.num_cells();
  IterateDelta d;
  d.p = Eigen::VectorXd::Zero(g.num_cells());
  d.z = Eigen::VectorXd::Zero(g.num_faces());
  Mat3 e11 = Mat3::Zero();
  e11(0, 0) = 1.0;
  d.sigma.assign(nqp, e11);
  d.eps_e.assign(nqp, Mat3::Zero());
  d.eps_p.assign(nqp, Mat3::Zero());
  d.bsig = Eigen::VectorXd::Zero(nqp);
  d.phi_p = Eigen::VectorXd::Zero(nqp);
  d.zeta = Eigen::VectorXd::Zero(nqp);
  IterateDelta dm = d;  // zero mechanics half except the shared shapes
  dm.sigma.assign(nqp, Mat3::Zero());

  const LedgerEntry e =
      compute_ledger(m.D, m.couple, g, fg, 0.1, d, dm, std::nullopt);
  // sigma : D^-1 : sigma = (D^-1)_11 = 1/E for the unit e1 (x) e1 field, so
  // T4 = (3/C) * total volume / E.
  const double vol = g.cell_volume() * g.num_cells();
  CHECK(e.T4 ==
        doctest::Approx((3.0 / m.couple.C) * vol / E).epsilon(1e-13));
  CHECK(e.T1 == 0.0);  // bsig was zeroed independently of sigma here
  CHECK(e.T5 == 0.0);
}

TEST_CASE("contraction bookkeeping: slack, margins, vacuous first iteration") {
  LedgerEntry e;
  e.T1 = 0.4;
  e.T2 = 0.05;
  e.T3 = 0.03;
  e.T4 = 0.02;
  e.T5 = 0.01;
  e.bracket = 0.11;
  e.rhs = 0.5;
  e.rhs_available = true;

  ContractionCheck c = check_contraction(e);
  CHECK(c.lhs == doctest::Approx(0.4));
  CHECK(c.rhs == doctest::Approx(0.5));
  CHECK(c.satisfied);
  CHECK(c.margin == doctest::Approx(0.1));

  e.bracket = 0.0;
  e.T1 = 0.6;  // lhs = 0.71 > rhs
  c = check_contraction(e);
  CHECK_FALSE(c.satisfied);
  CHECK(c.margin == doctest::Approx(0.5 - 0.71));

  // The 1e-12 slack absorbs round-off-sized violations but nothing more.
  e = LedgerEntry{};
  e.T1 = 1.0 + 5e-13;
  e.rhs = 1.0;
  e.rhs_available = true;
  CHECK(check_contraction(e).satisfied);
  e.T1 = 1.0 + 5e-12;
  CHECK_FALSE(check_contraction(e).satisfied);

  e = LedgerEntry{};
  e.T1 = 123.0;  // no rhs: vacuously satisfied
  e.rhs_available = false;
  CHECK(check_contraction(e).satisfied);
}

TEST_CASE("cell averages of quadrature fields") {
  const Grid g(2, 1, 1, 0.5, 1.0, 1.0, testutil::sealed_roller_box());
  Eigen::VectorXd qp(2 * kQpPerCell);
  for (int q = 0; q < kQpPerCell; ++q) {
    qp(q) = q;                    // cell 0: 0..7, average 3.5
    qp(kQpPerCell + q) = 2.0;     // cell 1: constant 2
  }
  const Eigen::VectorXd avg = cell_average(g, qp);
  CHECK(avg(0) == doctest::Approx(3.5));
  CHECK(avg(1) == doctest::Approx(2.0));
}

TEST_CASE("elastic consolidation: ledger terms, bracket identity, identities") {
  const int n = 8;
  const Grid g(n, 1, 1, 1.0 / n, 1.0, 1.0, consolidation_column_x(1.0));
  const MaterialSet m = iso_mats(10.0, 0.25, 1.0, 10.0, 1.0);
  CouplingOptions opts;
  opts.tol = 1e-13;
  Simulation sim(g, m, opts, Eigen::VectorXd(),
                 Eigen::VectorXd::Constant(n, 10.0 / 22.0));
  auto probes = run_with_probes(sim, 0.002, 4);

  int checked_contraction = 0;
  for (const IterProbe& pr : probes) {
    CHECK(pr.ledger.T1 >= 0.0);
    CHECK(pr.ledger.T2 >= 0.0);
    CHECK(pr.ledger.T3 >= 0.0);
    CHECK(pr.ledger.T4 >= 0.0);
    CHECK(pr.ledger.T5 >= 0.0);
    CHECK(pr.ids.max() <= 1e-10);
    CHECK(pr.zeros.all());
    CHECK(pr.primitive_split_exact);

    // Purely elastic: the Bracket collapses to (7/6) T1.
    CHECK(pr.ledger.bracket ==
          doctest::Approx((7.0 / 6.0) * pr.ledger.T1).epsilon(1e-12));
    // And the criterion is exactly 7 |alpha : d_p eps_e|^2.
    CHECK(pr.criterion == doctest::Approx(7.0 * pr.xsq).epsilon(1e-12));
    CHECK(pr.ysq == 0.0);

    if (pr.k >= 2) {
      CHECK(pr.ledger.rhs_available);
      CHECK(pr.ledger.satisfied);
      ++checked_contraction;
    } else {
      CHECK_FALSE(pr.ledger.rhs_available);
    }
  }
  CHECK(checked_contraction >= 8);  // several k >= 2 iterations happened
}

TEST_CASE("plastic consolidation: identities, positivity, criterion links") {
  const int n = 8;
  const Grid g(n, 1, 1, 1.0 / n, 1.0, 1.0, consolidation_column_x(2.0));
  MaterialSet m = iso_mats(10.0, 0.25, 1.0, 10.0, 1.0);
  m.yield = YieldModel{YieldKind::VonMises, 0.9, 0.0};
  CouplingOptions opts;
  opts.tol = 1e-13;
  opts.k_max = 80;
  // Undrained initial pressure for a traction of 2.
  Simulation sim(g, m, opts, Eigen::VectorXd(),
                 Eigen::VectorXd::Constant(n, 2.0 * 10.0 / 22.0));
  auto probes = run_with_probes(sim, 0.002, 4);

  bool any_plastic_iteration = false;
  for (const IterProbe& pr : probes) {
    CHECK(pr.ledger.T2 >= 0.0);
    CHECK(pr.ledger.T3 >= 0.0);
    CHECK(pr.ledger.T4 >= 0.0);
    CHECK(pr.ledger.T5 >= 0.0);
    CHECK(pr.ids.max() <= 1e-10);
    CHECK(pr.zeros.all());
    CHECK(pr.primitive_split_exact);
    if (pr.ysq > 0.0) any_plastic_iteration = true;

    // The Bracket is the (3 / (2 C^2))-scaled criterion, rewritten.
    const double cc = sim.materials().couple.C;
    const double expect = 3.0 / (2.0 * cc * cc) * pr.criterion;
    CHECK(pr.ledger.bracket ==
          doctest::Approx(expect).epsilon(1e-10));
    // First-two-summand bound: 7|X|^2 + |Y|^2 <= 2 * criterion.
    CHECK(7.0 * pr.xsq + pr.ysq <=
          2.0 * pr.criterion * (1.0 + 1e-12) + 1e-300);
  }
  CHECK(any_plastic_iteration);

  // Plastic strain really accumulated in the committed state.
  bool state_plastic = false;
  for (const Mat3& ep : sim.state().mech.eps_p) {
    state_plastic |= ep.norm() > 0.0;
  }
  CHECK(state_plastic);
}

TEST_SUITE_END();
