// Microbenchmarks for the hot paths: pressure assembly+solve, the
// displacement/return-mapping sweep, the pointwise return map, and a whole
// coupled step.

#include "helpers.hpp"

#include <porofss/coupling.hpp>
#include <porofss/flow.hpp>
#include <porofss/mechanics.hpp>
#include <porofss/return_map.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace porofss;

namespace {

void BM_FlowAssembleSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MaterialSet m = testutil::iso_mats(10.0, 0.25, 1.0, 10.0, 1.0);
  const Grid g(n, n, n, 1.0 / n, 1.0 / n, 1.0 / n,
               testutil::consolidation_column_x(1.0));
  const FluxGeometry fg = build_flux_geometry(g, m.flow);

  FlowInputs in;
  in.dt = 0.01;
  in.p_old = Eigen::VectorXd::Constant(g.num_cells(), 0.4);
  in.q = Eigen::VectorXd::Zero(g.num_cells());
  in.d_bsig = Eigen::VectorXd::Constant(g.num_cells(), 0.01);
  in.d_phip = Eigen::VectorXd::Zero(g.num_cells());

  for (auto _ : state) {
    FlowState fs = solve_flow(g, m.couple, fg, in, FlowSolveOptions{});
    benchmark::DoNotOptimize(fs.p.data());
  }
  state.SetItemsProcessed(state.iterations() * g.num_cells());
}

void BM_MechanicsSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MaterialSet m = testutil::iso_mats(10.0, 0.25, 1.0, 10.0, 1.0);
  m.yield = YieldModel{YieldKind::VonMises, 0.9, 0.0};
  const Grid g(n, n, n, 1.0 / n, 1.0 / n, 1.0 / n,
               testutil::consolidation_column_x(2.0));
  const MechSolver ms(g, m, {});
  const Eigen::VectorXd p =
      Eigen::VectorXd::Constant(g.num_cells(), 2.0 * 10.0 / 22.0);

  for (auto _ : state) {
    MechState st = ms.solve(p, {});
    benchmark::DoNotOptimize(st.u.data());
  }
  state.SetItemsProcessed(state.iterations() * g.num_cells());
}

void BM_ReturnMap(benchmark::State& state) {
  const ElasticityTensor D = testutil::ortho_stiffness();
  const YieldModel y{YieldKind::DruckerPrager, 1.0, 0.4};
  std::mt19937 rng(7);
  std::vector<Mat3> trials(256);
  for (Mat3& t : trials) t = testutil::random_sym(rng, 2.5);

  size_t i = 0;
  for (auto _ : state) {
    const ReturnMapResult r = return_map(trials[i++ % trials.size()], y, D);
    benchmark::DoNotOptimize(r.sigma.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_CoupledStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MaterialSet m = testutil::iso_mats(10.0, 0.25, 1.0, 10.0, 1.0);
  const Grid g(n, n, n, 1.0 / n, 1.0 / n, 1.0 / n,
               testutil::consolidation_column_x(1.0));
  CouplingOptions opts;
  opts.tol = 1e-10;

  for (auto _ : state) {
    state.PauseTiming();  // fresh transient so every step does real work
    Simulation sim(g, m, opts, Eigen::VectorXd(),
                   Eigen::VectorXd::Constant(g.num_cells(), 10.0 / 22.0));
    state.ResumeTiming();
    const StepRecord rec = sim.advance(0.002);
    benchmark::DoNotOptimize(rec.iterations);
  }
  state.SetItemsProcessed(state.iterations() * g.num_cells());
}

} // namespace

BENCHMARK(BM_FlowAssembleSolve)->Arg(8)->Arg(16);
BENCHMARK(BM_MechanicsSolve)->Arg(4)->Arg(8);
BENCHMARK(BM_ReturnMap);
BENCHMARK(BM_CoupledStep)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
