// Command line driver: parse a JSON config, march the coupled problem to
// its final time, and write the iteration CSV plus VTK snapshots.
//
// Exit codes: 0 success, 2 config error, 3 solver failure,
// 4 halted before the final time (non-convergence or a fatal ledger
// violation).

#include <porofss/config.hpp>
#include <porofss/error.hpp>
#include <porofss/output.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

enum LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fields_%06d.vtk", step);
  return buf;
}

} // namespace

int main(int argc, char** argv) {
  using namespace porofss;

  CLI::App app{"coupled single-phase flow / poro-elastoplasticity driver "
               "(fixed-stress split)"};
  app.failure_message(CLI::FailureMessage::help);

  std::string config_path;
  bool validate_only = false;
  bool fatal_contraction = false;
  std::string log_level_name = "info";
  app.add_option("--config", config_path, "path to the JSON config file")
      ->required();
  app.add_flag("--validate-only", validate_only,
               "parse and validate the config, write nothing, exit");
  app.add_flag("--fatal-contraction", fatal_contraction,
               "halt the run when the per-iteration contraction inequality "
               "is violated (overrides the config)");
  app.add_option("--log-level", log_level_name, "error | info | debug")
      ->check(CLI::IsMember({"error", "info", "debug"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const LogLevel log = log_level_name == "error"  ? kError
                       : log_level_name == "info" ? kInfo
                                                  : kDebug;

  try {
    SimConfig cfg = parse_config(config_path);
    if (fatal_contraction) cfg.coupling.fatal_contraction = true;

    if (validate_only) {
      std::cout << "config OK: " << cfg.grid.nx() << "x" << cfg.grid.ny()
                << "x" << cfg.grid.nz() << " cells, dt = " << cfg.dt
                << ", T = " << cfg.t_end
                << (cfg.materials.yield ? ", elastoplastic" : ", elastic")
                << "\n";
      return 0;
    }

    namespace fs = std::filesystem;
    const fs::path outdir = cfg.output.directory;
    fs::create_directories(outdir);

    Simulation sim = make_simulation(cfg);

    sim.set_observer([&](const IterationView& v) {
      if (log >= kDebug) {
        std::cout << "  step " << v.step << " k=" << v.k
                  << " criterion=" << format_double(v.record.criterion);
        if (v.record.ledger.rhs_available) {
          std::cout << " ledger="
                    << (v.record.ledger.satisfied ? "ok" : "VIOLATED");
        }
        std::cout << "\n";
      }
      if (v.record.converged && log >= kInfo) {
        std::cout << "step " << v.step << "  t = " << sim.state().time
                  << "  iterations = " << v.k
                  << "  criterion = " << format_double(v.record.criterion)
                  << "\n";
      }
      if (v.record.converged && cfg.output.vtk_every > 0 &&
          v.step % cfg.output.vtk_every == 0) {
        write_vtk((outdir / snapshot_name(v.step)).string(), sim.grid(),
                  sim.materials(), sim.state());
      }
    });

    const RunResult rr = sim.run(cfg.dt, cfg.t_end);

    write_iteration_csv((outdir / cfg.output.csv_name).string(), rr.steps);
    write_vtk((outdir / "final.vtk").string(), sim.grid(), sim.materials(),
              sim.state());

    if (log >= kInfo) {
      std::cout << "run " << (rr.completed ? "completed" : "halted") << ": "
                << rr.steps.size() << " committed steps, "
                << rr.failed_attempts.size() << " discarded attempts, "
                << rr.contraction_violations << " contraction violations\n";
    }
    if (!rr.completed) {
      std::cerr << "halted: " << rr.halt_reason << "\n";
      return 4;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
