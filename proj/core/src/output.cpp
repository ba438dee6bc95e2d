#include <porofss/output.hpp>

#include <porofss/diagnostics.hpp>
#include <porofss/error.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <system_error>

namespace porofss {

std::string format_double(double v) {
  // std::to_chars is locale-independent by definition; 17 significant digits
  // round-trip any IEEE-754 double exactly.
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                           std::chars_format::general, 17);
  if (res.ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf.data(), res.ptr);
}

namespace {

std::ofstream open_text(const std::string& path) {
  std::ofstream os(path, std::ios::binary); // binary: keep LF on all platforms
  if (!os) throw Error("cannot open output file: " + path);
  return os;
}

} // namespace

void write_iteration_csv(std::ostream& os, const std::vector<StepRecord>& steps) {
  os << "step,time,k,criterion,T1,T2,T3,T4,T5,Bracket,RHS,"
        "contraction_satisfied,wall_ms\n";
  for (const StepRecord& s : steps) {
    for (const IterationRecord& it : s.iters) {
      const LedgerEntry& L = it.ledger;
      os << s.step << ',' << format_double(s.t_end) << ',' << it.k << ','
         << format_double(it.criterion) << ',' << format_double(L.T1) << ','
         << format_double(L.T2) << ',' << format_double(L.T3) << ','
         << format_double(L.T4) << ',' << format_double(L.T5) << ','
         << format_double(L.bracket) << ',';
      if (L.rhs_available) {
        os << format_double(L.rhs) << ',' << (L.satisfied ? "true" : "false");
      } else {
        os << ",na";
      }
      os << ',' << format_double(it.wall_ms) << '\n';
    }
  }
}

void write_iteration_csv(const std::string& path,
                         const std::vector<StepRecord>& steps) {
  auto os = open_text(path);
  write_iteration_csv(os, steps);
  if (!os) throw Error("write failed: " + path);
}

void write_vtk(std::ostream& os, const Grid& g, const MaterialSet& mats,
               const SimulationState& st) {
  const int ncell = g.num_cells();
  const int nnode = g.num_nodes();

  os << "# vtk DataFile Version 3.0\n";
  os << "coupled flow-mechanics snapshot t=" << format_double(st.time) << "\n";
  os << "ASCII\n";
  os << "DATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << g.nx() + 1 << ' ' << g.ny() + 1 << ' ' << g.nz() + 1
     << "\n";
  os << "ORIGIN 0 0 0\n";
  os << "SPACING " << format_double(g.hx()) << ' ' << format_double(g.hy())
     << ' ' << format_double(g.hz()) << "\n";

  auto scalar_field = [&os](const std::string& name, int n, auto&& value) {
    os << "SCALARS " << name << " double 1\n";
    os << "LOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) os << format_double(value(i)) << "\n";
  };

  // Cell-averaged quadrature fields.
  Eigen::VectorXd phi_p_cell(ncell);
  std::array<Eigen::VectorXd, 6> sig_cell;
  for (auto& v : sig_cell) v.resize(ncell);
  for (int c = 0; c < ncell; ++c) {
    double pp = 0.0;
    Vec6 sv = Vec6::Zero();
    for (int q = 0; q < kQpPerCell; ++q) {
      const int qp = c * kQpPerCell + q;
      pp += ddot(mats.couple.beta, st.mech.eps_p[qp]);
      sv += stress_to_voigt(st.mech.sigma[qp]);
    }
    phi_p_cell[c] = pp / kQpPerCell;
    for (int comp = 0; comp < 6; ++comp) sig_cell[comp][c] = sv[comp] / kQpPerCell;
  }

  os << "CELL_DATA " << ncell << "\n";
  scalar_field("p", ncell, [&](int c) { return st.p[c]; });
  scalar_field("zeta", ncell, [&](int c) { return st.zeta_cell[c]; });
  scalar_field("phi_p", ncell, [&](int c) { return phi_p_cell[c]; });
  static const char* kSigNames[6] = {"sigma_xx", "sigma_yy", "sigma_zz",
                                     "sigma_yz", "sigma_xz", "sigma_xy"};
  for (int comp = 0; comp < 6; ++comp)
    scalar_field(kSigNames[comp], ncell, [&](int c) { return sig_cell[comp][c]; });
  if (mats.yield) {
    scalar_field("yield_value", ncell, [&](int c) {
      Vec6 sv;
      for (int comp = 0; comp < 6; ++comp) sv[comp] = sig_cell[comp][c];
      return yield_value(*mats.yield, stress_from_voigt(sv));
    });
  }

  os << "POINT_DATA " << nnode << "\n";
  os << "VECTORS u double\n";
  for (int n = 0; n < nnode; ++n) {
    os << format_double(st.mech.u[3 * n + 0]) << ' '
       << format_double(st.mech.u[3 * n + 1]) << ' '
       << format_double(st.mech.u[3 * n + 2]) << "\n";
  }
}

void write_vtk(const std::string& path, const Grid& g, const MaterialSet& mats,
               const SimulationState& st) {
  auto os = open_text(path);
  write_vtk(os, g, mats, st);
  if (!os) throw Error("write failed: " + path);
}

} // namespace porofss
