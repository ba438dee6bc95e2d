#include <porofss/mechanics.hpp>

#include <porofss/error.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

namespace porofss {

MechSolver::MechSolver(const Grid& g, const MaterialSet& mats,
                       std::vector<NodalConstraint> extra_constraints)
    : grid_(g), mats_(mats) {
  build_element_matrices();
  build_constraints(extra_constraints);
  assemble_and_factor();
}

void MechSolver::build_element_matrices() {
  const double gp = 1.0 / std::sqrt(3.0);
  const double hx = grid_.hx(), hy = grid_.hy(), hz = grid_.hz();

  for (int q = 0; q < kQpPerCell; ++q) {
    const int qi = q & 1, qj = (q >> 1) & 1, qk = (q >> 2) & 1;
    const Vec3 xi((2 * qi - 1) * gp, (2 * qj - 1) * gp, (2 * qk - 1) * gp);

    Eigen::Matrix<double, 6, 24> B = Eigen::Matrix<double, 6, 24>::Zero();
    for (int l = 0; l < 8; ++l) {
      const double sx = 2 * (l & 1) - 1;
      const double sy = 2 * ((l >> 1) & 1) - 1;
      const double sz = 2 * ((l >> 2) & 1) - 1;
      // dN/dx on the physical cell: reference gradient times 2/h.
      const double dNdx = 0.125 * sx * (1 + sy * xi(1)) * (1 + sz * xi(2)) * 2.0 / hx;
      const double dNdy = 0.125 * sy * (1 + sx * xi(0)) * (1 + sz * xi(2)) * 2.0 / hy;
      const double dNdz = 0.125 * sz * (1 + sx * xi(0)) * (1 + sy * xi(1)) * 2.0 / hz;
      B(0, 3 * l + 0) = dNdx;
      B(1, 3 * l + 1) = dNdy;
      B(2, 3 * l + 2) = dNdz;
      B(3, 3 * l + 1) = dNdz;
      B(3, 3 * l + 2) = dNdy;
      B(4, 3 * l + 0) = dNdz;
      B(4, 3 * l + 2) = dNdx;
      B(5, 3 * l + 0) = dNdy;
      B(5, 3 * l + 1) = dNdx;
    }
    B_[q] = B;
  }

  const double w = qp_weight();
  Ke_.setZero();
  for (int q = 0; q < kQpPerCell; ++q) {
    Ke_ += w * B_[q].transpose() * mats_.D.matrix() * B_[q];
  }
}

void MechSolver::build_constraints(const std::vector<NodalConstraint>& extra) {
  const int nn = grid_.num_nodes();
  std::map<int, double> pinned;

  const auto pin = [&](int node, int comp, double value) {
    const int dof = 3 * node + comp;
    const auto [it, inserted] = pinned.emplace(dof, value);
    if (!inserted && it->second != value) {
      throw ConfigError("mechanics: conflicting constraint values on node " +
                        std::to_string(node) + " component " +
                        std::to_string(comp));
    }
  };

  // Plane-derived constraints: fixed pins all components, roller only the
  // plane-normal one. Traction planes contribute loads, not constraints.
  for (int n = 0; n < nn; ++n) {
    const int i = n % (grid_.nx() + 1);
    const int j = (n / (grid_.nx() + 1)) % (grid_.ny() + 1);
    const int k = n / ((grid_.nx() + 1) * (grid_.ny() + 1));
    const bool on_plane[6] = {i == 0, i == grid_.nx(), j == 0,
                              j == grid_.ny(), k == 0, k == grid_.nz()};
    for (int p = 0; p < 6; ++p) {
      if (!on_plane[p]) continue;
      const MechBc tag = grid_.plane_boundary(p).mech;
      if (tag == MechBc::Fixed) {
        for (int d = 0; d < 3; ++d) pin(n, d, 0.0);
      } else if (tag == MechBc::Roller) {
        pin(n, p / 2, 0.0);
      }
    }
  }

  for (const NodalConstraint& c : extra) {
    if (c.node < 0 || c.node >= nn || c.comp < 0 || c.comp > 2) {
      throw ConfigError("mechanics: nodal constraint out of range");
    }
    pin(c.node, c.comp, c.value);
  }

  const int nd = num_dofs();
  free_index_.assign(nd, -1);
  constrained_values_ = Eigen::VectorXd::Zero(nd);
  free_dofs_.clear();
  for (int dof = 0; dof < nd; ++dof) {
    const auto it = pinned.find(dof);
    if (it == pinned.end()) {
      free_index_[dof] = static_cast<int>(free_dofs_.size());
      free_dofs_.push_back(dof);
    } else {
      constrained_values_(dof) = it->second;
    }
  }
  num_free_ = static_cast<int>(free_dofs_.size());
}

void MechSolver::assemble_and_factor() {
  std::vector<Eigen::Triplet<double>> tff, tfc;
  for (int c = 0; c < grid_.num_cells(); ++c) {
    const auto nodes = grid_.cell_nodes(c);
    for (int a = 0; a < 24; ++a) {
      const int dof_a = 3 * nodes[a / 3] + a % 3;
      const int fa = free_index_[dof_a];
      if (fa < 0) continue;
      for (int b = 0; b < 24; ++b) {
        const int dof_b = 3 * nodes[b / 3] + b % 3;
        const int fb = free_index_[dof_b];
        if (fb >= 0) {
          tff.emplace_back(fa, fb, Ke_(a, b));
        } else {
          tfc.emplace_back(fa, dof_b, Ke_(a, b));
        }
      }
    }
  }

  SparseMat K_ff(num_free_, num_free_);
  K_ff.setFromTriplets(tff.begin(), tff.end());
  K_ff.makeCompressed();
  K_fc_.resize(num_free_, num_dofs());
  K_fc_.setFromTriplets(tfc.begin(), tfc.end());
  K_fc_.makeCompressed();

  if (num_free_ == 0) return;

  ldlt_.compute(K_ff);
  if (ldlt_.info() != Eigen::Success) {
    throw SolverError("mechanics: LDLT factorization of the stiffness failed");
  }
  const Eigen::VectorXd d = ldlt_.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  int bad = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (std::abs(d(i)) <= 1e-12 * dmax) ++bad;
  }
  if (bad > 0) {
    throw SolverError("mechanics: stiffness matrix is singular (" +
                      std::to_string(bad) + " zero pivots); the boundary "
                      "constraints admit rigid-body modes");
  }
}

Eigen::VectorXd MechSolver::assemble_external_force(
    const Eigen::VectorXd& p_cell) const {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(num_dofs());

  for (int f = 0; f < grid_.num_faces(); ++f) {
    if (!grid_.face_is_boundary(f)) continue;
    const FaceBoundary& bc = grid_.face_boundary(f);
    if (bc.mech != MechBc::Traction) continue;
    const double wA = grid_.face_area(grid_.face_axis(f)) / 4.0;
    for (int n : grid_.face_nodes(f)) {
      for (int d = 0; d < 3; ++d) F(3 * n + d) += wA * bc.traction(d);
    }
  }

  const FlowProps& fp = mats_.flow;
  const double wV = grid_.cell_volume() / 8.0;
  for (int c = 0; c < grid_.num_cells(); ++c) {
    const double rho_f = fp.rho0 * (1.0 + fp.c * p_cell(c));
    const Vec3 f = (rho_f * fp.phi0 + fp.rho_r * (1.0 - fp.phi0)) * fp.gravity;
    if (f.isZero(0.0)) continue;
    for (int n : grid_.cell_nodes(c)) {
      for (int d = 0; d < 3; ++d) F(3 * n + d) += wV * f(d);
    }
  }
  return F;
}

void MechSolver::add_coupling_loads(const Eigen::VectorXd& p_cell,
                                    const std::vector<Mat3>& eps_p,
                                    Eigen::VectorXd& F) const {
  const double w = qp_weight();
  const Vec6 alpha_v = stress_to_voigt(mats_.couple.alpha);

  for (int c = 0; c < grid_.num_cells(); ++c) {
    const auto nodes = grid_.cell_nodes(c);
    Eigen::Matrix<double, 24, 1> fe = Eigen::Matrix<double, 24, 1>::Zero();
    for (int q = 0; q < kQpPerCell; ++q) {
      Vec6 load = alpha_v * p_cell(c);
      if (!eps_p.empty()) {
        const Mat3& ep = eps_p[kQpPerCell * c + q];
        if (!ep.isZero(0.0)) load += stress_to_voigt(mats_.D.apply(ep));
      }
      fe += w * (B_[q].transpose() * load);
    }
    for (int a = 0; a < 24; ++a) F(3 * nodes[a / 3] + a % 3) += fe(a);
  }
}

Eigen::VectorXd MechSolver::solve_displacement(
    const Eigen::VectorXd& p_cell, const std::vector<Mat3>& eps_p) const {
  if (p_cell.size() != grid_.num_cells()) {
    throw Error("mechanics: pressure vector size does not match cell count");
  }
  if (!eps_p.empty() && static_cast<int>(eps_p.size()) != num_qp()) {
    throw Error("mechanics: plastic strain field size does not match "
                "quadrature point count");
  }

  Eigen::VectorXd F = assemble_external_force(p_cell);
  add_coupling_loads(p_cell, eps_p, F);

  Eigen::VectorXd u = constrained_values_;
  if (num_free_ == 0) return u;

  Eigen::VectorXd rhs(num_free_);
  for (int i = 0; i < num_free_; ++i) rhs(i) = F(free_dofs_[i]);
  rhs -= K_fc_ * constrained_values_;

  const Eigen::VectorXd x = ldlt_.solve(rhs);
  if (ldlt_.info() != Eigen::Success) {
    throw SolverError("mechanics: displacement solve failed");
  }
  for (int i = 0; i < num_free_; ++i) u(free_dofs_[i]) = x(i);
  return u;
}

std::vector<Mat3> MechSolver::strains(const Eigen::VectorXd& u) const {
  if (u.size() != num_dofs()) {
    throw Error("mechanics: displacement vector size mismatch");
  }
  std::vector<Mat3> eps(num_qp());
  for (int c = 0; c < grid_.num_cells(); ++c) {
    const auto nodes = grid_.cell_nodes(c);
    Eigen::Matrix<double, 24, 1> ul;
    for (int a = 0; a < 24; ++a) ul(a) = u(3 * nodes[a / 3] + a % 3);
    for (int q = 0; q < kQpPerCell; ++q) {
      eps[kQpPerCell * c + q] = strain_from_voigt(B_[q] * ul);
    }
  }
  return eps;
}

Eigen::VectorXd MechSolver::assemble_internal_force(
    const std::vector<Mat3>& sigma) const {
  if (static_cast<int>(sigma.size()) != num_qp()) {
    throw Error("mechanics: stress field size mismatch");
  }
  const double w = qp_weight();
  Eigen::VectorXd F = Eigen::VectorXd::Zero(num_dofs());
  for (int c = 0; c < grid_.num_cells(); ++c) {
    const auto nodes = grid_.cell_nodes(c);
    Eigen::Matrix<double, 24, 1> fe = Eigen::Matrix<double, 24, 1>::Zero();
    for (int q = 0; q < kQpPerCell; ++q) {
      fe += w * (B_[q].transpose() * stress_to_voigt(sigma[kQpPerCell * c + q]));
    }
    for (int a = 0; a < 24; ++a) F(3 * nodes[a / 3] + a % 3) += fe(a);
  }
  return F;
}

MechState MechSolver::solve(const Eigen::VectorXd& p_cell,
                            const std::vector<Mat3>& eps_p_ref) const {
  const int nqp = num_qp();
  if (!eps_p_ref.empty() && static_cast<int>(eps_p_ref.size()) != nqp) {
    throw Error("mechanics: reference plastic strain size mismatch");
  }
  const std::vector<Mat3> ref =
      eps_p_ref.empty() ? std::vector<Mat3>(nqp, Mat3::Zero()) : eps_p_ref;
  std::vector<Mat3> work = ref;

  // Linear fixed-point contraction: heavily plastic (still subcritical)
  // loads can need ~70 sweeps to drive updates below the stagnation level.
  constexpr int kMaxOuter = 120;
  constexpr double kStagnationTol = 1e-10;

  MechState st;
  std::vector<double> history;
  bool done = false;

  for (int outer = 1; outer <= kMaxOuter && !done; ++outer) {
    st.u = solve_displacement(p_cell, work);
    st.eps = strains(st.u);
    st.eps_p.assign(nqp, Mat3::Zero());
    st.sigma.assign(nqp, Mat3::Zero());
    st.gamma_inc.assign(nqp, 0.0);
    st.apex.assign(nqp, 0);
    st.outer_iterations = outer;

    double change = 0.0;
    for (int c = 0; c < grid_.num_cells(); ++c) {
      const Mat3 alpha_p = mats_.couple.alpha * p_cell(c);
      for (int q = 0; q < kQpPerCell; ++q) {
        const int iq = kQpPerCell * c + q;
        const Mat3 trial = mats_.D.apply(st.eps[iq] - ref[iq]) - alpha_p;
        if (mats_.yield.has_value()) {
          const ReturnMapResult rm = return_map(trial, *mats_.yield, mats_.D);
          st.sigma[iq] = rm.sigma;
          st.eps_p[iq] = rm.plastic ? Mat3(ref[iq] + rm.d_eps_p) : ref[iq];
          st.gamma_inc[iq] = rm.gamma_inc;
          st.apex[iq] = rm.apex ? 1 : 0;
        } else {
          st.sigma[iq] = trial;
          st.eps_p[iq] = ref[iq];
        }
        change = std::max(change,
                          (st.eps_p[iq] - work[iq]).cwiseAbs().maxCoeff());
      }
    }
    history.push_back(change);
    if (change < kStagnationTol) {
      done = true;
    } else {
      work = st.eps_p;
    }
  }

  if (!done) {
    std::ostringstream os;
    os << "mechanics: plastic strain fixed point did not stagnate within "
       << kMaxOuter << " sweeps; max-norm updates were";
    for (double h : history) os << " " << h;
    throw SolverError(os.str());
  }

  st.eps_e.resize(nqp);
  for (int iq = 0; iq < nqp; ++iq) st.eps_e[iq] = st.eps[iq] - st.eps_p[iq];
  return st;
}

} // namespace porofss
