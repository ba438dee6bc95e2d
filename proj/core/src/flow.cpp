#include <porofss/flow.hpp>

#include <porofss/error.hpp>

#include <string>
#include <vector>

namespace porofss {

FluxGeometry build_flux_geometry(const Grid& g, const FlowProps& fp) {
  validate_flow_props(fp, g.num_cells());
  FluxGeometry fg;
  fg.face.resize(g.num_faces());

  for (int f = 0; f < g.num_faces(); ++f) {
    FaceGeom& fc = fg.face[f];
    const int axis = g.face_axis(f);
    const auto [cm, cp] = g.face_cells(f);
    const double h = g.spacing(axis);
    const double area = g.face_area(axis);
    fc.axis = axis;
    fc.minus = cm;
    fc.plus = cp;

    if (cm >= 0 && cp >= 0) {
      // Harmonic average of the two half-cell resistances.
      const double km = fp.kappa(axis, cm);
      const double kp = fp.kappa(axis, cp);
      fc.kind = FaceGeom::Kind::Interior;
      fc.trans = area / (0.5 * h / km + 0.5 * h / kp);
      fc.grav = fp.rho0 * fp.gravity.dot(g.cell_center(cp) - g.cell_center(cm));
      continue;
    }

    const FaceBoundary& bc = g.face_boundary(f);
    if (bc.flow == FlowBc::NoFlux) {
      fc.kind = FaceGeom::Kind::NoFlux;
      continue;
    }
    fc.kind = FaceGeom::Kind::Pressure;
    fc.dirichlet = bc.pressure;
    const int c = cm >= 0 ? cm : cp;
    fc.trans = 2.0 * fp.kappa(axis, c) * area / h;
    const Vec3 xm = cm >= 0 ? g.cell_center(cm) : g.face_centroid(f);
    const Vec3 xp = cp >= 0 ? g.cell_center(cp) : g.face_centroid(f);
    fc.grav = fp.rho0 * fp.gravity.dot(xp - xm);
  }
  return fg;
}

FlowSystem assemble_flow(const Grid& g, const CouplingConstants& cc,
                         const FluxGeometry& fg, const FlowInputs& in) {
  const int n = g.num_cells();
  if (!(in.dt > 0.0)) {
    throw Error("flow: time step must be > 0, got " + std::to_string(in.dt));
  }
  if (in.p_old.size() != n || in.q.size() != n || in.d_bsig.size() != n ||
      in.d_phip.size() != n) {
    throw Error("flow: input field size does not match the cell count");
  }
  if (static_cast<int>(fg.face.size()) != g.num_faces()) {
    throw Error("flow: flux geometry does not match the grid");
  }

  const double V = g.cell_volume();
  const double dt = in.dt;

  FlowSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(7) * n);

  for (int c = 0; c < n; ++c) {
    trip.emplace_back(c, c, cc.C * V);
    sys.rhs(c) = cc.C * V * in.p_old(c) - V * in.d_phip(c) +
                 dt * V * in.q(c) - (cc.C / 3.0) * V * in.d_bsig(c);
  }

  for (const FaceGeom& fc : fg.face) {
    const double tT = dt * fc.trans;
    switch (fc.kind) {
      case FaceGeom::Kind::NoFlux:
        break;
      case FaceGeom::Kind::Interior:
        trip.emplace_back(fc.minus, fc.minus, tT);
        trip.emplace_back(fc.minus, fc.plus, -tT);
        trip.emplace_back(fc.plus, fc.plus, tT);
        trip.emplace_back(fc.plus, fc.minus, -tT);
        sys.rhs(fc.minus) -= tT * fc.grav;
        sys.rhs(fc.plus) += tT * fc.grav;
        break;
      case FaceGeom::Kind::Pressure:
        if (fc.plus < 0) {
          // Exterior on the +axis side: outward flux +z for cell `minus`.
          trip.emplace_back(fc.minus, fc.minus, tT);
          sys.rhs(fc.minus) += tT * (fc.dirichlet - fc.grav);
        } else {
          // Exterior on the -axis side: outward flux -z for cell `plus`.
          trip.emplace_back(fc.plus, fc.plus, tT);
          sys.rhs(fc.plus) += tT * (fc.dirichlet + fc.grav);
        }
        break;
    }
  }

  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();
  return sys;
}

Eigen::VectorXd face_fluxes(const FluxGeometry& fg, const Eigen::VectorXd& p) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(fg.face.size());
  for (size_t f = 0; f < fg.face.size(); ++f) {
    const FaceGeom& fc = fg.face[f];
    if (fc.kind == FaceGeom::Kind::NoFlux) continue;
    const double pm = fc.minus >= 0 ? p(fc.minus) : fc.dirichlet;
    const double pp = fc.plus >= 0 ? p(fc.plus) : fc.dirichlet;
    z(f) = fc.trans * (pm - pp + fc.grav);
  }
  return z;
}

double flux_mass_norm_sq(const FluxGeometry& fg, const Eigen::VectorXd& z) {
  if (z.size() != static_cast<Eigen::Index>(fg.face.size())) {
    throw Error("flow: flux vector size does not match the face count");
  }
  double s = 0.0;
  for (size_t f = 0; f < fg.face.size(); ++f) {
    if (fg.face[f].trans > 0.0) {
      s += z(f) * z(f) / fg.face[f].trans;
    }
  }
  return s;
}

FlowState solve_flow(const Grid& g, const CouplingConstants& cc,
                     const FluxGeometry& fg, const FlowInputs& in,
                     const FlowSolveOptions& opts) {
  const FlowSystem sys = assemble_flow(g, cc, fg, in);
  FlowState st;
  const int max_iter = opts.max_iter_per_cell * g.num_cells();
  const PcgResult r = pcg_jacobi(sys.A, sys.rhs, st.p, opts.rel_tol, max_iter);
  if (!r.converged) {
    throw SolverError("flow: CG stalled at relative residual " +
                      std::to_string(r.rel_residual) + " after " +
                      std::to_string(r.iterations) + " iterations");
  }
  st.solve = r;
  st.z = face_fluxes(fg, st.p);
  return st;
}

} // namespace porofss
