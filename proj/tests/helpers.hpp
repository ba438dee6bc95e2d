#pragma once

// Shared fixtures for the test suites: canonical boundary layouts, a few
// deterministic material sets, and seeded random generators.

#include <porofss/coupling.hpp>
#include <porofss/grid.hpp>
#include <porofss/materials.hpp>

#include <random>

namespace testutil {

using namespace porofss;

inline FaceBoundary fb(FlowBc flow, double g, MechBc mech,
                       const Vec3& t = Vec3::Zero()) {
  FaceBoundary b;
  b.flow = flow;
  b.pressure = g;
  b.mech = mech;
  b.traction = t;
  return b;
}

/// Sealed box on rollers: no flux anywhere, normal displacement pinned on
/// every plane. Pins all rigid body modes.
inline BoundarySpec sealed_roller_box() {
  return BoundarySpec::uniform(fb(FlowBc::NoFlux, 0.0, MechBc::Roller));
}

/// Classical uniaxial consolidation column along x: drained roller at xmin,
/// sealed compressive traction q at xmax, sealed rollers on the sides.
inline BoundarySpec consolidation_column_x(double q, double drain_p = 0.0) {
  BoundarySpec bc = sealed_roller_box();
  bc.plane[0] = fb(FlowBc::Pressure, drain_p, MechBc::Roller);
  bc.plane[1] = fb(FlowBc::NoFlux, 0.0, MechBc::Traction, Vec3(-q, 0.0, 0.0));
  return bc;
}

/// Isotropic material set with scalar Biot coefficient and mobility.
inline MaterialSet iso_mats(double E, double nu, double alpha, double M,
                            double kappa) {
  MaterialSet m;
  m.D = ElasticityTensor::isotropic(E, nu);
  m.couple = derive_coupling_constants(m.D, alpha * Mat3::Identity(), M);
  m.flow.K = kappa * Mat3::Identity();
  m.flow.mu = 1.0;
  return m;
}

/// A fixed orthotropic stiffness (checked positive definite) for the
/// anisotropic paths.
inline ElasticityTensor ortho_stiffness() {
  Mat6 m;
  m << 12.0,  4.0,  3.0, 0.0, 0.0, 0.0,
        4.0, 10.0,  2.5, 0.0, 0.0, 0.0,
        3.0,  2.5,  9.0, 0.0, 0.0, 0.0,
        0.0,  0.0,  0.0, 3.5, 0.0, 0.0,
        0.0,  0.0,  0.0, 0.0, 3.0, 0.0,
        0.0,  0.0,  0.0, 0.0, 0.0, 2.8;
  return ElasticityTensor::from_matrix(m);
}

/// Orthotropic material set with an anisotropic Biot tensor.
inline MaterialSet ortho_mats(double M, double kappa) {
  MaterialSet m;
  m.D = ortho_stiffness();
  Mat3 alpha = Mat3::Zero();
  alpha.diagonal() << 0.9, 0.8, 0.7;
  Mat3 beta = Mat3::Zero();
  beta.diagonal() << 0.6, 0.5, 0.55;
  m.couple = derive_coupling_constants(m.D, alpha, M, beta);
  m.flow.K = kappa * Mat3::Identity();
  m.flow.mu = 1.0;
  return m;
}

/// Deterministic random symmetric 3x3 with entries of size ~s.
inline Mat3 random_sym(std::mt19937& rng, double s) {
  std::uniform_real_distribution<double> u(-s, s);
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      m(i, j) = u(rng);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

/// Deterministic random SPD 6x6 stiffness, A^T A + I scaled.
inline Mat6 random_spd6(std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat6 a;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) a(i, j) = u(rng);
  }
  Mat6 m = a.transpose() * a + Mat6::Identity();
  return scale * m;
}

} // namespace testutil
