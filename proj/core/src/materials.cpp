#include <porofss/materials.hpp>

#include <porofss/error.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace porofss {

namespace {

Mat6 mandel_scaling() {
  Vec6 d;
  d << 1.0, 1.0, 1.0, std::sqrt(2.0), std::sqrt(2.0), std::sqrt(2.0);
  return d.asDiagonal();
}

Mat6 isotropic_matrix(double lambda, double G) {
  Mat6 m = Mat6::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = lambda;
    m(i, i) = lambda + 2.0 * G;
    m(i + 3, i + 3) = G;
  }
  return m;
}

} // namespace

ElasticityTensor::ElasticityTensor() {
  voigt_ = isotropic_matrix(0.0, 0.5);  // E = 1, nu = 0
  finalize();
}

ElasticityTensor ElasticityTensor::isotropic(double E, double nu) {
  if (!(E > 0.0)) {
    throw ConfigError("elasticity: Young's modulus must be > 0, got " +
                      std::to_string(E));
  }
  if (!(nu > -1.0 && nu < 0.5)) {
    throw ConfigError("elasticity: Poisson ratio must lie in (-1, 0.5), got " +
                      std::to_string(nu));
  }
  const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double G = E / (2.0 * (1.0 + nu));
  ElasticityTensor t;
  t.voigt_ = isotropic_matrix(lambda, G);
  t.finalize();
  return t;
}

ElasticityTensor ElasticityTensor::from_matrix(const Mat6& voigt) {
  const double scale = voigt.norm();
  if (!(scale > 0.0)) {
    throw ConfigError("elasticity: stiffness matrix is zero");
  }
  if ((voigt - voigt.transpose()).norm() > 1e-12 * scale) {
    throw ConfigError("elasticity: stiffness matrix is not symmetric "
                      "(major symmetry violated)");
  }
  ElasticityTensor t;
  t.voigt_ = 0.5 * (voigt + voigt.transpose());
  t.finalize();
  return t;
}

void ElasticityTensor::finalize() {
  const Mat6 S = mandel_scaling();
  mandel_ = S * voigt_ * S;

  Eigen::SelfAdjointEigenSolver<Mat6> es(mandel_);
  if (es.info() != Eigen::Success) {
    throw ConfigError("elasticity: eigenvalue check failed to converge");
  }
  const double min_eig = es.eigenvalues().minCoeff();
  if (!(min_eig > 0.0)) {
    throw ConfigError("elasticity: stiffness is not positive definite; "
                      "smallest eigenvalue = " + std::to_string(min_eig));
  }

  compliance_ = voigt_.inverse();
  mandel_inv_ = mandel_.inverse();

  // Isotropy detection enables the closed-form radial return.
  const double lambda = voigt_(0, 1);
  const double G = voigt_(3, 3);
  isotropic_ = (voigt_ - isotropic_matrix(lambda, G)).norm() <= 1e-12 * voigt_.norm();
  if (isotropic_) {
    shear_ = G;
    bulk_ = lambda + 2.0 * G / 3.0;
  }
}

Mat3 ElasticityTensor::apply(const Mat3& strain) const {
  return stress_from_voigt(voigt_ * strain_to_voigt(strain));
}

Mat3 ElasticityTensor::apply_inverse(const Mat3& stress) const {
  return strain_from_voigt(compliance_ * stress_to_voigt(stress));
}

double ElasticityTensor::shear_modulus() const {
  if (!isotropic_) throw Error("elasticity: shear modulus of anisotropic tensor");
  return shear_;
}

double ElasticityTensor::bulk_modulus() const {
  if (!isotropic_) throw Error("elasticity: bulk modulus of anisotropic tensor");
  return bulk_;
}

CouplingConstants derive_coupling_constants(const ElasticityTensor& D,
                                            const Mat3& alpha, double M,
                                            const std::optional<Mat3>& beta) {
  if (!(M > 0.0)) {
    throw ConfigError("coupling: Biot modulus M must be > 0, got " +
                      std::to_string(M));
  }
  if ((alpha - alpha.transpose()).norm() > 1e-12 * (alpha.norm() + 1e-300)) {
    throw ConfigError("coupling: Biot tensor alpha must be symmetric");
  }
  CouplingConstants cc;
  cc.alpha = symmetrize(alpha);
  cc.M = M;

  const Mat3 Dinv_alpha = D.apply_inverse(cc.alpha);
  cc.C = 1.0 / M + ddot(cc.alpha, Dinv_alpha);
  if (!(cc.C > 0.0)) {
    throw ConfigError("coupling: derived constant C must be > 0, got " +
                      std::to_string(cc.C));
  }
  // Defined so that D^-1 : alpha == (C/3) B holds exactly in floating point.
  cc.B = (3.0 / cc.C) * Dinv_alpha;

  if (beta.has_value()) {
    if ((*beta - beta->transpose()).norm() > 1e-12 * (beta->norm() + 1e-300)) {
      throw ConfigError("coupling: plastic-porosity tensor beta must be symmetric");
    }
    cc.beta = symmetrize(*beta);
  } else {
    cc.beta = cc.alpha;
  }
  return cc;
}

void validate_flow_props(const FlowProps& fp, int num_cells) {
  if (!(fp.mu > 0.0)) {
    throw ConfigError("flow: viscosity mu must be > 0, got " +
                      std::to_string(fp.mu));
  }
  if (fp.c < 0.0) {
    throw ConfigError("flow: fluid compressibility c must be >= 0, got " +
                      std::to_string(fp.c));
  }
  if (fp.rho0 < 0.0 || fp.rho_r < 0.0) {
    throw ConfigError("flow: densities rho0 and rho_r must be >= 0");
  }
  if (!(fp.phi0 > 0.0 && fp.phi0 < 1.0)) {
    throw ConfigError("flow: reference porosity phi0 must lie in (0, 1), got " +
                      std::to_string(fp.phi0));
  }
  const double kscale = fp.K.norm();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j && std::abs(fp.K(i, j)) > 1e-14 * kscale) {
        throw ConfigError("flow: permeability K must be diagonal "
                          "(principal axes aligned with the grid)");
      }
    }
    if (!(fp.K(i, i) > 0.0)) {
      throw ConfigError("flow: permeability K diagonal entries must be > 0");
    }
  }
  if (!fp.kappa_cell.empty()) {
    if (static_cast<int>(fp.kappa_cell.size()) != num_cells) {
      throw ConfigError("flow: cellwise mobility override has " +
                        std::to_string(fp.kappa_cell.size()) +
                        " entries but the grid has " +
                        std::to_string(num_cells) + " cells");
    }
    for (const auto& k : fp.kappa_cell) {
      if (!(k.minCoeff() > 0.0)) {
        throw ConfigError("flow: cellwise mobility entries must be > 0");
      }
    }
  }
}

double yield_value(const YieldModel& y, const Mat3& sigma) {
  const Mat3 s = deviator(sigma);
  const double nd = frobenius_norm(s);
  switch (y.kind) {
    case YieldKind::VonMises:
      return std::sqrt(1.5) * nd - y.sigma_y;
    case YieldKind::DruckerPrager:
      return std::sqrt(0.5) * nd + y.eta * sigma.trace() / 3.0 - y.sigma_y;
  }
  throw Error("yield_value: unknown yield kind");
}

Mat3 flow_direction(const YieldModel& y, const Mat3& sigma) {
  const Mat3 s = deviator(sigma);
  const double nd = frobenius_norm(s);
  if (!(nd > 1e-300)) {
    throw Error("flow_direction: deviatoric stress is zero, the yield "
                "gradient is undefined at this state");
  }
  switch (y.kind) {
    case YieldKind::VonMises:
      return std::sqrt(1.5) / nd * s;
    case YieldKind::DruckerPrager:
      return std::sqrt(0.5) / nd * s + (y.eta / 3.0) * Mat3::Identity();
  }
  throw Error("flow_direction: unknown yield kind");
}

} // namespace porofss
