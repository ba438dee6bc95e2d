#pragma once

#include <porofss/tensor.hpp>

#include <optional>
#include <vector>

namespace porofss {

/**
 * Fourth-order drained elasticity tensor with both minor symmetries and the
 * major symmetry, stored as a 6x6 matrix acting on strain 6-vectors with
 * doubled shear (component order 11, 22, 33, 23, 13, 12).
 *
 * Construction validates symmetry and positive definiteness; the smallest
 * eigenvalue of the definiteness check is reported on failure. The class
 * caches the inverse law and the Mandel-basis representation used by the
 * anisotropic stress return.
 */
class ElasticityTensor {
public:
  /// Unit isotropic stiffness (E = 1, nu = 0): a valid placeholder that
  /// keeps aggregates holding a tensor default-constructible.
  ElasticityTensor();

  /// Isotropic stiffness from Young's modulus and Poisson ratio.
  static ElasticityTensor isotropic(double E, double nu);
  /// General stiffness from its 6x6 matrix (doubled-shear strain basis).
  static ElasticityTensor from_matrix(const Mat6& voigt);

  const Mat6& matrix() const { return voigt_; }
  const Mat6& compliance() const { return compliance_; }
  /// Representation acting on Mandel 6-vectors: S * matrix() * S^-1 with
  /// S = diag(1,1,1,sqrt2,sqrt2,sqrt2) applied on both sides appropriately.
  const Mat6& mandel() const { return mandel_; }
  const Mat6& mandel_inverse() const { return mandel_inv_; }

  /// sigma = D : eps
  Mat3 apply(const Mat3& strain) const;
  /// eps = D^-1 : sigma
  Mat3 apply_inverse(const Mat3& stress) const;

  /// True when the matrix matches the isotropic pattern to round-off; the
  /// closed-form radial stress return is only valid in that case.
  bool is_isotropic() const { return isotropic_; }
  double shear_modulus() const;   ///< requires is_isotropic()
  double bulk_modulus() const;    ///< requires is_isotropic()

private:
  void finalize();

  Mat6 voigt_ = Mat6::Zero();
  Mat6 compliance_ = Mat6::Zero();
  Mat6 mandel_ = Mat6::Zero();
  Mat6 mandel_inv_ = Mat6::Zero();
  bool isotropic_ = false;
  double shear_ = 0.0;
  double bulk_ = 0.0;
};

/**
 * Poromechanical coupling constants derived from the drained stiffness D,
 * the Biot tensor alpha and the Biot modulus M:
 *
 *   C = 1/M + alpha : D^-1 : alpha        (> 0)
 *   B = (3/C) * D^-1 : alpha              (so D^-1 : alpha == (C/3) B exactly)
 *
 * beta maps plastic strain to plastic porosity (phi_p = beta : eps_p) and
 * defaults to alpha when not supplied.
 */
struct CouplingConstants {
  Mat3 alpha = Mat3::Identity();
  Mat3 beta = Mat3::Identity();
  double M = 1.0;
  double C = 0.0;
  Mat3 B = Mat3::Zero();
};

CouplingConstants derive_coupling_constants(const ElasticityTensor& D,
                                            const Mat3& alpha, double M,
                                            const std::optional<Mat3>& beta = std::nullopt);

/// Single-phase flow properties. kappa() = K/mu is the mobility actually used
/// by the discretization; K must be diagonal (principal axes aligned with the
/// grid) and positive. An optional per-cell mobility override supports
/// heterogeneous permeability while the poromechanical constants stay global.
struct FlowProps {
  Mat3 K = Mat3::Identity();      ///< intrinsic permeability
  double mu = 1.0;                ///< fluid viscosity
  double c = 0.0;                 ///< fluid compressibility (density law)
  double rho0 = 0.0;              ///< reference fluid density
  double rho_r = 0.0;             ///< rock grain density
  double phi0 = 0.1;              ///< reference porosity
  Vec3 gravity = Vec3::Zero();

  /// Optional cellwise mobility diag(kappa_x, kappa_y, kappa_z); empty means
  /// the homogeneous K/mu everywhere.
  std::vector<Vec3> kappa_cell;

  /// Homogeneous mobility along one axis.
  double kappa(int axis) const { return K(axis, axis) / mu; }
  /// Mobility along one axis in one cell (honors the override).
  double kappa(int axis, int cell) const {
    return kappa_cell.empty() ? kappa(axis) : kappa_cell[cell](axis);
  }
};

/// Validates positivity/shape constraints; throws ConfigError on violation.
void validate_flow_props(const FlowProps& fp, int num_cells);

enum class YieldKind { VonMises, DruckerPrager };

/// Associative yield surface. VonMises:
///   Phi = sqrt(3/2) |dev sigma| - sigma_y,
/// DruckerPrager (eta >= 0, tension-positive mean stress):
///   Phi = sqrt(1/2) |dev sigma| + eta * tr(sigma)/3 - sigma_y.
struct YieldModel {
  YieldKind kind = YieldKind::VonMises;
  double sigma_y = 1.0;
  double eta = 0.0;   ///< pressure sensitivity; DruckerPrager only
};

double yield_value(const YieldModel& y, const Mat3& sigma);
/// Gradient of the yield function; throws on a zero deviator, where the
/// direction is undefined.
Mat3 flow_direction(const YieldModel& y, const Mat3& sigma);

/// Everything material: stiffness, coupling constants, flow properties and
/// the optional yield surface (absent = elasticity only).
struct MaterialSet {
  ElasticityTensor D;
  CouplingConstants couple;
  FlowProps flow;
  std::optional<YieldModel> yield;
};

} // namespace porofss
