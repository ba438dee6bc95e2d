#pragma once

#include <porofss/materials.hpp>
#include <porofss/tensor.hpp>

namespace porofss {

/// Outcome of the closest-point stress return at one quadrature point.
/// The pair (sigma, d_eps_p) always satisfies
///   sigma == sigma_trial - D : d_eps_p
/// by construction, so the elastic law survives the update exactly; an
/// elastic trial state passes through bitwise untouched.
struct ReturnMapResult {
  Mat3 sigma = Mat3::Zero();
  Mat3 d_eps_p = Mat3::Zero();
  double gamma_inc = 0.0;     ///< plastic multiplier increment
  bool plastic = false;
  bool apex = false;          ///< Drucker-Prager apex (cone tip) return
  int newton_iterations = 0;  ///< 0 for elastic or closed-form returns
};

/**
 * Maps a trial stress back onto the yield surface (associative flow).
 *
 * Dispatch:
 *  - Phi(trial) <= 0: elastic, identity.
 *  - VonMises with isotropic stiffness: closed-form radial return,
 *    d_gamma = Phi(trial) / (3 G).
 *  - everything else (anisotropic stiffness and/or DruckerPrager): damped
 *    Newton on the 7-unknown closest-point system in the Mandel basis, with
 *    an analytic apex pre-check/fallback for the DruckerPrager cone tip.
 *
 * Post-conditions on a plastic return: |Phi(sigma)| <= 1e-10 * sigma_y and
 * gamma_inc >= 0; violation raises SolverError instead of returning a bad
 * state.
 */
ReturnMapResult return_map(const Mat3& sigma_trial, const YieldModel& y,
                           const ElasticityTensor& D);

} // namespace porofss
