#include <porofss/return_map.hpp>

#include <porofss/error.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace porofss {

namespace {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;

Mat6 dev_projector() {
  Mat6 P = Mat6::Identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) P(i, j) -= 1.0 / 3.0;
  return P;
}

Vec6 hydrostatic_unit() {
  Vec6 e = Vec6::Zero();
  e(0) = e(1) = e(2) = 1.0;
  return e;
}

/// Cone-tip return: project the trial stress onto the Drucker-Prager apex
/// sigma = (sigma_y / eta) I and read the plastic increment off the elastic
/// law. Flagged, because the flow direction is a subgradient there.
ReturnMapResult apex_return(const Mat3& sigma_trial, const YieldModel& y,
                            const ElasticityTensor& D) {
  const Mat3 sigma_apex = (y.sigma_y / y.eta) * Mat3::Identity();
  ReturnMapResult res;
  res.d_eps_p = D.apply_inverse(sigma_trial - sigma_apex);
  res.sigma = sigma_trial - D.apply(res.d_eps_p);
  res.gamma_inc = res.d_eps_p.trace() / y.eta;
  res.plastic = true;
  res.apex = true;
  if (!(res.gamma_inc > 0.0)) {
    throw SolverError("stress return: apex projection produced a "
                      "non-positive plastic multiplier (" +
                      std::to_string(res.gamma_inc) + ")");
  }
  return res;
}

/// Damped Newton on the closest-point system in the Mandel basis:
///   R1 = m - m_trial + dgamma * Dh * n(m) = 0   (6 equations)
///   R2 = Phi(m) = 0
/// with n(m) the Mandel yield gradient and Dh the Mandel stiffness.
ReturnMapResult newton_return(const Mat3& sigma_trial, const YieldModel& y,
                              const ElasticityTensor& D, double phi_trial) {
  const Mat6 P = dev_projector();
  const Vec6 e = hydrostatic_unit();
  const Mat6& Dh = D.mandel();
  const Vec6 mt = to_mandel(sigma_trial);

  const bool dp = y.kind == YieldKind::DruckerPrager;
  const double a = dp ? std::sqrt(0.5) : std::sqrt(1.5);
  const double e3 = dp ? y.eta / 3.0 : 0.0;

  const double scale = std::max(mt.norm(), y.sigma_y);
  const double dev_floor = 1e-12 * scale;
  const double tol_r = 1e-12 * scale;
  const double tol_phi = 1e-12 * y.sigma_y;
  // Acceptance band used when the iteration stalls at round-off level.
  const double bail_r = 1e-10 * scale;
  const double bail_phi = 1e-10 * y.sigma_y;

  const auto phi = [&](const Vec6& m) {
    return a * (P * m).norm() + e3 * e.dot(m) - y.sigma_y;
  };
  const auto grad = [&](const Vec6& m) -> Vec6 {
    const Vec6 pm = P * m;
    return (a / pm.norm()) * pm + e3 * e;
  };
  const auto grad_jac = [&](const Vec6& m) -> Mat6 {
    const Vec6 pm = P * m;
    const double nd = pm.norm();
    return (a / nd) * P - (a / (nd * nd * nd)) * (pm * pm.transpose());
  };
  const auto residual = [&](const Vec6& m, double dg) -> Vec7 {
    Vec7 r;
    r.head<6>() = m - mt + dg * (Dh * grad(m));
    r(6) = phi(m);
    return r;
  };

  // A hydrostatic trial state above yield only happens on the
  // pressure-sensitive cone and goes straight to the apex.
  if ((P * mt).norm() <= dev_floor) {
    if (dp && y.eta > 0.0) return apex_return(sigma_trial, y, D);
    throw SolverError("stress return: trial deviator vanishes but the state "
                      "is above yield; no return direction exists");
  }

  // Explicit predictor: one linearized step along the trial gradient.
  const Vec6 n0 = grad(mt);
  double dgamma = phi_trial / n0.dot(Dh * n0);
  Vec6 m = mt - dgamma * (Dh * n0);

  ReturnMapResult res;
  res.plastic = true;

  for (int iter = 1; iter <= 50; ++iter) {
    res.newton_iterations = iter;
    if ((P * m).norm() <= dev_floor) {
      if (dp && y.eta > 0.0) return apex_return(sigma_trial, y, D);
      throw SolverError("stress return: iterate collapsed onto the "
                        "hydrostatic axis");
    }

    const Vec7 r = residual(m, dgamma);
    if (r.head<6>().norm() <= tol_r && std::abs(r(6)) <= tol_phi) break;

    Mat7 J = Mat7::Zero();
    const Vec6 n = grad(m);
    J.topLeftCorner<6, 6>() = Mat6::Identity() + dgamma * (Dh * grad_jac(m));
    J.topRightCorner<6, 1>() = Dh * n;
    J.bottomLeftCorner<1, 6>() = n.transpose();
    const Vec7 dx = J.fullPivLu().solve(-r);

    // Backtracking line search on the residual norm.
    const double r0 = r.norm();
    double lam = 1.0;
    bool accepted = false;
    while (lam >= std::ldexp(1.0, -30)) {
      const Vec6 m_new = m + lam * dx.head<6>();
      const double dg_new = dgamma + lam * dx(6);
      if ((P * m_new).norm() <= dev_floor) {
        if (dp && y.eta > 0.0) return apex_return(sigma_trial, y, D);
        lam *= 0.5;
        continue;
      }
      if (residual(m_new, dg_new).norm() <= (1.0 - 1e-4 * lam) * r0) {
        m = m_new;
        dgamma = dg_new;
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) {
      // Stalled at round-off: accept if already inside the tolerance band.
      if (r.head<6>().norm() <= bail_r && std::abs(r(6)) <= bail_phi) break;
      if (dp && y.eta > 0.0) return apex_return(sigma_trial, y, D);
      throw SolverError("stress return: Newton line search stalled at "
                        "residual " + std::to_string(r0) + " after " +
                        std::to_string(iter) + " iterations");
    }
    if (iter == 50) {
      const Vec7 r_f = residual(m, dgamma);
      if (!(r_f.head<6>().norm() <= bail_r && std::abs(r_f(6)) <= bail_phi)) {
        throw SolverError("stress return: Newton did not converge in 50 "
                          "iterations (residual " + std::to_string(r_f.norm()) +
                          ")");
      }
    }
  }

  if (!(dgamma > 0.0)) {
    throw SolverError("stress return: converged to a non-positive plastic "
                      "multiplier " + std::to_string(dgamma));
  }

  res.gamma_inc = dgamma;
  res.d_eps_p = dgamma * flow_direction(y, from_mandel(m));
  res.sigma = sigma_trial - D.apply(res.d_eps_p);
  return res;
}

} // namespace

ReturnMapResult return_map(const Mat3& sigma_trial, const YieldModel& y,
                           const ElasticityTensor& D) {
  if (!(y.sigma_y > 0.0)) {
    throw ConfigError("yield: sigma_y must be > 0");
  }
  const double phi_t = yield_value(y, sigma_trial);

  ReturnMapResult res;
  if (phi_t <= 0.0) {
    res.sigma = sigma_trial;  // elastic: exact pass-through
    return res;
  }

  if (y.kind == YieldKind::VonMises && D.is_isotropic()) {
    // Radial return: the deviator direction is preserved, so
    // Phi(sigma) = Phi(trial) - 3 G dgamma = 0 gives dgamma in closed form.
    const Mat3 s = deviator(sigma_trial);
    const double nd = frobenius_norm(s);
    const double G = D.shear_modulus();
    const double dg = phi_t / (3.0 * G);
    res.d_eps_p = (dg * std::sqrt(1.5) / nd) * s;
    res.sigma = sigma_trial - D.apply(res.d_eps_p);
    res.gamma_inc = dg;
    res.plastic = true;
  } else if (y.kind == YieldKind::DruckerPrager && D.is_isotropic()) {
    // Analytic apex test: the smooth return shrinks the deviator by
    // sqrt(2) G dgamma; if that exhausts it, the state lands on the tip.
    if (!(y.eta >= 0.0)) throw ConfigError("yield: eta must be >= 0");
    const double G = D.shear_modulus();
    const double Kb = D.bulk_modulus();
    const double dg_smooth = phi_t / (G + Kb * y.eta * y.eta);
    const double nd = frobenius_norm(deviator(sigma_trial));
    if (y.eta > 0.0 && nd - std::sqrt(2.0) * G * dg_smooth <= 0.0) {
      res = apex_return(sigma_trial, y, D);
    } else {
      res = newton_return(sigma_trial, y, D, phi_t);
    }
  } else {
    res = newton_return(sigma_trial, y, D, phi_t);
  }

  const double phi_back = yield_value(y, res.sigma);
  if (std::abs(phi_back) > 1e-10 * y.sigma_y) {
    throw SolverError("stress return: returned state misses the yield "
                      "surface, Phi = " + std::to_string(phi_back));
  }
  return res;
}

} // namespace porofss
