#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace porofss {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Component order for all 6-vectors: 11, 22, 33, 23, 13, 12.

inline Vec6 stress_to_voigt(const Mat3& s) {
  Vec6 v;
  v << s(0, 0), s(1, 1), s(2, 2), s(1, 2), s(0, 2), s(0, 1);
  return v;
}

inline Mat3 stress_from_voigt(const Vec6& v) {
  Mat3 s;
  s << v(0), v(5), v(4),
       v(5), v(1), v(3),
       v(4), v(3), v(2);
  return s;
}

// Strain 6-vectors carry doubled (engineering) shear so that
// strain_voigt . stress_voigt == full double contraction.
inline Vec6 strain_to_voigt(const Mat3& e) {
  Vec6 v;
  v << e(0, 0), e(1, 1), e(2, 2), 2.0 * e(1, 2), 2.0 * e(0, 2), 2.0 * e(0, 1);
  return v;
}

inline Mat3 strain_from_voigt(const Vec6& v) {
  Mat3 e;
  e << v(0), 0.5 * v(5), 0.5 * v(4),
       0.5 * v(5), v(1), 0.5 * v(3),
       0.5 * v(4), 0.5 * v(3), v(2);
  return e;
}

// Mandel 6-vectors scale shear entries by sqrt(2); the Euclidean inner
// product of two Mandel vectors then equals the tensor double contraction,
// for stress-like and strain-like tensors alike.
inline Vec6 to_mandel(const Mat3& t) {
  const double r = std::sqrt(2.0);
  Vec6 v;
  v << t(0, 0), t(1, 1), t(2, 2), r * t(1, 2), r * t(0, 2), r * t(0, 1);
  return v;
}

inline Mat3 from_mandel(const Vec6& v) {
  const double r = 1.0 / std::sqrt(2.0);
  Mat3 t;
  t << v(0), r * v(5), r * v(4),
       r * v(5), v(1), r * v(3),
       r * v(4), r * v(3), v(2);
  return t;
}

inline double ddot(const Mat3& a, const Mat3& b) {
  return a.cwiseProduct(b).sum();
}

inline Mat3 deviator(const Mat3& a) {
  return a - (a.trace() / 3.0) * Mat3::Identity();
}

inline double frobenius_norm(const Mat3& a) {
  return std::sqrt(ddot(a, a));
}

inline Mat3 symmetrize(const Mat3& a) {
  return 0.5 * (a + a.transpose());
}

} // namespace porofss
