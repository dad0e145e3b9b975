#ifndef TWOAXIS__ROTATIONS_HPP_
#define TWOAXIS__ROTATIONS_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <tuple>

/**
 * @file rotations.hpp
 * @brief Quaternion / SO(3) algebra for the two-axis planner.
 *
 * Conventions
 * -----------
 * A quaternion a i + b j + c k + d is stored in an Eigen::Quaternion whose
 * coefficient vector is (x, y, z, w) = (a, b, c, d), i.e. scalar last.
 *
 * The Lie algebra su(2) = span{i, j, k} is identified with R^3 through
 * i -> e1, j -> e2, k -> e3. With this identification
 *
 *   su2_to_so3(quat_exp(v)) == rot_axis_angle(2 |v|, v / |v|),
 *
 * so a rotation by angle t about a unit axis u lifts to quat_exp((t/2) u).
 */

namespace twoaxis {

template<typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template<typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3, Eigen::RowMajor>;

template<typename Scalar>
using Quat = Eigen::Quaternion<Scalar, Eigen::DontAlign>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;
using Quatd = Quat<double>;

/// Chained products renormalize after this many multiplications.
inline constexpr int kRenormalizeEvery = 64;

/// The quaternion a i + b j + c k + d.
template<typename Scalar>
Quat<Scalar> make_quat(Scalar a, Scalar b, Scalar c, Scalar d)
{
  return Quat<Scalar>(d, a, b, c);
}

/// Hamilton product with i^2 = j^2 = k^2 = ijk = -1.
template<typename Scalar>
Quat<Scalar> quat_mul(const Quat<Scalar> & p, const Quat<Scalar> & q)
{
  const Scalar a = p.w() * q.x() + p.x() * q.w() + p.y() * q.z() - p.z() * q.y();
  const Scalar b = p.w() * q.y() - p.x() * q.z() + p.y() * q.w() + p.z() * q.x();
  const Scalar c = p.w() * q.z() + p.x() * q.y() - p.y() * q.x() + p.z() * q.w();
  const Scalar d = p.w() * q.w() - p.x() * q.x() - p.y() * q.y() - p.z() * q.z();
  return make_quat(a, b, c, d);
}

template<typename Scalar>
Quat<Scalar> quat_conj(const Quat<Scalar> & q)
{
  return make_quat<Scalar>(-q.x(), -q.y(), -q.z(), q.w());
}

template<typename Scalar>
Quat<Scalar> quat_neg(const Quat<Scalar> & q)
{
  return make_quat<Scalar>(-q.x(), -q.y(), -q.z(), -q.w());
}

/// cos|v| + (v/|v|) sin|v|, with exp(0) = 1.
template<typename Scalar>
Quat<Scalar> quat_exp(const Vec3<Scalar> & v)
{
  const Scalar n = v.norm();
  if (n == Scalar(0)) { return Quat<Scalar>::Identity(); }
  const Scalar s = std::sin(n) / n;
  return make_quat<Scalar>(s * v.x(), s * v.y(), s * v.z(), std::cos(n));
}

/// Ordered product q[0] q[1] ... q[n-1], renormalized every kRenormalizeEvery factors.
template<typename Scalar>
Quat<Scalar> quat_product(std::span<const Quat<Scalar>> factors)
{
  Quat<Scalar> acc = Quat<Scalar>::Identity();
  int count        = 0;
  for (const auto & f : factors) {
    acc = quat_mul(acc, f);
    if (++count % kRenormalizeEvery == 0) { acc.normalize(); }
  }
  return acc;
}

/// Skew matrix with ad(v) w = v x w.
template<typename Scalar>
Mat3<Scalar> ad_matrix(const Vec3<Scalar> & v)
{
  Mat3<Scalar> m;
  // clang-format off
  m << Scalar(0), -v.z(),     v.y(),
       v.z(),     Scalar(0), -v.x(),
      -v.y(),     v.x(),      Scalar(0);
  // clang-format on
  return m;
}

/**
 * @brief Rotation by angle t about axis, counterclockwise seen from the tip of axis.
 *
 * Rodrigues form cos(t) I + sin(t) ad(X) + (1 - cos(t)) X X^T. A non-unit axis
 * is rescaled first: R(tX) = R(t|X| X/|X|).
 */
template<typename Scalar>
Mat3<Scalar> rot_axis_angle(Scalar t, const Vec3<Scalar> & axis)
{
  const Scalar n = axis.norm();
  if (n == Scalar(0)) {
    if (t == Scalar(0)) { return Mat3<Scalar>::Identity(); }
    throw std::invalid_argument("undefined rotation axis");
  }
  const Scalar tt       = t * n;
  const Vec3<Scalar> u  = axis / n;
  const Scalar c        = std::cos(tt);
  const Mat3<Scalar> xx = u * u.transpose();
  return c * Mat3<Scalar>::Identity() + std::sin(tt) * ad_matrix(u) + (Scalar(1) - c) * xx;
}

/**
 * @brief Covering map SU(2) -> SO(3): the action v -> q v conj(q) on pure quaternions.
 *
 * Throws std::invalid_argument if |q| is not 1 within 1e-9.
 */
template<typename Scalar>
Mat3<Scalar> su2_to_so3(const Quat<Scalar> & q)
{
  if (std::abs(q.norm() - Scalar(1)) > Scalar(1e-9)) {
    throw std::invalid_argument("quaternion not normalized");
  }
  const Scalar a = q.x(), b = q.y(), c = q.z(), d = q.w();
  Mat3<Scalar> m;
  // clang-format off
  m << d*d + a*a - b*b - c*c, Scalar(2)*(a*b - c*d),   Scalar(2)*(a*c + b*d),
       Scalar(2)*(a*b + c*d), d*d - a*a + b*b - c*c,   Scalar(2)*(b*c - a*d),
       Scalar(2)*(a*c - b*d), Scalar(2)*(b*c + a*d),   d*d - a*a - b*b + c*c;
  // clang-format on
  return m;
}

/// The image of q is a rotation by pi iff the scalar coefficient vanishes.
template<typename Scalar>
bool is_pi_rotation(const Quat<Scalar> & q, Scalar tol)
{
  return std::abs(q.w()) <= tol;
}

/// min(|p - q|, |p + q|): zero iff p and q cover the same rotation.
template<typename Scalar>
Scalar quat_distance(const Quat<Scalar> & p, const Quat<Scalar> & q)
{
  const Scalar minus = (p.coeffs() - q.coeffs()).norm();
  const Scalar plus  = (p.coeffs() + q.coeffs()).norm();
  return std::min(minus, plus);
}

template<typename Scalar>
struct FlipResult
{
  Scalar s1;
  Scalar s3;
  Scalar psi;
};

/**
 * @brief Rewrites exp(s1 X) exp(s2 Y) exp(s3 X) as exp(s1' X) exp(-s2 Y) exp(s3' X).
 *
 * With tan(psi) = cos(alpha) tan(s2), psi in (-pi/2, pi/2], the new exponents are
 * s1' = s1 + psi - pi/2 and s3' = s3 + psi + pi/2. When s2 = pi/2 (mod pi) psi is
 * taken as pi/2. X and Y are unit vectors of su(2) at angle alpha.
 */
template<typename Scalar>
FlipResult<Scalar> flip_word(Scalar s1, Scalar s2, Scalar s3, const Vec3<Scalar> & X, const Vec3<Scalar> & Y)
{
  constexpr Scalar half_pi = std::numbers::pi_v<Scalar> / 2;
  const Scalar c           = X.dot(Y);
  const Scalar cs          = std::cos(s2);
  Scalar psi;
  if (std::abs(cs) < Scalar(1e-15)) {
    psi = half_pi;
  } else {
    psi = std::atan(c * std::tan(s2));
    if (psi <= -half_pi) { psi += std::numbers::pi_v<Scalar>; }
  }
  return {s1 + psi - half_pi, s3 + psi + half_pi, psi};
}

}  // namespace twoaxis

#endif  // TWOAXIS__ROTATIONS_HPP_
