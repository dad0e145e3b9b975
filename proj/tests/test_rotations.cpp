#include <doctest.h>

#include <random>

#include "twoaxis/rotations.hpp"

using namespace twoaxis;

namespace {

constexpr double kPi = std::numbers::pi;

Quatd random_unit(std::mt19937_64 & rng)
{
  std::normal_distribution<double> n;
  Quatd q = make_quat(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

Vec3d random_vec(std::mt19937_64 & rng, double scale = 1)
{
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("quaternion product follows i j = k")
{
  const Quatd i = make_quat(1.0, 0.0, 0.0, 0.0);
  const Quatd j = make_quat(0.0, 1.0, 0.0, 0.0);
  const Quatd k = quat_mul(i, j);
  CHECK(k.coeffs().isApprox(make_quat(0.0, 0.0, 1.0, 0.0).coeffs()));
  CHECK(quat_mul(i, i).w() == doctest::Approx(-1));
  CHECK(quat_mul(j, i).z() == doctest::Approx(-1));

  std::mt19937_64 rng(1);
  const Quatd q   = random_unit(rng);
  const Quatd one = Quatd(Quatd::Identity());
  CHECK((quat_mul(q, one).coeffs() - q.coeffs()).norm() < 1e-15);
  CHECK((quat_mul(quat_conj(q), q).coeffs() - one.coeffs()).norm() < 1e-12);
}

TEST_CASE("squaring exp of a quarter turn about i gives i")
{
  const Quatd e = quat_exp<double>(Vec3d(kPi / 4, 0, 0));
  const Quatd sq = quat_mul(e, e);
  CHECK(std::abs(sq.x() - 1) < 1e-15);
  CHECK(std::abs(sq.w()) < 1e-15);
}

TEST_CASE("quat_exp values")
{
  CHECK(quat_exp<double>(Vec3d::Zero()).w() == 1);
  const Quatd i = quat_exp<double>(Vec3d(kPi / 2, 0, 0));
  CHECK(std::abs(i.x() - 1) < 1e-15);
  CHECK(std::abs(i.w()) < 1e-15);
  const Quatd h = quat_exp<double>(Vec3d(kPi / 4, 0, 0));
  CHECK(h.w() == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  CHECK(h.x() == doctest::Approx(0.7071067811865476).epsilon(1e-15));
}

TEST_CASE("rot_axis_angle known matrices")
{
  const Mat3d q = rot_axis_angle(kPi / 2, Vec3d(1, 0, 0));
  Mat3d expect;
  expect << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK((q - expect).cwiseAbs().maxCoeff() < 1e-15);

  CHECK((rot_axis_angle(0.0, Vec3d(0.3, -1, 2)) - Mat3d::Identity()).cwiseAbs().maxCoeff() == 0);

  Mat3d cyc;
  cyc << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  CHECK((rot_axis_angle(2 * kPi / 3, Vec3d(1, 1, 1).normalized()) - cyc).cwiseAbs().maxCoeff() < 1e-15);

  // non-unit axis rescales the angle
  CHECK((rot_axis_angle(0.25, Vec3d(2, 0, 0)) - rot_axis_angle(0.5, Vec3d(1, 0, 0))).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_WITH(rot_axis_angle(0.3, Vec3d(Vec3d::Zero())), "undefined rotation axis");
}

TEST_CASE("ad_matrix is the cross product")
{
  CHECK((ad_matrix(Vec3d(1, 0, 0)) * Vec3d(0, 1, 0) - Vec3d(0, 0, 1)).norm() == 0);
  Mat3d z;
  z << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  CHECK(ad_matrix(Vec3d(0, 0, 1)) == z);
  std::mt19937_64 rng(2);
  for (int n = 0; n < 100; ++n) {
    const Vec3d v = random_vec(rng), w = random_vec(rng);
    CHECK((ad_matrix(v) * w - v.cross(w)).norm() < 1e-15);
    CHECK((ad_matrix(v) + ad_matrix(v).transpose()).cwiseAbs().maxCoeff() == 0);
  }
}

TEST_CASE("su2_to_so3 kernel and errors")
{
  const Quatd one = Quatd(Quatd::Identity());
  CHECK((su2_to_so3(one) - Mat3d::Identity()).cwiseAbs().maxCoeff() == 0);
  CHECK((su2_to_so3(quat_neg(one)) - Mat3d::Identity()).cwiseAbs().maxCoeff() == 0);
  CHECK_THROWS_WITH(su2_to_so3(make_quat(1.0, 1.0, 0.0, 0.0)), "quaternion not normalized");

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int n = 0; n < 50; ++n) {
    const double s = u(rng);
    const Mat3d a  = su2_to_so3(quat_exp<double>(Vec3d(s, 0, 0)));
    CHECK((a - rot_axis_angle(2 * s, Vec3d(1, 0, 0))).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("covering map properties on random samples")
{
  std::mt19937_64 rng(4);
  double hom = 0, cover = 0, orth = 0;
  for (int n = 0; n < 1000; ++n) {
    const Quatd p = random_unit(rng), q = random_unit(rng);
    hom           = std::max(hom, (su2_to_so3(quat_mul(p, q)) - su2_to_so3(p) * su2_to_so3(q)).cwiseAbs().maxCoeff());
    const Vec3d v = random_vec(rng, 3);
    cover = std::max(cover, (su2_to_so3(quat_exp(v)) - rot_axis_angle(2 * v.norm(), Vec3d(v.normalized()))).cwiseAbs().maxCoeff());
    const Mat3d m = su2_to_so3(p);
    orth          = std::max(orth, (m.transpose() * m - Mat3d::Identity()).cwiseAbs().maxCoeff());
    orth          = std::max(orth, std::abs(m.determinant() - 1));
  }
  CHECK(hom < 1e-10);
  CHECK(cover < 1e-10);
  CHECK(orth < 1e-10);
}

TEST_CASE("rot_axis_angle agrees with the expanded cos/sin form")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-6, 6);
  for (int n = 0; n < 200; ++n) {
    const Vec3d x  = random_vec(rng).normalized();
    const double t = u(rng);
    const Mat3d r  = Mat3d::Identity() * std::cos(t) + std::sin(t) * ad_matrix(x) + (1 - std::cos(t)) * x * x.transpose();
    CHECK((rot_axis_angle(t, x) - r).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(rot_axis_angle(t, x).trace() == doctest::Approx(1 + 2 * std::cos(t)).epsilon(1e-12));
  }
}

TEST_CASE("pi rotation test reads the scalar part")
{
  CHECK(is_pi_rotation(make_quat(1.0, 0.0, 0.0, 0.0), 1e-12));
  CHECK_FALSE(is_pi_rotation(Quatd(Quatd::Identity()), 1e-12));

  // exp(s1 X) exp(s2 Y) with tan s1 tan s2 = 1 / cos(alpha)
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ua(0.05, kPi / 2 - 0.05), us(0.05, kPi / 2 - 0.05);
  for (int n = 0; n < 200; ++n) {
    const double alpha = ua(rng), s1 = us(rng);
    const double s2    = std::atan(1 / (std::cos(alpha) * std::tan(s1)));
    const Vec3d X(1, 0, 0), Y(std::cos(alpha), std::sin(alpha), 0);
    const Quatd lhs = quat_mul(quat_exp<double>(s1 * X), quat_exp<double>(s2 * Y));
    CHECK(is_pi_rotation(lhs, 1e-12));
    const Quatd rhs = quat_neg(quat_mul(quat_exp<double>(-s2 * Y), quat_exp<double>(-s1 * X)));
    CHECK((lhs.coeffs() - rhs.coeffs()).norm() < 1e-12);
  }
}

TEST_CASE("flip_word identity")
{
  auto residual = [](double s1, double s2, double s3, const Vec3d & X, const Vec3d & Y) {
    const auto f    = flip_word(s1, s2, s3, X, Y);
    const Quatd lhs = quat_mul(quat_mul(quat_exp<double>(s1 * X), quat_exp<double>(s2 * Y)), quat_exp<double>(s3 * X));
    const Quatd rhs =
      quat_mul(quat_mul(quat_exp<double>(f.s1 * X), quat_exp<double>(-s2 * Y)), quat_exp<double>(f.s3 * X));
    return (lhs.coeffs() - rhs.coeffs()).norm();
  };

  SUBCASE("orthogonal axes, roles exchanged")
  {
    // exp(pi/4 Y) exp(pi/4 X) exp(-pi/4 Y) = exp(-pi/4 Y) exp(-pi/4 X) exp(pi/4 Y)
    const Vec3d X(0, 1, 0), Y(1, 0, 0);
    const auto f = flip_word(kPi / 4, kPi / 4, -kPi / 4, X, Y);
    CHECK(f.psi == doctest::Approx(0).epsilon(1e-15));
    CHECK(f.s1 == doctest::Approx(-kPi / 4));
    CHECK(f.s3 == doctest::Approx(kPi / 4));
    CHECK(residual(kPi / 4, kPi / 4, -kPi / 4, X, Y) < 1e-15);
  }
  SUBCASE("vanishing middle factor")
  {
    const Vec3d X(1, 0, 0), Y(0.5, std::sqrt(0.75), 0);
    const auto f = flip_word(0.3, 0.0, 0.9, X, Y);
    CHECK(f.psi == 0);
    CHECK(f.s1 + f.s3 == doctest::Approx(1.2));
    CHECK(residual(0.3, 0.0, 0.9, X, Y) < 1e-15);
  }
  SUBCASE("random tuples")
  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.01, kPi / 2), us(-kPi, kPi);
    double worst = 0;
    for (int n = 0; n < 1000; ++n) {
      const double alpha = ua(rng);
      const Vec3d X(1, 0, 0), Y(std::cos(alpha), std::sin(alpha), 0);
      const double s1 = us(rng), s2 = us(rng), s3 = us(rng);
      worst           = std::max(worst, residual(s1, s2, s3, X, Y));
      const auto f    = flip_word(s1, s2, s3, X, Y);
      CHECK(f.psi > -kPi / 2);
      CHECK(f.psi <= kPi / 2);
    }
    CHECK(worst < 1e-11);
  }
}

TEST_CASE("quat_distance ignores the lift sign")
{
  std::mt19937_64 rng(8);
  const Quatd q = random_unit(rng);
  CHECK(quat_distance(q, q) == 0);
  CHECK(quat_distance(q, quat_neg(q)) == 0);
  CHECK(quat_distance(Quatd(Quatd::Identity()), make_quat(1.0, 0.0, 0.0, 0.0)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("chained products stay normalized")
{
  std::mt19937_64 rng(9);
  std::vector<Quatd> f;
  for (int n = 0; n < 500; ++n) { f.push_back(random_unit(rng)); }
  const Quatd p = quat_product<double>(f);
  CHECK(std::abs(p.norm() - 1) < 1e-12);
}
