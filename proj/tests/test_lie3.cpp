#include <doctest.h>

#include <numbers>
#include <vector>

#include "support.hpp"
#include "tpair/error.hpp"
#include "tpair/lie3.hpp"

using namespace tpair;
using namespace tpair::testing;

namespace {
const Vec3 e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);

Mat3 exp_series(const Mat3& a) {
  Mat3 term = Mat3::Identity(), sum = Mat3::Identity();
  for (int k = 1; k < 30; ++k) {
    term = term * a / k;
    sum += term;
  }
  return sum;
}
}  // namespace

TEST_CASE("hat matches the cross product") {
  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  CHECK((hat(e3) - expected).norm() == 0.0);
  CHECK(hat(Vec3::Zero()).norm() == 0.0);
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const Vec3 v = random_vec(rng), w = random_vec(rng);
    CHECK((hat(v) * w - v.cross(w)).norm() < 1e-15);
    CHECK((vee(hat(v)) - v).norm() == 0.0);
  }
  const Vec3 basis[3] = {e1, e2, e3};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK((bracket(hat(basis[i]), hat(basis[j])) - hat(basis[i].cross(basis[j]))).norm() < 1e-15);
}

TEST_CASE("so(3) bracket identities on random triples") {
  Rng rng(2);
  double worst = 0.0, jacobi = 0.0, anti = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Mat3 a = hat(random_vec(rng)), b = hat(random_vec(rng)), c = hat(random_vec(rng));
    const Mat3 lhs = bracket(a, bracket(b, c));
    worst = std::max(worst, (lhs - b * inner(a, c) + c * inner(a, b)).norm());
    jacobi = std::max(jacobi, (lhs + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))).norm());
    anti = std::max(anti, (bracket(a, b) + bracket(b, a)).norm());
  }
  CHECK(worst <= 1e-13);
  CHECK(jacobi <= 1e-13);
  CHECK(anti == 0.0);
  const Mat3 g = hat(random_vec(rng));
  CHECK(bracket(g, g).norm() == 0.0);
}

TEST_CASE("inner product") {
  CHECK(inner(hat(e1), hat(e2)) == 0.0);
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const Vec3 v = random_vec(rng), w = random_vec(rng);
    CHECK(std::abs(inner(hat(v), hat(w)) - v.dot(w)) < 1e-15);
    CHECK(std::abs(inner(So3(v), So3(w)) - v.dot(w)) < 1e-15);
    const So3 u(v.normalized());
    CHECK(std::abs(inner(u, u) - 1.0) < 1e-15);
  }
}

TEST_CASE("unit check") {
  CHECK(unit_check(So3(e3)).unit);
  CHECK_FALSE(unit_check(So3(2.0 * e3)).unit);
  CHECK_FALSE(unit_check(So3()).unit);
  Rng rng(4);
  for (int k = 0; k < 100; ++k) CHECK(unit_check(So3(random_vec(rng).normalized())).unit);
}

TEST_CASE("ell isomorphism") {
  // (t, x, y) = (1, 0, 0) sits at entry (0,1): hat(v) with v_z = -1.
  Mat3 m = Mat3::Zero();
  m(0, 1) = 1.0;
  m(1, 0) = -1.0;
  const Su2 h = ell(So3::from_matrix(m));
  Eigen::Matrix2cd expected;
  const Complex i(0, 1);
  expected << -0.5 * i, 0, 0, 0.5 * i;
  CHECK((h.matrix() - expected).norm() < 1e-16);
  CHECK(ell(So3()).matrix().norm() == 0.0);

  Rng rng(5);
  double hom = 0.0, sq = 0.0, inv = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const So3 a(random_vec(rng)), b(random_vec(rng));
    const Eigen::Matrix2cd la = ell(a).matrix(), lb = ell(b).matrix();
    hom = std::max(hom, (ell(bracket(a, b)).matrix() - (la * lb - lb * la)).norm());
    CHECK(ell(a).constraint_residual() < 1e-15);
    const So3 u(random_vec(rng).normalized());
    const Eigen::Matrix2cd hu = 2.0 * ell(u).matrix();
    sq = std::max(sq, (hu * hu + Eigen::Matrix2cd::Identity()).norm());
    inv = std::max(inv, (ell_inverse(ell(a)).axis() - a.axis()).norm());
  }
  CHECK(hom <= 1e-13);
  CHECK(sq <= 1e-13);
  CHECK(inv <= 1e-15);
}

TEST_CASE("so3_exp") {
  Rng rng(6);
  CHECK((so3_exp(So3(random_vec(rng)), 0.0).matrix() - Mat3::Identity()).norm() == 0.0);
  for (int k = 0; k < 50; ++k) {
    const So3 n(random_vec(rng).normalized());
    CHECK((so3_exp(n, 2.0 * std::numbers::pi).matrix() - Mat3::Identity()).norm() < 1e-14);
    const So3 g(random_vec(rng));
    const double t = uniform(rng, -2, 2), s = uniform(rng, -2, 2);
    CHECK((so3_exp(g, t).matrix() - exp_series(t * g.matrix())).norm() <= 1e-12);
    CHECK((so3_exp(g, t + s).matrix() - (so3_exp(g, t) * so3_exp(g, s)).matrix()).norm() <= 1e-12);
    const So3 small(1e-6 * random_vec(rng));
    CHECK((so3_exp(small).matrix() - exp_series(small.matrix())).norm() <= 1e-15);
  }
  double drift = 0.0;
  for (int k = 0; k < 200; ++k) {
    const So3 g(random_vec(rng).normalized());
    drift = std::max(drift, so3_exp(g, uniform(rng, -100, 100)).drift());
  }
  CHECK(drift <= 1e-12);
}

TEST_CASE("su2 path lift parity") {
  std::vector<Rot3> constant(32);
  CHECK(su2_path_lift(constant) == 1);

  const Mat3 g = hat(Vec3(1, 2, -1).normalized());
  auto loop = [&](int n, int turns) {
    std::vector<Rot3> out;
    for (int k = 0; k < n * turns; ++k) {
      const double th = 2.0 * std::numbers::pi * k / n;
      out.emplace_back(Mat3::Identity() + g * g + std::sin(th) * g - std::cos(th) * g * g);
    }
    return out;
  };
  CHECK(su2_path_lift(loop(64, 1)) == -1);
  CHECK(su2_path_lift(loop(64, 2)) == 1);
  CHECK(su2_path_lift(loop(64, 3)) == -1);
  CHECK_THROWS_AS(su2_path_lift(loop(4, 1)), Error);
}
