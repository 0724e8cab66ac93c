#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "tpair/weierstrass.hpp"

using namespace tpair;
using C = std::complex<double>;

namespace {
constexpr double kPi = std::numbers::pi;

// Row-by-row lattice sum: each horizontal row of 1/(z - w)^2 - 1/w^2 sums in
// closed form to (pi/Lx)^2 csc^2, and the rows decay like exp(-2 pi |n| Ly/Lx).
C row_sum_oracle(C z, double lx, double ly) {
  const double k = kPi / lx;
  auto csc2 = [](C x) {
    const C s = std::sin(x);
    return 1.0 / (s * s);
  };
  C out = k * k * csc2(k * z) - k * k / 3.0;
  for (int n = 1; n <= 40; ++n)
    for (int sgn : {-1, 1}) {
      const C shift(0.0, sgn * n * ly);
      out += k * k * (csc2(k * (z - shift)) - csc2(-k * shift));
    }
  return out;
}
}  // namespace

TEST_CASE("agrees with the row-summed lattice series") {
  for (auto [lx, ly] : {std::pair{1.0, 1.0}, std::pair{1.0, 0.6}, std::pair{2.0, 1.3}}) {
    const WeierstrassP wp(lx, ly);
    double worst = 0.0;
    for (int a = 0; a < 11; ++a)
      for (int b = 0; b < 11; ++b) {
        const C z(lx * (a + 0.37) / 11.0 - 0.5 * lx, ly * (b + 0.61) / 11.0 - 0.5 * ly);
        const C want = row_sum_oracle(z, lx, ly);
        worst = std::max(worst, std::abs(wp(z) - want) / std::abs(want));
      }
    CHECK(worst < 1e-11);
  }
}

TEST_CASE("double periodicity and evenness") {
  const WeierstrassP wp(1.0, 0.8);
  const C z(0.123, -0.311);
  const C base = wp(z);
  for (auto w : {C(1.0, 0.0), C(0.0, 0.8), C(-3.0, 1.6)}) CHECK(std::abs(wp(z + w) - base) < 1e-10 * std::abs(base));
  CHECK(std::abs(wp(-z) - base) < 1e-12 * std::abs(base));
  CHECK(std::abs(wp(std::conj(z)) - std::conj(base)) < 1e-12 * std::abs(base));
}

TEST_CASE("Laurent expansion at the origin has no constant term") {
  const WeierstrassP wp(1.0, 1.0);
  for (double r : {1e-2, 1e-3, 1e-4}) {
    const C z = std::polar(r, 0.7);
    CHECK(std::abs(wp.regular_part(z)) < 200.0 * r * r);
  }
  // the square lattice is invariant under z -> iz, so p(iz) = -p(z)
  const C z(0.13, 0.05);
  CHECK(std::abs(wp.regular_part(C(0.0, 1.0) * z) + wp.regular_part(z)) < 1e-12);
  CHECK(wp.regular_part(C(1e-2, 0.0)).real() > 0.0);
}

TEST_CASE("half-period values sum to zero") {
  for (auto [lx, ly] : {std::pair{1.0, 1.0}, std::pair{1.0, 0.5}, std::pair{1.7, 2.3}}) {
    const WeierstrassP wp(lx, ly);
    const C s = wp.e1() + wp.e2() + wp.e3();
    CHECK(std::abs(s) < 1e-10 * std::abs(wp.e1()));
    CHECK(std::abs(wp.e1().imag()) < 1e-10 * std::abs(wp.e1()));
  }
  // square lattice: e2 = 0 and e3 = -e1
  const WeierstrassP sq(1.0, 1.0);
  CHECK(std::abs(sq.e2()) < 1e-10);
  CHECK(std::abs(sq.e3() + sq.e1()) < 1e-10);
}

TEST_CASE("differential equation p'^2 = 4p^3 - g2 p - g3") {
  const WeierstrassP wp(1.0, 0.7);
  const C e1 = wp.e1(), e2 = wp.e2(), e3 = wp.e3();
  for (auto z : {C(0.21, 0.05), C(-0.33, 0.29), C(0.4, -0.1)}) {
    const double h = 1e-3;
    const C d = (-wp(z + 2 * h) + 8.0 * wp(z + h) - 8.0 * wp(z - h) + wp(z - 2 * h)) / (12 * h);
    const C rhs = 4.0 * (wp(z) - e1) * (wp(z) - e2) * (wp(z) - e3);
    CHECK(std::abs(d * d - rhs) < 1e-7 * std::abs(rhs));
  }
}
