#include "tpair/weierstrass.hpp"

#include <cmath>
#include <numbers>

#include "tpair/error.hpp"

namespace tpair {

namespace {
constexpr double kPi = std::numbers::pi;
using C = std::complex<double>;

// csc^2(x) - 1/x^2, by its Taylor series near 0.
C csc2_minus_pole(C x) {
  if (std::abs(x) < 0.1) {
    const C x2 = x * x;
    return 1.0 / 3.0 + x2 * (1.0 / 15.0 + x2 * (2.0 / 189.0 + x2 * (1.0 / 675.0 + x2 * (2.0 / 10395.0))));
  }
  const C s = std::sin(x);
  return 1.0 / (s * s) - 1.0 / (x * x);
}
}  // namespace

WeierstrassP::WeierstrassP(double lx, double ly) : lx_(lx), ly_(ly), omega1_(0.5 * lx), q_(std::exp(-kPi * ly / lx)) {
  if (!(lx > 0.0 && ly > 0.0)) throw Error(ErrorCode::invalid_argument, "lattice periods must be positive");
  // q^{2n} e^{n pi Ly / Lx} bounds the terms on the centered cell.
  const double decay = std::exp(-kPi * ly / lx);
  terms_ = static_cast<int>(std::ceil(40.0 / -std::log(decay))) + 2;
  double lambert = 0.0;
  for (int n = 1; n <= terms_; ++n) {
    const double q2n = std::pow(q_, 2 * n);
    lambert += n * q2n / (1.0 - q2n);
  }
  eta1_over_omega1_ = kPi * kPi / (12.0 * omega1_ * omega1_) * (1.0 - 24.0 * lambert);
}

C WeierstrassP::reduce(C z) const {
  return {z.real() - lx_ * std::round(z.real() / lx_), z.imag() - ly_ * std::round(z.imag() / ly_)};
}

C WeierstrassP::regular_part(C z) const {
  const double k = kPi / (2.0 * omega1_);
  C sum = 0.0;
  for (int n = 1; n <= terms_; ++n) {
    const double q2n = std::pow(q_, 2 * n);
    sum += n * q2n / (1.0 - q2n) * std::cos(n * kPi * z / omega1_);
  }
  return -eta1_over_omega1_ + k * k * csc2_minus_pole(k * z) - 2.0 * std::pow(kPi / omega1_, 2) * sum;
}

C WeierstrassP::operator()(C z) const {
  const C w = reduce(z);
  return 1.0 / (w * w) + regular_part(w);
}

C WeierstrassP::e1() const { return (*this)(C(omega1_, 0.0)); }

C WeierstrassP::e2() const { return (*this)(C(omega1_, 0.5 * ly_)); }

C WeierstrassP::e3() const { return (*this)(C(0.0, 0.5 * ly_)); }

}  // namespace tpair
