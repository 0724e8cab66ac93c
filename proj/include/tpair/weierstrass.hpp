#pragma once

// Weierstrass elliptic function for the rectangular lattice generated by
// Lx and i Ly, evaluated from its q-series after reduction to the centered
// period cell.

#include <complex>

namespace tpair {

class WeierstrassP {
 public:
  WeierstrassP(double lx, double ly);

  std::complex<double> operator()(std::complex<double> z) const;
  /// p(z) - 1/z^2 for z in the centered cell around a lattice point; regular at 0.
  std::complex<double> regular_part(std::complex<double> z) const;
  /// z reduced to the centered cell [-Lx/2, Lx/2) x [-Ly/2, Ly/2).
  std::complex<double> reduce(std::complex<double> z) const;

  /// Half-period values e1 = p(Lx/2), e2 = p(Lx/2 + i Ly/2), e3 = p(i Ly/2).
  std::complex<double> e1() const;
  std::complex<double> e2() const;
  std::complex<double> e3() const;

 private:
  double lx_, ly_;
  double omega1_;      // Lx / 2
  double q_;           // exp(-pi Ly / Lx), the nome for tau = i Ly / Lx
  double eta1_over_omega1_;
  int terms_;
};

}  // namespace tpair
