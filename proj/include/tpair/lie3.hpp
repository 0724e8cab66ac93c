#pragma once

// Small-matrix algebra for so(3), su(2), SO(3) and complex 3x3 matrices.
//
// The identification so(3) ~ R^3 is fixed once here: hat(v) w = v x w.
// Everything in the library that converts between axis vectors and
// antisymmetric matrices goes through hat()/vee().

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace tpair {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat3C = Eigen::Matrix3cd;

inline constexpr double kAlgebraTol = 1e-13;
inline constexpr double kGroupTol = 1e-12;

Mat3 hat(const Vec3& v);
/// Axis of the antisymmetric part of m.
Vec3 vee(const Mat3& m);

/// Element of so(3), stored by its axis vector.
class So3 {
 public:
  So3() : axis_(Vec3::Zero()) {}
  explicit So3(const Vec3& axis) : axis_(axis) {}

  /// Takes the antisymmetric part of m.
  static So3 from_matrix(const Mat3& m) { return So3(vee(m)); }

  const Vec3& axis() const { return axis_; }
  Mat3 matrix() const { return hat(axis_); }
  Mat3C complex_matrix() const { return hat(axis_).cast<Complex>(); }

  /// Frobenius norm divided by sqrt(2); equals |axis|.
  double norm() const { return axis_.norm(); }

  So3 operator+(const So3& o) const { return So3(axis_ + o.axis_); }
  So3 operator-(const So3& o) const { return So3(axis_ - o.axis_); }
  So3 operator-() const { return So3(-axis_); }
  So3 operator*(double s) const { return So3(s * axis_); }
  friend So3 operator*(double s, const So3& g) { return g * s; }

 private:
  Vec3 axis_;
};

So3 bracket(const So3& g, const So3& h);
Mat3 bracket(const Mat3& g, const Mat3& h);
Mat3C bracket(const Mat3C& g, const Mat3C& h);

/// <g,h> = trace(g h^t)/2.
double inner(const So3& g, const So3& h);
double inner(const Mat3& g, const Mat3& h);

struct UnitCheck {
  bool unit;
  /// Frobenius norm of g^3 + g.
  double residual;
};

/// g is a unit element iff g^3 + g = 0 and g != 0.
UnitCheck unit_check(const So3& g, double tol = kGroupTol);

/// Traceless anti-Hermitian 2x2 matrix.
class Su2 {
 public:
  Su2() : h_(Eigen::Matrix2cd::Zero()) {}
  explicit Su2(const Eigen::Matrix2cd& h) : h_(h) {}

  const Eigen::Matrix2cd& matrix() const { return h_; }
  /// max(|h + h^*|, |trace h|)
  double constraint_residual() const;

 private:
  Eigen::Matrix2cd h_;
};

/// The isomorphism so(3) -> su(2):
///   [[0,t,x],[-t,0,y],[-x,-y,0]] -> (1/2)[[-it, -x-iy],[x-iy, it]].
Su2 ell(const So3& g);
So3 ell_inverse(const Su2& h);

/// Rotation matrix (orthogonal, det +1).
class Rot3 {
 public:
  Rot3() : r_(Mat3::Identity()) {}
  explicit Rot3(const Mat3& r) : r_(r) {}

  const Mat3& matrix() const { return r_; }
  Rot3 inverse() const { return Rot3(r_.transpose()); }
  Rot3 operator*(const Rot3& o) const { return Rot3(r_ * o.r_); }

  /// max(|R^t R - Id|, |det R - 1|)
  double drift() const;
  /// Rotation angle in [0, pi].
  double angle() const;

 private:
  Mat3 r_;
};

/// exp(t g) by the Rodrigues formula.
Rot3 so3_exp(const So3& g, double t = 1.0);

/// Nearest rotation to m (polar factor).
Rot3 project_to_rotation(const Mat3& m);

/// Lifts a sampled loop in SO(3) to SU(2) step by step and reports whether
/// the lift closes (+1) or ends at -Id (-1).  The loop is closed implicitly:
/// the last sample is joined back to the first.  Consecutive samples must be
/// closer than pi/4 in rotation angle.
int su2_path_lift(std::span<const Rot3> loop);

}  // namespace tpair
