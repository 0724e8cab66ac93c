#include "tpair/lie3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "tpair/error.hpp"

namespace tpair {

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  return Vec3(0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1)));
}

So3 bracket(const So3& g, const So3& h) { return So3(g.axis().cross(h.axis())); }

Mat3 bracket(const Mat3& g, const Mat3& h) { return g * h - h * g; }

Mat3C bracket(const Mat3C& g, const Mat3C& h) { return g * h - h * g; }

double inner(const So3& g, const So3& h) { return g.axis().dot(h.axis()); }

double inner(const Mat3& g, const Mat3& h) { return 0.5 * (g * h.transpose()).trace(); }

UnitCheck unit_check(const So3& g, double tol) {
  const Mat3 m = g.matrix();
  const double residual = (m * m * m + m).norm();
  return {residual <= tol && m.norm() > tol, residual};
}

double Su2::constraint_residual() const {
  return std::max((h_ + h_.adjoint()).norm(), std::abs(h_.trace()));
}

// Matrix entries (t, x, y) sit at (0,1), (0,2), (1,2).  With hat(v):
// t = -v_z, x = v_y, y = -v_x.
Su2 ell(const So3& g) {
  const Vec3& v = g.axis();
  const double t = -v.z();
  const double x = v.y();
  const double y = -v.x();
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd h;
  h << -i * t, -x - i * y,
       x - i * y, i * t;
  return Su2(0.5 * h);
}

So3 ell_inverse(const Su2& h) {
  const Eigen::Matrix2cd& m = h.matrix();
  const double t = -2.0 * m(0, 0).imag();
  const double x = 2.0 * m(1, 0).real();
  const double y = -2.0 * m(1, 0).imag();
  return So3(Vec3(-y, x, -t));
}

double Rot3::drift() const {
  return std::max((r_.transpose() * r_ - Mat3::Identity()).norm(), std::abs(r_.determinant() - 1.0));
}

double Rot3::angle() const {
  const double c = std::clamp(0.5 * (r_.trace() - 1.0), -1.0, 1.0);
  return std::acos(c);
}

Rot3 so3_exp(const So3& g, double t) {
  const Vec3 w = t * g.axis();
  const double angle = w.norm();
  const Mat3 k = hat(w);
  double s, c;
  if (angle < 1e-4) {
    // sin(a)/a and (1-cos a)/a^2 by their Taylor series
    const double a2 = angle * angle;
    s = 1.0 - a2 / 6.0 * (1.0 - a2 / 20.0);
    c = 0.5 * (1.0 - a2 / 12.0 * (1.0 - a2 / 30.0));
  } else {
    s = std::sin(angle) / angle;
    c = (1.0 - std::cos(angle)) / (angle * angle);
  }
  return Rot3(Mat3::Identity() + s * k + c * k * k);
}

Rot3 project_to_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return Rot3(u * v.transpose());
}

int su2_path_lift(std::span<const Rot3> loop) {
  if (loop.empty()) return 1;
  constexpr double kMaxStep = std::numbers::pi / 4.0;
  auto to_quat = [](const Rot3& r) {
    Eigen::Quaterniond q(r.matrix());
    return q.normalized();
  };
  const Eigen::Quaterniond start = to_quat(loop[0]);
  Eigen::Quaterniond current = start;
  auto advance = [&](const Rot3& next_rot) {
    Eigen::Quaterniond next = to_quat(next_rot);
    double d = current.dot(next);
    if (d < 0.0) {
      next.coeffs() *= -1.0;
      d = -d;
    }
    // relative rotation angle between the two samples
    const double step = 2.0 * std::acos(std::min(1.0, d));
    if (step >= kMaxStep) {
      throw Error(ErrorCode::sampling_too_coarse,
                  "consecutive loop samples differ by " + std::to_string(step) + " rad");
    }
    current = next;
  };
  for (std::size_t k = 1; k < loop.size(); ++k) advance(loop[k]);
  advance(loop[0]);
  return current.dot(start) > 0.0 ? 1 : -1;
}

}  // namespace tpair
