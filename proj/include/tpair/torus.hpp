#pragma once

// Conformally flat 2-torus ds^2 = e^{2 lambda}(dx^2 + dy^2) with global
// isothermal coordinates, the frame {X, H, V} on the unit circle bundle, and
// the geodesic flow.

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "tpair/interp.hpp"
#include "tpair/spectral.hpp"

namespace tpair {

enum class Trig { cos, sin };

/// amplitude * trig_x(2 pi kx x / Lx) * trig_y(2 pi ky y / Ly)
struct LambdaHarmonic {
  double amplitude = 0.0;
  int kx = 0;
  int ky = 0;
  Trig x_trig = Trig::cos;
  Trig y_trig = Trig::cos;
};

struct MetricSpec {
  int nx = 64;
  int ny = 64;
  double lx = 1.0;
  double ly = 1.0;
  std::vector<LambdaHarmonic> lambda;
};

/// lambda and its first derivatives at one point.
struct LambdaSample {
  double value = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

class TorusMetric;
using MetricPtr = std::shared_ptr<const TorusMetric>;

/// Immutable after construction.
class TorusMetric {
 public:
  static constexpr double kNyquistTol = 1e-10;

  static MetricPtr build(const MetricSpec& spec);
  /// Throws NonSmoothLambda when the grid's Nyquist coefficients exceed kNyquistTol.
  static MetricPtr from_grid(int nx, int ny, double lx, double ly, std::vector<double> lambda);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double hx() const { return lx_ / nx_; }
  double hy() const { return ly_ / ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  double x(int i) const { return i * hx(); }
  double y(int j) const { return j * hy(); }
  double area() const;

  const std::vector<double>& lambda() const { return lambda_; }
  const std::vector<double>& lambda_x() const { return lambda_x_; }
  const std::vector<double>& lambda_y() const { return lambda_y_; }
  /// Gaussian curvature K = -e^{-2 lambda} Laplacian(lambda).
  const std::vector<double>& curvature() const { return curvature_; }
  const std::vector<double>& exp_lambda() const { return exp_lambda_; }
  const std::vector<double>& exp_minus_lambda() const { return exp_minus_lambda_; }
  /// Quadrature weight e^{2 lambda} dx dy of the base area form.
  const std::vector<double>& area_weight() const { return area_weight_; }

  bool is_flat() const { return flat_; }
  const Spectral2D& spectral() const { return *spectral_; }

  /// Off-grid lambda: exact trigonometric evaluation when lambda has few
  /// Fourier modes, otherwise interpolation of the spectral derivatives.
  LambdaSample lambda_at(double x, double y) const;
  bool uses_exact_lambda() const { return !sparse_.empty() || flat_; }

  /// Same grid and lambda (bitwise).
  bool same_as(const TorusMetric& other) const;

 private:
  TorusMetric() = default;

  struct Harmonic {
    double kx, ky;
    Complex coefficient;
  };

  int nx_ = 0, ny_ = 0;
  double lx_ = 1.0, ly_ = 1.0;
  bool flat_ = true;
  std::vector<double> lambda_, lambda_x_, lambda_y_, curvature_;
  std::vector<double> exp_lambda_, exp_minus_lambda_, area_weight_;
  std::shared_ptr<Spectral2D> spectral_;
  std::vector<Harmonic> sparse_;
  PeriodicInterpolator fallback_;
};

/// Maximum number of Fourier modes of lambda evaluated directly off-grid.
inline constexpr std::size_t kMaxExactLambdaModes = 64;

struct SMPoint {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Wraps position into [0,L) and theta into [0, 2 pi).
SMPoint wrap(const SMPoint& p, const TorusMetric& metric);

/// Distance on the torus-times-circle between two points (max of the
/// periodic coordinate differences).
double periodic_distance(const SMPoint& a, const SMPoint& b, const TorusMetric& metric);

struct GeodesicPath {
  std::vector<double> t;
  std::vector<SMPoint> points;  ///< wrapped
  double dt = 0.0;
  int order = 4;
};

/// Geodesic vector field X in coordinates (x, y, theta).
std::array<double, 3> geodesic_velocity(const TorusMetric& metric, const SMPoint& p);

/// Classical 4th-order Runge-Kutta integration of the geodesic flow.
/// |dt| must not exceed 1e-2 * min(Lx, Ly); T may be negative.
GeodesicPath integrate_geodesic(const TorusMetric& metric, const SMPoint& p0, double T, double dt);

/// Number of steps and signed step size used for a run of length T.
struct StepPlan {
  int steps;
  double h;
};
StepPlan plan_steps(const TorusMetric& metric, double T, double dt);

}  // namespace tpair
