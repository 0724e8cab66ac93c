#pragma once

// Matrix-valued functions on the unit circle bundle SM of the torus, stored
// as finite Fourier series in the fiber angle:
//
//   u(x, y, theta) = sum_{m=-N}^{N} u_m(x, y) e^{i m theta},
//
// each u_m a grid of complex 3x3 matrices.  All operators act mode by mode
// and never truncate: products grow the degree exactly.

#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "tpair/lie3.hpp"
#include "tpair/torus.hpp"

namespace tpair {

using MatGrid = std::vector<Mat3C>;

/// Spectral derivative of a matrix grid (all nine entries).
MatGrid grid_derivative(const TorusMetric& metric, Derivative d, const MatGrid& grid);

class FourierField {
 public:
  FourierField() = default;
  /// Zero field of the given degree.
  FourierField(MetricPtr metric, int degree);

  static FourierField constant(MetricPtr metric, const Mat3C& value);
  static FourierField identity(MetricPtr metric) { return constant(std::move(metric), Mat3C::Identity()); }
  /// Degree-0 field from a base grid.
  static FourierField base(MetricPtr metric, MatGrid grid);
  static FourierField base(MetricPtr metric, const std::vector<Mat3>& grid);

  int degree() const { return degree_; }
  bool empty() const { return !metric_; }
  const TorusMetric& metric() const { return *metric_; }
  const MetricPtr& metric_ptr() const { return metric_; }
  std::size_t points() const { return metric_->size(); }

  bool has_mode(int m) const { return m >= -degree_ && m <= degree_; }
  MatGrid& mode(int m);
  const MatGrid& mode(int m) const;

  /// Pads with zero modes or drops modes beyond |m| > degree.
  FourierField with_degree(int degree) const;
  /// Keeps only the listed modes (others zeroed), degree unchanged.
  FourierField only_modes(std::initializer_list<int> modes) const;

  /// Pointwise transpose of every mode (the inverse of an SO(3)-valued field).
  FourierField transpose() const;
  /// Pointwise complex conjugate of the function: (conj u)_m = conj(u_{-m}).
  FourierField conj() const;

  /// Value at a grid point and fiber angle.
  Mat3C at(std::size_t point, double theta) const;

  FourierField& operator+=(const FourierField& o);
  FourierField& operator-=(const FourierField& o);
  FourierField& operator*=(Complex s);
  FourierField operator-() const;
  friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
  friend FourierField operator*(FourierField a, Complex s) { return a *= s; }
  friend FourierField operator*(Complex s, FourierField a) { return a *= s; }

 private:
  void check_compatible(const FourierField& o) const;

  MetricPtr metric_;
  int degree_ = 0;
  std::vector<MatGrid> modes_;  // index m + degree
};

// ---- pointwise / algebraic -------------------------------------------------

/// Mode convolution (uv)_m = sum_k u_k v_{m-k} with pointwise matrix product.
FourierField multiply(const FourierField& u, const FourierField& v);
inline FourierField operator*(const FourierField& u, const FourierField& v) { return multiply(u, v); }
/// uv - vu
FourierField commutator(const FourierField& u, const FourierField& v);
/// Pointwise scalar field (degree 0, real) times u.
FourierField scale_by(const FourierField& u, const std::vector<double>& s);

/// L^2 pairing over SM with the Sasaki measure e^{2 lambda} dx dy dtheta:
/// 2 pi sum_m sum_grid trace(u_m v_m^*) e^{2 lambda} dx dy.
Complex l2_inner(const FourierField& u, const FourierField& v);
double l2_norm(const FourierField& u);
double mode_norm(const FourierField& u, int m);
/// Norm of all modes with |m| > keep.
double norm_beyond(const FourierField& u, int keep);
/// Norm of all modes not in the list.
double norm_outside(const FourierField& u, std::initializer_list<int> modes);
/// max over grid points and modes of the Frobenius norm.
double max_abs(const FourierField& u);

// ---- invariants -------------------------------------------------------------

/// max_m |u_{-m} - conj(u_m)|, zero for real-valued functions.
double reality_residual(const FourierField& u);
/// max over samples of |u + u^t| (antisymmetry of the values).
double antisymmetry_residual(const FourierField& u);
/// max over theta samples of |u^t u - Id| and |det u - 1|.
double orthogonality_residual(const FourierField& u, int theta_samples = 0);

// ---- frame operators in mode form ------------------------------------------

/// V = d/dtheta: multiplies mode m by i m.
FourierField vertical(const FourierField& u);
/// eta_-(h e^{im theta}) = e^{-(1+m) lambda} dbar(h e^{m lambda}) e^{i(m-1) theta}
FourierField eta_minus(const FourierField& u);
/// eta_+(h e^{im theta}) = e^{(m-1) lambda} d(h e^{-m lambda}) e^{i(m+1) theta}
FourierField eta_plus(const FourierField& u);
/// X = eta_+ + eta_-
FourierField geodesic_derivative(const FourierField& u);
/// H = [V, X] = i (eta_+ - eta_-)
FourierField horizontal_derivative(const FourierField& u);

// ---- connections and Higgs fields -------------------------------------------

/// so(3)-valued 1-form A = a cos(theta) + b sin(theta): a real field with
/// exactly the modes +-1 and antisymmetric values.
class Connection {
 public:
  Connection() = default;
  static Connection zero(MetricPtr metric);
  static Connection from_coefficients(MetricPtr metric, const std::vector<Mat3>& a, const std::vector<Mat3>& b);

  struct Projection {
    double mode_leak = 0.0;       ///< relative norm outside modes +-1
    double reality = 0.0;         ///< max |A_{-1} - conj(A_1)|
    double antisymmetry = 0.0;    ///< max |A + A^t| over samples
  };
  /// Projects a general field onto connections (modes +-1, real,
  /// antisymmetric) and reports what was removed.
  static Connection project(const FourierField& f, Projection* report = nullptr);

  const FourierField& field() const { return field_; }
  const TorusMetric& metric() const { return field_.metric(); }
  bool empty() const { return field_.empty(); }

  /// Coefficient grids of cos(theta) and sin(theta).
  std::vector<Mat3> a() const;
  std::vector<Mat3> b() const;

 private:
  explicit Connection(FourierField f) : field_(std::move(f)) {}
  FourierField field_;
};

/// so(3)-valued function on the base (mode 0 only).
class Higgs {
 public:
  Higgs() = default;
  static Higgs zero(MetricPtr metric);
  static Higgs from_grid(MetricPtr metric, const std::vector<Mat3>& values);

  struct Projection {
    double mode_leak = 0.0;
    double reality = 0.0;
    double antisymmetry = 0.0;
  };
  static Higgs project(const FourierField& f, Projection* report = nullptr);

  const FourierField& field() const { return field_; }
  std::vector<Mat3> values() const;
  bool empty() const { return field_.empty(); }

 private:
  explicit Higgs(FourierField f) : field_(std::move(f)) {}
  FourierField field_;
};

struct Pair {
  Connection A;
  Higgs Phi;
  /// Optional trivializing function u with X(u) + (A + Phi) u = 0.
  std::optional<FourierField> trivializer;

  FourierField sum() const { return A.field() + Phi.field(); }
  const TorusMetric& metric() const { return A.metric(); }
};

Pair trivial_pair(MetricPtr metric);

/// (A_1, A_{-1}) with A_1 = (A - i V A)/2.
std::pair<FourierField, FourierField> decompose_connection(const Connection& A);
FourierField mu_plus(const FourierField& u, const Connection& A);
FourierField mu_minus(const FourierField& u, const Connection& A);
/// Hodge star on 1-forms, realized as -V.
Connection hodge_star(const Connection& A);
/// Hodge star on any field supported in modes +-1 (complex allowed).
FourierField hodge_star(const FourierField& form);
/// d_A g = X(g) + [A, g] for g with V(g) = 0.
FourierField covariant_derivative(const FourierField& g, const Connection& A);

struct DbarResult {
  FourierField value;      ///< eta_-(f) + [A_{-1}, f], mode -1
  double formula_gap = 0;  ///< relative gap to (d_A f - i star d_A f)/2
};
DbarResult dbar_A(const FourierField& f, const Connection& A);

/// star(dA + A ^ A) as a degree-0 field.
FourierField star_curvature(const Connection& A);

struct EnergyIdentity {
  double plus_sq = 0.0;   ///< |mu_+ u|^2
  double minus_sq = 0.0;  ///< |mu_- u|^2
  double rhs = 0.0;       ///< (1/2) <(i star F_A - m K) u, u>
  double relative_residual = 0.0;
};
/// Checks |mu_+ u|^2 = |mu_- u|^2 + (1/2) <(i star F_A - m K Id) u, u> for u
/// supported in the single mode m.
EnergyIdentity energy_identity(const FourierField& u, int m, const Connection& A);

// ---- sampled representation (oracle for the mode calculus) -------------------

struct SampledField {
  MetricPtr metric;
  std::vector<MatGrid> slices;  ///< slices[k] at theta_k = 2 pi k / n
  int n_theta() const { return static_cast<int>(slices.size()); }
};

SampledField sample(const FourierField& u, int n_theta);
FourierField unsample(const SampledField& s, int degree);

enum class FrameField { X, H, V };
/// Applies the coordinate formulas for X, H, V directly on theta samples,
/// with spectral derivatives in x, y and theta.
SampledField frame_apply(FrameField w, const SampledField& s);

}  // namespace tpair
