#pragma once

// Backlund transformation of cohomologically trivial SO(3) pairs driven by a
// unit section g : M -> so(3) with -star d_A g = [d_A g, g], its inverse, the
// 2-step variant, the holomorphic-section factory and the degree reduction.

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tpair/smfield.hpp"

namespace tpair {

/// Map M -> so(3) with g^3 + g = 0 at every grid point.
class UnitSection {
 public:
  static constexpr double kUnitTol = 1e-10;

  UnitSection() = default;
  /// Throws NotUnit when some |g^3 + g| exceeds kUnitTol.
  UnitSection(MetricPtr metric, std::vector<Mat3> values);
  /// Normalizes a nowhere-vanishing axis field.
  static UnitSection from_axes(MetricPtr metric, const std::vector<Vec3>& axes);
  static UnitSection constant(MetricPtr metric, const Vec3& axis);

  const std::vector<Mat3>& values() const { return values_; }
  const MetricPtr& metric() const { return metric_; }
  FourierField field() const { return FourierField::base(metric_, values_); }
  /// max over the grid of |g^3 + g|
  double unit_residual() const;

 private:
  MetricPtr metric_;
  std::vector<Mat3> values_;
};

/// pi = -g(g + i)/2, projection onto the i-eigenline E_i; pi_perp = Id - pi.
struct ProjectorField {
  FourierField pi;
  FourierField perp;
};
ProjectorField projector(const UnitSection& g);

struct ProjectorResiduals {
  double idempotent = 0.0;  ///< max |pi^2 - pi|
  double hermitian = 0.0;   ///< max |pi^* - pi|
  double trace = 0.0;       ///< max |trace pi - 1|
  double partition = 0.0;   ///< max |pi + pi_perp - Id|
};
ProjectorResiduals projector_residuals(const UnitSection& g);

/// a = r (Id + g^2 + sin(theta) g - cos(theta) g^2), the solution of
/// a g = V(a) (for r = Id), as a degree-1 field:
///   a_0 = r(Id + g^2),  a_1 = -r g(g + i)/2,  a_{-1} = -r g(g - i)/2.
FourierField vertical_solution_a(const UnitSection& g, const std::vector<Mat3>* r = nullptr);

/// |star d_A g + [d_A g, g]| relative to |X g| + |A| + 1e-12 |g|.
double gmero_residual(const UnitSection& g, const Connection& A);

/// Residuals of the four equivalent holomorphicity conditions, on the scale
/// used by gmero_residual:
///   (1) -star d_A g = [d_A g, g]
///   (2) dbar_A g = i [dbar_A g, g]
///   (3) (dbar_A pi) pi = 0
///   (4) pi_perp dbar_A pi = 0
/// plus the identity g (d_A g) g = 0 that holds for every unit section.
struct LemmaEqResiduals {
  double gmero = 0.0;
  double dbar = 0.0;
  double line_bundle = 0.0;
  double projector = 0.0;
  double g_dg_g = 0.0;
  double max() const;
};
LemmaEqResiduals lemma_eq_residuals(const UnitSection& g, const Connection& A);

struct BacklundTolerances {
  double gmero = 1e-6;
  double input_transport = 1e-6;
  double transport = 1e-6;
  double mode_leak = 1e-10;
  double antisymmetry = 1e-9;
};

/// Everything needed to re-check one step.
struct BacklundCertificate {
  Pair input;             ///< (A, Phi, b)
  UnitSection g;
  FourierField a;
  Pair output;            ///< (A_g, Phi_g, u = a b)

  double gmero = 0.0;
  double input_transport = 0.0;
  double transport = 0.0;             ///< |X(u) + (A_g + Phi_g) u| / |u|
  /// V^2(A_g) + A_g and V(Phi_g), relative to |X(a)a^t| + |A| + |Phi| + |g<g,Phi>| + |star d_A g|
  double connection_leak = 0.0;
  double higgs_leak = 0.0;
  double connection_reality = 0.0;
  double connection_antisymmetry = 0.0;
  double higgs_reality = 0.0;
  double higgs_antisymmetry = 0.0;
  double a_vertical = 0.0;            ///< max |a g - V(a)|
  double a_orthogonality = 0.0;       ///< sampled |a^t a - Id|

  /// Failing checks by name; empty when certified.
  std::vector<std::string> failures(const BacklundTolerances& tol = {}) const;
  bool certified(const BacklundTolerances& tol = {}) const { return failures(tol).empty(); }
};

struct BacklundOptions {
  BacklundTolerances tol;
  /// Replaces vertical_solution_a(g); must satisfy a g = V(a).
  std::optional<FourierField> a;
  /// Skip the GNotHolomorphic / InputNotCertified checks.
  bool unchecked = false;
};

/// Phi_g = a(g<g,Phi> + star d_A g)a^{-1},
/// A_g   = -X(a)a^{-1} + a(A + Phi - g<g,Phi> - star d_A g)a^{-1},
/// with trivializer u = a b.
BacklundCertificate backlund_transform(const Pair& input, const UnitSection& g, const BacklundOptions& opt = {});

struct InverseResult {
  BacklundCertificate certificate;  ///< step run with g' = -q and a^{-1}
  UnitSection g_prime;
  double q_vertical = 0.0;        ///< |V(q)| / |q|
  /// d_{A_g} q - [a Phi a^{-1}, q], relative to |X q| + |A_g| + |[a Phi a^{-1}, q]|
  double q_derivative = 0.0;
  double q_gmero = 0.0;           ///< d_{A_g} q + [star d_{A_g} q, q], same scale
  double connection_gap = 0.0;    ///< |A - A''|
  double higgs_gap = 0.0;         ///< |Phi - Phi''|
};
/// q = a g a^{-1}; runs the step on the output with g' = -q and a^{-1}.
InverseResult inverse_backlund(const BacklundCertificate& cert, const BacklundOptions& opt = {});

struct TwoStepResult {
  BacklundCertificate first;
  BacklundCertificate second;
  double phi_q = 0.0;             ///< max |Phi_q|
  double c_generator = 0.0;       ///< max |c^{-1}V(c) - 2g|, c = a_q a
  double q_phi_inner = 0.0;       ///< max |<q, Phi_g>|
  int parity_first = 0;           ///< SU(2) lift parity of u after one step
  int parity_second = 0;          ///< and after two
};
/// Requires Phi = 0 (PhiNotZero otherwise).
TwoStepResult two_step_su2(const Pair& input, const UnitSection& g, const BacklundOptions& opt = {});

/// SU(2) lift parity of the loop theta -> u(x_p, theta) at grid point p.
int fiber_parity(const FourierField& u, std::size_t point, int samples = 64);

/// Residual of -star A = V(A) = -b X(f) b^{-1} - H(b) b^{-1}, f = b^{-1}V(b),
/// relative to the sum of the three terms plus |b|.
double useful_identity_residual(const Connection& A, const FourierField& b);

// ---- holomorphic sections -------------------------------------------------------------

struct FactoryPole {
  std::complex<double> z;  ///< pole position
  double strength = 0.15;  ///< coefficient of p(z - z_k)
};

/// zeta = Moebius(sum_k s_k p(z - z_k) + c) with the SU(2) Moebius map
/// [[alpha, beta], [-conj(beta), conj(alpha)]]; g = hat(n(zeta)) with n the
/// inverse stereographic projection from the north pole.
struct FactorySpec {
  std::vector<FactoryPole> poles;
  std::complex<double> constant = 0.0;
  std::complex<double> alpha = 1.0;
  std::complex<double> beta = 0.0;
  /// Uses conj(zeta) instead (antiholomorphic; negative control).
  bool conjugate = false;
  double tolerance = 1e-6;
};

/// Default single-pole spec on the given metric.
FactorySpec default_factory_spec(const TorusMetric& metric);

/// Throws FactoryValidationFailed when lemma_eq_residuals (A = 0) exceed the
/// tolerance.  The condition is conformally invariant, so any metric works.
UnitSection holomorphic_g_factory(const MetricPtr& metric, const FactorySpec& spec);
/// The same construction without validation (used for negative controls).
UnitSection factory_section_unchecked(const MetricPtr& metric, const FactorySpec& spec);

// ---- degree reduction ----------------------------------------------------------------

struct ReductionOptions {
  double rank_threshold = 1e-8;      ///< relative to max sigma_1(b_N)
  double max_zero_fraction = 0.01;
  double constraint_tol = 1e-9;
  double top_mode_tol = 1e-8;
  double lemma_tol = 1e-6;
  BacklundTolerances backlund;
};

struct ReductionResult {
  UnitSection g;
  FourierField a;
  BacklundCertificate certificate;  ///< output trivializer truncated to degree N-1
  int input_degree = 0;
  double a1_bN = 0.0;               ///< max |a_1 b_N| / max |b_N|
  double a0_bN = 0.0;
  double a1_bN1 = 0.0;              ///< max |a_1 b_{N-1}| / max |b_N|
  double bNt_bN1 = 0.0;             ///< max |b_N^t b_{N-1}| / max |b_N|
  double top_modes = 0.0;           ///< |u_{+-N}, u_{+-(N+1)}| / |u| before truncation
  double y_policy_gap = 0.0;        ///< max spread of g over admissible choices of y
  double kernel_alignment = 0.0;    ///< max |g x| for the null vector x of [C; D]^t
  double zero_fraction = 0.0;
  LemmaEqResiduals lemma;
  std::vector<std::string> failures(const ReductionOptions& opt = {}) const;
};

/// Constructs g from the top mode b_N = C + iD of the trivializer, then
/// a = vertical_solution_a(g) and u = a b of degree <= N-1.
ReductionResult reduce_degree(const Pair& pair, const ReductionOptions& opt = {});

// ---- chains ---------------------------------------------------------------------------

struct ConstantStep {
  Vec3 axis;
};
struct FactoryStep {
  FactorySpec spec;
};
/// Second half of a 2-step: uses q = a g a^{-1} of the previous step.
struct QStep {};
using StepSpec = std::variant<ConstantStep, FactoryStep, QStep>;

struct ChainResult {
  Pair pair;
  std::vector<BacklundCertificate> certificates;
};

/// Starts from the trivial pair.  GNotHolomorphic propagates, and a step
/// whose input failed certification throws InputNotCertified; the last
/// certificate is returned as computed, so callers check its failures().
ChainResult generate_chain(const MetricPtr& metric, const std::vector<StepSpec>& steps,
                           const BacklundOptions& opt = {});

}  // namespace tpair
