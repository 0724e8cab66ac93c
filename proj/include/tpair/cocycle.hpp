#pragma once

// The cocycle C of a pair over the geodesic flow,
//
//   dC/dt = -(A(phi_t(x,v)) + Phi(pi(phi_t(x,v)))) C,   C(0) = Id,
//
// and the field-level diagnostics of cohomological triviality.

#include <iosfwd>
#include <vector>

#include "tpair/smfield.hpp"

namespace tpair {

/// Exact off-grid evaluation of a FourierField: finite trigonometric sums in
/// theta and in (x, y).  Costs O(nx ny) per matrix entry and point, so it is
/// meant for sparse sampling, not for ODE right-hand sides.
class TrigEvaluator {
 public:
  explicit TrigEvaluator(const FourierField& u);
  Mat3C operator()(double x, double y, double theta) const;

 private:
  int nx_ = 0, ny_ = 0, degree_ = 0;
  double lx_ = 1.0, ly_ = 1.0;
  std::vector<Complex> coefficients_;  // [mode][ky][kx][entry], normalized
};

/// Off-grid evaluation of A + Phi from nine real channels (axes of a, b and
/// Phi), refined spectrally and interpolated.
class PairEvaluator {
 public:
  PairEvaluator(const Connection& A, const Higgs& Phi, int refine_target = 512);
  /// A(x, y, theta) + Phi(x, y) as an antisymmetric matrix.
  Mat3 operator()(double x, double y, double theta) const;

 private:
  PeriodicInterpolator interp_;
};

struct TransportOptions {
  double dt = 1e-3;
  /// Polar re-projection of C every this many steps; 0 disables.
  int reproject_every = 0;
  /// NonOrthogonalDrift is raised above this bound (without re-projection).
  double drift_tol = 1e-6;
  int refine_target = 512;
};

struct CocycleResult {
  GeodesicPath path;
  std::vector<Mat3> C;          ///< one per path sample
  std::vector<double> drift;    ///< orthogonality drift of each sample
  double max_drift = 0.0;
};

CocycleResult transport(const Pair& pair, const SMPoint& p0, double T, const TransportOptions& opt = {});
/// Reuses a prepared evaluator (for many initial conditions on one pair).
CocycleResult transport(const PairEvaluator& eval, const TorusMetric& metric, const SMPoint& p0, double T,
                        const TransportOptions& opt = {});

/// max over samples of |C(t) - u(phi_t p0) u(p0)^{-1}|, sampled every
/// `stride` steps.
double triviality_residual(const Pair& pair, const CocycleResult& run, int stride = 100);
double triviality_residual(const TrigEvaluator& u, const CocycleResult& run, int stride = 100);

/// |C(T) - Id| along a geodesic that must close: NotClosed when the endpoint
/// misses the start by more than 1e-8.
double holonomy_closed(const Pair& pair, const SMPoint& p0, double T, const TransportOptions& opt = {});

/// |X(u) + (A + Phi) u| / |u| in mode arithmetic.
double transport_residual_field(const Pair& pair);
/// Same quantity for an explicit trivializer.
double transport_residual_field(const Connection& A, const Higgs& Phi, const FourierField& u);

/// Per-mode form mu_+(u_{m-1}) + mu_-(u_{m+1}) + Phi u_m for every m,
/// each relative to |u|.
struct RecurrenceResidual {
  int m;
  double residual;
};
std::vector<RecurrenceResidual> recurrence_residuals(const Connection& A, const Higgs& Phi, const FourierField& u);
double max_recurrence_residual(const Connection& A, const Higgs& Phi, const FourierField& u);

struct GaugeResult {
  Pair pair;
  Connection::Projection leak;  ///< what the projection of r^{-1}dr + r^{-1}Ar removed
};
/// (A, Phi, u) -> (r^{-1}dr + r^{-1}Ar, r^{-1}Phi r, r^{-1}u).
GaugeResult gauge_transform(const Pair& pair, const std::vector<Mat3>& r);

/// Residuals of the two correspondence equations for f = u^{-1}V(u) and
/// Psi = u^{-1}Phi u:
///   H(f) + VX(f) - [X(f), f] + Psi = 0,   V(Psi) + [f, Psi] = 0,
/// both relative to |H f| + |VX f| + |[X f, f]| + |Psi| + |u|.
struct H0Residuals {
  double first = 0.0;
  double second = 0.0;
};
H0Residuals h0_residuals(const FourierField& u, const FourierField& Psi);
H0Residuals h0_residuals(const FourierField& u, const Higgs& Phi);
/// Psi solving the first equation for f = u^{-1}V(u).
FourierField psi_from_first_equation(const FourierField& u);

/// CSV with header t,c00..c22,drift.
void write_csv(std::ostream& out, const CocycleResult& run);

}  // namespace tpair
