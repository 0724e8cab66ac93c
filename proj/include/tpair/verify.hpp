#pragma once

// Full residual suite for a pair with trivializer.

#include <string>
#include <vector>

#include "tpair/field_io.hpp"
#include "tpair/smfield.hpp"

namespace tpair {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  double noise = 0.0;  ///< estimated discretization error of value; 0 for algebraic checks
  bool pass() const { return value <= tolerance; }
};

struct VerifyOptions {
  double structure = 1e-9;       ///< modes, reality, antisymmetry of A and Phi
  double orthogonality = 1e-10;  ///< u pointwise in SO(3)
  double transport = 1e-6;
  double recurrence = 1e-6;
  double energy = 1e-7;
  double h0 = 1e-7;
  double useful = 1e-7;
  double holonomy = 1e-6;        ///< closed geodesics (flat metrics)
  double triviality = 1e-6;      ///< sampled cocycle factorization (curved metrics)
  double dt = 1e-3;
  double triviality_time = 5.0;
  bool geodesic_checks = true;   ///< the ODE-based checks dominate the cost
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  std::vector<std::string> failures() const;
  const CheckResult* find(const std::string& name) const;
  std::string json() const;
  std::string text() const;
};

/// Check names: connection_structure, higgs_structure, trivializer_orthogonality,
/// transport_equation, mode_recurrence, energy_identity, h0_first, h0_second,
/// connection_identity, holonomy (flat) or cocycle_triviality (curved).
/// `structure` carries what loading removed from the stored fields.
VerifyReport verify_pair(const Pair& pair, const VerifyOptions& opt = {}, const io::PairStructure* structure = nullptr);

/// Checks present in both reports with
/// value(b) > factor * max(value(a), noise(a), noise(b), floor).
/// The ODE-based checks carry a Richardson estimate of their RK4 error as
/// noise, so a gauge that only makes the flow harder to integrate is not
/// counted as inflation.
std::vector<std::string> inflated_checks(const VerifyReport& a, const VerifyReport& b, double factor = 10.0,
                                         double floor = 1e-12);

}  // namespace tpair
