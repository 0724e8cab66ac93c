#include "tpair/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tpair/backlund.hpp"
#include "tpair/cocycle.hpp"

namespace tpair {

namespace {

FourierField single_mode(const FourierField& u, int m) {
  FourierField f(u.metric_ptr(), std::abs(m));
  f.mode(m) = u.mode(m);
  return f;
}

double geodesic_check(const Pair& pair, double dt, std::string& name, double triviality_time) {
  const TorusMetric& g = pair.metric();
  const PairEvaluator eval(pair.A, pair.Phi);
  TransportOptions topt;
  topt.dt = dt;
  double worst = 0.0;
  if (g.is_flat()) {
    name = "holonomy";
    const int slopes[][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}};
    for (const auto& s : slopes) {
      const double vx = s[0] * g.lx(), vy = s[1] * g.ly();
      const SMPoint p0{0.17 * g.lx(), 0.29 * g.ly(), std::atan2(vy, vx)};
      const CocycleResult run = transport(eval, g, p0, std::hypot(vx, vy), topt);
      worst = std::max(worst, (run.C.back() - Mat3::Identity()).norm());
    }
  } else {
    name = "cocycle_triviality";
    const TrigEvaluator u(*pair.trivializer);
    const SMPoint starts[] = {{0.11 * g.lx(), 0.23 * g.ly(), 0.4}, {0.62 * g.lx(), 0.71 * g.ly(), 2.3},
                              {0.35 * g.lx(), 0.05 * g.ly(), 4.9}};
    for (const auto& p0 : starts)
      worst = std::max(worst, triviality_residual(u, transport(eval, g, p0, triviality_time, topt)));
  }
  return worst;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass(); });
}

std::vector<std::string> VerifyReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass()) out.push_back(c.name);
  return out;
}

const CheckResult* VerifyReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string VerifyReport::json() const {
  io::JsonWriter w;
  w.begin_object();
  w.field("passed", passed());
  w.begin_array("checks");
  for (const auto& c : checks) {
    w.begin_object();
    w.field("name", c.name).field("value", c.value).field("tolerance", c.tolerance);
    w.field("noise", c.noise).field("pass", c.pass());
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

std::string VerifyReport::text() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.pass() ? "PASS  " : "FAIL  ") << c.name;
    for (std::size_t k = c.name.size(); k < 28; ++k) out << ' ';
    out << io::format_shortest(c.value) << "  (tol " << io::format_shortest(c.tolerance) << ")\n";
  }
  out << (passed() ? "all checks passed\n" : "verification failed\n");
  return out.str();
}

VerifyReport verify_pair(const Pair& pair, const VerifyOptions& opt, const io::PairStructure* structure) {
  VerifyReport r;
  auto add = [&](std::string name, double value, double tol) {
    r.checks.push_back({std::move(name), std::isnan(value) ? INFINITY : value, tol, 0.0});
  };

  double a_struct = std::max(reality_residual(pair.A.field()), antisymmetry_residual(pair.A.field()));
  double phi_struct = std::max(reality_residual(pair.Phi.field()), antisymmetry_residual(pair.Phi.field()));
  if (structure) {
    a_struct = std::max({a_struct, structure->A.mode_leak, structure->A.reality, structure->A.antisymmetry});
    phi_struct = std::max({phi_struct, structure->Phi.mode_leak, structure->Phi.reality, structure->Phi.antisymmetry});
  }
  add("connection_structure", a_struct, opt.structure);
  add("higgs_structure", phi_struct, opt.structure);

  if (!pair.trivializer) {
    add("trivializer_present", 1.0, 0.0);
    return r;
  }
  const FourierField& u = *pair.trivializer;
  add("trivializer_orthogonality", orthogonality_residual(u), opt.orthogonality);
  add("transport_equation", transport_residual_field(pair.A, pair.Phi, u), opt.transport);
  add("mode_recurrence", max_recurrence_residual(pair.A, pair.Phi, u), opt.recurrence);

  double energy = 0.0;
  const double unorm = l2_norm(u);
  for (int m = -u.degree(); m <= u.degree(); ++m)
    if (mode_norm(u, m) > 1e-8 * unorm)
      energy = std::max(energy, energy_identity(single_mode(u, m), m, pair.A).relative_residual);
  add("energy_identity", energy, opt.energy);

  const H0Residuals h0 = h0_residuals(u, pair.Phi);
  add("h0_first", h0.first, opt.h0);
  add("h0_second", h0.second, opt.h0);
  add("connection_identity", useful_identity_residual(pair.A, u), opt.useful);

  if (opt.geodesic_checks) {
    std::string name;
    const double v = geodesic_check(pair, opt.dt, name, opt.triviality_time);
    const double coarse = geodesic_check(pair, 2.0 * opt.dt, name, opt.triviality_time);
    add(name, v, name == "holonomy" ? opt.holonomy : opt.triviality);
    // RK4: halving dt divides the error by 16
    r.checks.back().noise = std::abs(coarse - v) / 15.0;
  }
  return r;
}

std::vector<std::string> inflated_checks(const VerifyReport& a, const VerifyReport& b, double factor, double floor) {
  std::vector<std::string> out;
  for (const auto& cb : b.checks) {
    const CheckResult* ca = a.find(cb.name);
    if (ca && cb.value > factor * std::max({ca->value, ca->noise, cb.noise, floor})) out.push_back(cb.name);
  }
  return out;
}

}  // namespace tpair
