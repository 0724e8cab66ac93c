#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "support.hpp"
#include "tpair/cocycle.hpp"
#include "tpair/error.hpp"

using namespace tpair;
using namespace tpair::testing;

namespace {
constexpr double kPi = std::numbers::pi;

Mat3 rot_z(double s) {
  Mat3 r;
  r << std::cos(s), -std::sin(s), 0, std::sin(s), std::cos(s), 0, 0, 0, 1;
  return r;
}

Higgs constant_higgs(const MetricPtr& g, const Vec3& v) {
  return Higgs::from_grid(g, std::vector<Mat3>(g->size(), hat(v)));
}

double pair_distance(const Pair& a, const Pair& b) {
  double d = l2_norm(a.A.field() - b.A.field()) + l2_norm(a.Phi.field() - b.Phi.field());
  if (a.trivializer && b.trivializer) d += l2_norm(*a.trivializer - *b.trivializer);
  return d;
}
}  // namespace

TEST_CASE("trivial pair transports to the identity") {
  auto g = metric_cos(32, 0.1);
  const Pair t = trivial_pair(g);
  const CocycleResult run = transport(t, {0.1, 0.2, 0.3}, 2.0);
  CHECK(run.C.size() == run.path.t.size());
  for (const auto& c : run.C) CHECK((c - Mat3::Identity()).norm() == 0.0);
  CHECK(triviality_residual(t, run) == 0.0);
  CHECK(transport_residual_field(t) == 0.0);
}

TEST_CASE("constant Higgs field gives a one-parameter rotation group") {
  auto g = metric_cos(32, 0.0);
  const double phi0 = 1.7;
  Pair p = trivial_pair(g);
  p.Phi = constant_higgs(g, Vec3(0, 0, phi0));
  const CocycleResult run = transport(p, {0.3, 0.4, 1.1}, 3.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < run.C.size(); ++k)
    worst = std::max(worst, (run.C[k] - rot_z(-phi0 * run.path.t[k])).norm());
  CHECK(worst < 1e-10);
  CHECK(run.max_drift < 1e-10);
}

TEST_CASE("cocycle composition law") {
  auto g = metric_cos(64, 0.1);
  const BacklundCertificate cert = constant_step(g);
  const PairEvaluator eval(cert.output.A, cert.output.Phi);
  const CocycleResult whole = transport(eval, *g, {0.1, 0.2, 0.3}, 5.0);
  const std::size_t k = 3000;
  REQUIRE(std::abs(whole.path.t[k] - 3.0) < 1e-12);
  const CocycleResult tail = transport(eval, *g, whole.path.points[k], 2.0);
  CHECK((whole.C.back() - tail.C.back() * whole.C[k]).norm() < 1e-7);
}

TEST_CASE("cocycle of a Backlund pair factors through its trivializer") {
  auto g = metric_cos(64, 0.1);
  const BacklundCertificate cert = constant_step(g);
  CHECK(cert.certified());
  const CocycleResult run = transport(cert.output, {0.15, 0.7, 2.0}, 5.0);
  CHECK(triviality_residual(cert.output, run) < 1e-6);
  CHECK(run.max_drift < 1e-6);

  // a non-constant gauge applied to u alone breaks the factorization
  Rng rng(11);
  const FourierField r = FourierField::base(g, random_rotation_grid(rng, *g, 2, 0.8));
  Pair bad = cert.output;
  bad.trivializer = r * *cert.output.trivializer;
  CHECK(triviality_residual(bad, run) > 1e-2);
}

TEST_CASE("field residual and per-mode recurrence agree") {
  auto g = metric_cos(64, 0.0);
  const BacklundCertificate cert = factory_step(g);
  const FourierField& u = *cert.output.trivializer;
  CHECK(transport_residual_field(cert.output) < 1e-8);
  CHECK(max_recurrence_residual(cert.output.A, cert.output.Phi, u) < 1e-8);
  const auto per_mode = recurrence_residuals(cert.output.A, cert.output.Phi, u);
  CHECK(per_mode.size() == static_cast<std::size_t>(2 * u.degree() + 3));

  // scaling A by 1.01 is seen by both
  const Connection A = Connection::project(1.01 * cert.output.A.field());
  CHECK(transport_residual_field(A, cert.output.Phi, u) > 1e-4);
  CHECK(max_recurrence_residual(A, cert.output.Phi, u) > 1e-4);
}

TEST_CASE("closed geodesics on the flat torus have trivial holonomy") {
  auto g = metric_cos(64, 0.0);
  const BacklundCertificate cert = factory_step(g);
  CHECK(holonomy_closed(cert.output, {0.1, 0.2, kPi / 4}, std::sqrt(2.0)) < 1e-6);
  CHECK(holonomy_closed(cert.output, {0.6, 0.1, std::atan2(2.0, 1.0)}, std::sqrt(5.0)) < 1e-6);
  CHECK(holonomy_closed(cert.output, {0.3, 0.9, 0.0}, 1.0) < 1e-6);
  CHECK_THROWS_AS(holonomy_closed(cert.output, {0.1, 0.2, 0.3}, 1.0), Error);

  Rng rng(3);
  Pair generic = trivial_pair(g);
  generic.A = random_connection(rng, g, 2, 0.3);
  CHECK(holonomy_closed(generic, {0.1, 0.2, kPi / 4}, std::sqrt(2.0)) > 1e-3);
}

TEST_CASE("gauge action") {
  auto g = metric_cos(64, 0.1);
  const BacklundCertificate cert = constant_step(g);
  Rng rng(5);
  const auto psi = random_scalar(rng, *g, 2, 0.7);
  std::vector<Mat3> r(g->size());
  for (std::size_t p = 0; p < r.size(); ++p) r[p] = rot_z(psi[p]);

  const GaugeResult moved = gauge_transform(cert.output, r);
  CHECK(transport_residual_field(moved.pair) < 1e-8);
  CHECK(moved.leak.mode_leak < 1e-12);

  std::vector<Mat3> rt(r.size());
  for (std::size_t p = 0; p < r.size(); ++p) rt[p] = r[p].transpose();
  const GaugeResult back = gauge_transform(moved.pair, rt);
  CHECK(pair_distance(back.pair, cert.output) < 1e-10);

  const GaugeResult same = gauge_transform(cert.output, std::vector<Mat3>(g->size(), Mat3::Identity()));
  CHECK(pair_distance(same.pair, cert.output) == 0.0);

  // the triviality residual is gauge-equivariant
  const SMPoint p0{0.2, 0.3, 0.4};
  const double before = triviality_residual(cert.output, transport(cert.output, p0, 2.0));
  const double after = triviality_residual(moved.pair, transport(moved.pair, p0, 2.0));
  CHECK(std::abs(before - after) < 1e-9);
}

TEST_CASE("correspondence equations") {
  auto g = metric_cos(32, 0.1);
  const Pair t = trivial_pair(g);
  const H0Residuals zero = h0_residuals(*t.trivializer, t.Phi);
  CHECK(zero.first == 0.0);
  CHECK(zero.second == 0.0);

  auto flat = metric_cos(64, 0.0);
  const BacklundCertificate cert = factory_step(flat);
  const H0Residuals ok = h0_residuals(*cert.output.trivializer, cert.output.Phi);
  CHECK(ok.first < 1e-7);
  CHECK(ok.second < 1e-7);

  const BacklundCertificate curved = constant_step(g);
  const H0Residuals ok2 = h0_residuals(*curved.output.trivializer, curved.output.Phi);
  CHECK(ok2.first < 1e-7);
  CHECK(ok2.second < 1e-7);

  // u = a(g) for a random unit section: orthogonal, not a trivializer
  Rng rng(9);
  std::vector<Vec3> axes(flat->size());
  const auto x = random_scalar(rng, *flat, 2), y = random_scalar(rng, *flat, 2), z = random_scalar(rng, *flat, 2);
  for (std::size_t p = 0; p < axes.size(); ++p) axes[p] = Vec3(x[p], y[p], z[p] + 3.0);
  const FourierField u = vertical_solution_a(UnitSection::from_axes(flat, axes));
  const H0Residuals bad = h0_residuals(u, psi_from_first_equation(u));
  CHECK(bad.first < 1e-12);
  CHECK(bad.second > 1e-3);
}

TEST_CASE("drift monitoring and re-projection") {
  auto g = metric_cos(32, 0.0);
  Pair p = trivial_pair(g);
  p.Phi = constant_higgs(g, Vec3(0, 0, 100.0));
  TransportOptions opt;
  opt.dt = 5e-3;
  CHECK_THROWS_AS(transport(p, {0, 0, 0}, 1.0, opt), Error);
  opt.reproject_every = 1;
  const CocycleResult run = transport(p, {0, 0, 0}, 1.0, opt);
  CHECK(run.max_drift < 1e-12);
}

TEST_CASE("csv export") {
  auto g = metric_cos(16, 0.0);
  const CocycleResult run = transport(trivial_pair(g), {0, 0, 0}, 0.01);
  std::ostringstream out;
  write_csv(out, run);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,c00,c01,c02,c10,c11,c12,c20,c21,c22,drift");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == static_cast<int>(run.C.size()));
}
