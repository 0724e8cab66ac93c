// Acceptance criteria 1-12, one line each.  `acceptance 4 9` runs a subset.
// Exit status is the number of failing criteria (capped at 1).

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "support.hpp"
#include "tpair/cocycle.hpp"
#include "tpair/error.hpp"
#include "tpair/field_io.hpp"
#include "tpair/lie3.hpp"
#include "tpair/verify.hpp"

using namespace tpair;
using namespace tpair::testing;

namespace {

const Complex kI(0, 1);

// ---- reporting -------------------------------------------------------------------

class Criterion {
 public:
  // value <= bound passes
  void at_most(const std::string& what, double value, double bound) {
    add(what, value, "<=", bound, value <= bound);
  }
  void at_least(const std::string& what, double value, double bound) {
    add(what, value, ">", bound, value > bound);
  }
  void require(const std::string& what, bool ok) {
    parts_.push_back(what + (ok ? "" : " [failed]"));
    pass_ = pass_ && ok;
  }
  bool pass() const { return pass_; }
  std::string detail() const {
    std::string s;
    for (std::size_t k = 0; k < parts_.size(); ++k) s += (k ? "; " : "") + parts_[k];
    return s;
  }

 private:
  void add(const std::string& what, double value, const char* rel, double bound, bool ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.3g %s %.3g%s", what.c_str(), value, rel, bound, ok ? "" : " [failed]");
    parts_.push_back(buf);
    pass_ = pass_ && ok;
  }
  std::vector<std::string> parts_;
  bool pass_ = true;
};

// ---- shared fixtures -------------------------------------------------------------

const Vec3 kAxis(0.3, -0.5, 0.8);

MetricPtr curved128() {
  static const MetricPtr g = metric_cos(128, 0.1);
  return g;
}

MetricPtr flat(int n) {
  static std::map<int, MetricPtr> cache;
  auto& g = cache[n];
  if (!g) g = metric_cos(n, 0.0);
  return g;
}

// Constant section, lambda = 0.1 cos(2 pi x / Lx), 128^2.
const BacklundCertificate& step4() {
  static const BacklundCertificate c = backlund_transform(trivial_pair(curved128()), UnitSection::constant(curved128(), kAxis));
  return c;
}

// Factory section on the flat 256^2 torus.
const BacklundCertificate& step5() {
  static const BacklundCertificate c = [] {
    const MetricPtr g = flat(256);
    return backlund_transform(trivial_pair(g), holomorphic_g_factory(g, default_factory_spec(*g)));
  }();
  return c;
}

// Factory section on the flat 128^2 torus.
const BacklundCertificate& factory128() {
  static const BacklundCertificate c = backlund_transform(
      trivial_pair(flat(128)), holomorphic_g_factory(flat(128), default_factory_spec(*flat(128))));
  return c;
}

void scale_mode(FourierField& f, int m, double s) {
  for (auto& x : f.mode(m)) x *= s;
}

// Factory then q on the flat 128^2 torus: degree 2, Phi from the first step.
const ChainResult& chain128() {
  static const ChainResult c = generate_chain(flat(128), {FactoryStep{default_factory_spec(*flat(128))}, QStep{}});
  return c;
}

double max_pointwise(const FourierField& f, int m) {
  double v = 0.0;
  for (const auto& x : f.mode(m)) v = std::max(v, x.norm());
  return v;
}

FactorySpec random_factory_spec(Rng& rng, const TorusMetric& g) {
  FactorySpec spec;
  spec.poles.push_back({Complex(uniform(rng, 0, g.lx()), uniform(rng, 0, g.ly())), uniform(rng, 0.1, 0.3)});
  spec.constant = Complex(uniform(rng), uniform(rng));
  spec.alpha = Complex(uniform(rng), uniform(rng));
  spec.beta = Complex(uniform(rng), uniform(rng));
  return spec;
}

UnitSection random_section(Rng& rng, const MetricPtr& g, int kmax) {
  const auto x = random_scalar(rng, *g, kmax, 0.5), y = random_scalar(rng, *g, kmax, 0.5),
             z = random_scalar(rng, *g, kmax, 0.5);
  std::vector<Vec3> axes(g->size());
  for (std::size_t p = 0; p < axes.size(); ++p) axes[p] = Vec3(x[p], y[p], z[p] + 1.5);
  return UnitSection::from_axes(g, axes);
}

// max over samples of |a - b| / max |b|
double sampled_gap(const SampledField& a, const SampledField& b) {
  double num = 0.0, den = 0.0;
  for (int k = 0; k < a.n_theta(); ++k)
    for (std::size_t p = 0; p < a.slices[k].size(); ++p) {
      num = std::max(num, (a.slices[k][p] - b.slices[k][p]).norm());
      den = std::max(den, b.slices[k][p].norm());
    }
  return den > 0 ? num / den : num;
}

// ---- criteria --------------------------------------------------------------------

void algebra(Criterion& c) {
  Rng rng(101);
  double jacobi_form = 0.0, ell_bracket = 0.0, ell_square = 0.0;
  const int samples = 2000;
  for (int k = 0; k < samples; ++k) {
    const Mat3 a = hat(random_vec(rng)), b = hat(random_vec(rng)), d = hat(random_vec(rng));
    jacobi_form = std::max(jacobi_form, (bracket(a, bracket(b, d)) - b * inner(a, d) + d * inner(a, b)).norm());
    const So3 x(random_vec(rng)), y(random_vec(rng));
    const Eigen::Matrix2cd lx = ell(x).matrix(), ly = ell(y).matrix();
    ell_bracket = std::max(ell_bracket, (ell(bracket(x, y)).matrix() - (lx * ly - ly * lx)).norm());
    const Eigen::Matrix2cd h = 2.0 * ell(So3(random_vec(rng).normalized())).matrix();
    ell_square = std::max(ell_square, (h * h + Eigen::Matrix2cd::Identity()).norm());
  }
  c.require(std::to_string(samples) + " samples", true);
  c.at_most("[a,[b,c]]-b<a,c>+c<a,b>", jacobi_form, 1e-13);
  c.at_most("ell bracket", ell_bracket, 1e-13);
  c.at_most("h^2+Id", ell_square, 1e-13);
}

void operators(Criterion& c) {
  MetricSpec spec{128, 128, 1.0, 1.0, {{0.1, 1, 0, Trig::cos, Trig::cos}, {0.05, 1, 1, Trig::sin, Trig::cos}}};
  const MetricPtr g = TorusMetric::build(spec);
  Rng rng(102);
  const Connection A = random_connection(rng, g, 2, 0.5);
  const std::vector<Mat3> a = A.a(), b = A.b();
  double eta = 0.0, mu = 0.0, adjoint = 0.0;
  for (int degree = 0; degree <= 3; ++degree) {
    const FourierField u = random_field(rng, g, degree, 4);
    const int n = 4 * (degree + 2);
    const SampledField s = sample(u, n);
    const SampledField X = frame_apply(FrameField::X, s), H = frame_apply(FrameField::H, s);
    // oracle: (X -+ iH)/2 on samples, plus A(theta) = a cos + b sin split by e^{+-i theta}
    SampledField plus = s, minus = s, mplus = s, mminus = s;
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * std::numbers::pi * k / n;
      const Complex e = std::polar(1.0, th);
      for (std::size_t p = 0; p < g->size(); ++p) {
        plus.slices[k][p] = 0.5 * (X.slices[k][p] - kI * H.slices[k][p]);
        minus.slices[k][p] = 0.5 * (X.slices[k][p] + kI * H.slices[k][p]);
        const Mat3C ap = 0.5 * (a[p].cast<Complex>() - kI * b[p].cast<Complex>()) * e;
        const Mat3C am = 0.5 * (a[p].cast<Complex>() + kI * b[p].cast<Complex>()) * std::conj(e);
        mplus.slices[k][p] = plus.slices[k][p] + ap * s.slices[k][p];
        mminus.slices[k][p] = minus.slices[k][p] + am * s.slices[k][p];
      }
    }
    eta = std::max({eta, sampled_gap(sample(eta_plus(u), n), plus), sampled_gap(sample(eta_minus(u), n), minus)});
    mu = std::max({mu, sampled_gap(sample(mu_plus(u, A), n), mplus), sampled_gap(sample(mu_minus(u, A), n), mminus)});
    const FourierField v = random_field(rng, g, degree, 4);
    const Complex lhs = l2_inner(mu_plus(u, A), v), rhs = -l2_inner(u, mu_minus(v, A));
    adjoint = std::max(adjoint, std::abs(lhs - rhs) / std::abs(lhs));
  }
  c.at_most("eta vs frame", eta, 1e-8);
  c.at_most("mu vs frame + A", mu, 1e-8);
  c.at_most("<mu+u,v>+<u,mu-v>", adjoint, 1e-9);
}

void energy(Criterion& c) {
  Rng rng(103);
  double worst = 0.0, control = INFINITY;
  const int trials = 24;
  for (int t = 0; t < trials; ++t) {
    MetricSpec spec{64, 64, 1.0, 1.0, {}};
    spec.lambda.push_back({uniform(rng, -0.2, 0.2), 1, 0, Trig::cos, Trig::cos});
    spec.lambda.push_back({uniform(rng, -0.1, 0.1), 1, 1, Trig::sin, Trig::cos});
    const MetricPtr g = TorusMetric::build(spec);
    int m = static_cast<int>(uniform(rng, -3, 4));
    if (m == 0) m = 1 + t % 3;  // m = 0 has no curvature term for the control
    FourierField u(g, std::abs(m));
    u.mode(m) = random_grid(rng, *g, 3);
    const Connection A = random_connection(rng, g, 2, 0.3);
    worst = std::max(worst, energy_identity(u, m, A).relative_residual);
    // control: the identity with the wrong curvature weight
    control = std::min(control, energy_identity(u, m + 1, A).relative_residual);
  }
  c.require(std::to_string(trials) + " triples", true);
  c.at_most("relative residual", worst, 1e-7);
  c.at_least("control (weight m+1)", control, 100 * 1e-7);
}

void step_constant(Criterion& c) {
  const BacklundCertificate& cert = step4();
  c.require("certified", cert.certified());
  c.at_most("max|Phi_g|", max_abs(cert.output.Phi.field()), VerifyOptions{}.structure);
  c.at_most("transport", cert.transport, 1e-8);
  const TrigEvaluator u(*cert.output.trivializer);
  const PairEvaluator eval(cert.output.A, cert.output.Phi);
  const TorusMetric& g = *curved128();
  double worst = 0.0;
  for (const SMPoint p0 : {SMPoint{0.11, 0.23, 0.4}, SMPoint{0.62, 0.71, 2.3}, SMPoint{0.35, 0.05, 4.9}})
    worst = std::max(worst, triviality_residual(u, transport(eval, g, p0, 20.0, {})));
  c.at_most("cocycle vs trivializer (T=20)", worst, 1e-6);
}

void step_higgs(Criterion& c) {
  const BacklundCertificate& cert = step5();
  c.require("certified at 256^2", cert.certified());
  c.at_least("max|Phi_g|", max_pointwise(cert.output.Phi.field(), 0), 10 * BacklundTolerances{}.transport);
  c.at_most("transport", cert.transport, 1e-6);
  const TorusMetric& g = *flat(256);
  double worst = 0.0;
  for (const auto& s : {std::pair{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}}) {
    const double vx = s.first * g.lx(), vy = s.second * g.ly();
    worst = std::max(worst, holonomy_closed(cert.output, {0.17, 0.29, std::atan2(vy, vx)}, std::hypot(vx, vy)));
  }
  c.at_most("holonomy (5 closed geodesics)", worst, 1e-6);
}

void lemma_equivalence(Criterion& c) {
  Rng rng(106);
  const MetricPtr g = flat(128);
  const Connection A0 = Connection::zero(g);
  int disagreements = 0, holo_pass = 0, random_fail = 0;
  double holo_worst = 0.0, random_best = INFINITY;
  for (int k = 0; k < 50; ++k) {
    const bool holo = k % 2 == 0;
    const UnitSection s = holo ? holomorphic_g_factory(g, random_factory_spec(rng, *g)) : random_section(rng, g, 1 + k % 3);
    const LemmaEqResiduals r = lemma_eq_residuals(s, A0);
    const double v[4] = {r.gmero, r.dbar, r.line_bundle, r.projector};
    int passing = 0;
    for (double x : v) passing += x <= 1e-5;
    if (passing != 0 && passing != 4) ++disagreements;
    if (holo) {
      holo_pass += passing == 4;
      holo_worst = std::max(holo_worst, *std::max_element(v, v + 4));
    } else {
      random_fail += passing == 0;
      random_best = std::min(random_best, *std::min_element(v, v + 4));
    }
  }
  c.at_most("disagreements", disagreements, 0);
  c.require("factory " + std::to_string(holo_pass) + "/25 pass", holo_pass == 25);
  c.require("random " + std::to_string(random_fail) + "/25 fail", random_fail == 25);
  c.at_most("factory worst", holo_worst, 1e-5);
  c.at_least("random smallest", random_best, 1e-5);
}

void inverse(Criterion& c) {
  double gap = 0.0, q = 0.0;
  for (const BacklundCertificate* cert : {&factory128(), &chain128().certificates.back(), &step4()}) {
    const InverseResult r = inverse_backlund(*cert);
    gap = std::max({gap, r.connection_gap, r.higgs_gap});
    q = std::max({q, r.q_vertical, r.q_derivative, r.q_gmero});
  }
  c.require("3 steps (factory, q with Phi, curved)", true);
  c.at_most("round trip", gap, 1e-7);
  c.at_most("q-lemma", q, 1e-8);
}

void two_step(Criterion& c) {
  double phi = 0.0, gen = 0.0;
  bool parity = true;
  const UnitSection sections[] = {holomorphic_g_factory(flat(128), default_factory_spec(*flat(128))),
                                  UnitSection::constant(curved128(), kAxis)};
  for (const UnitSection& s : sections) {
    const TwoStepResult r = two_step_su2(trivial_pair(s.metric()), s);
    phi = std::max(phi, r.phi_q);
    gen = std::max(gen, r.c_generator);
    parity = parity && r.parity_first == -1 && r.parity_second == 1 && r.first.certified() && r.second.certified();
  }
  c.at_most("Phi_q", phi, 1e-8);
  c.at_most("c^-1 V(c) - 2g", gen, 1e-9);
  c.require("parity -1 then +1", parity);
}

std::vector<Pair>& certified_pairs() {
  static std::vector<Pair> pairs;
  return pairs;
}

void reduction(Criterion& c) {
  double top = 0.0, constraints = 0.0, phi = 0.0, transport = 0.0;
  bool verified = true;
  for (const BacklundCertificate* cert : {&step4(), &step5()}) {
    const ReductionResult r = reduce_degree(cert->output);
    top = std::max(top, r.top_modes);
    constraints = std::max({constraints, r.a1_bN, r.a0_bN, r.a1_bN1});
    const Pair& out = r.certificate.output;
    phi = std::max(phi, max_pointwise(out.Phi.field(), 0));
    transport = std::max(transport, transport_residual_field(out));
    const VerifyReport v = verify_pair(out);
    verified = verified && v.passed() && out.trivializer->degree() == 0;
    certified_pairs().push_back(out);
  }
  c.at_most("|u_{+-1}| after", top, 1e-8);
  c.at_most("a1bN, a0bN, a1bN-1", constraints, 1e-9);
  c.require("reduced pairs pass verify at degree 0", verified);
  c.at_most("max|Phi'|", phi, 1e-8);
  c.at_most("du0 + (A'+Phi')u0", transport, 1e-7);
}

void gauge(Criterion& c) {
  Rng rng(110);
  bool passed = true;
  std::set<std::string> inflated;
  double worst_ratio = 0.0;
  const Pair bases[] = {step4().output, chain128().pair};
  for (const Pair& base : bases) {
    const VerifyReport ref = verify_pair(base);
    for (int k = 0; k < 3; ++k) {
      const GaugeResult moved = gauge_transform(base, random_rotation_grid(rng, base.metric(), 2, 0.5));
      const VerifyReport r = verify_pair(moved.pair);
      passed = passed && r.passed();
      for (const auto& name : inflated_checks(ref, r)) inflated.insert(name);
      for (const auto& cb : r.checks) {
        const CheckResult* ca = ref.find(cb.name);
        const double floor = std::max({ca->value, ca->noise, cb.noise, 1e-12});
        worst_ratio = std::max(worst_ratio, cb.value / floor);
      }
      certified_pairs().push_back(moved.pair);
    }
  }
  std::string names;
  for (const auto& n : inflated) names += " " + n;
  c.require("6 gauged pairs pass verify", passed);
  c.at_most("worst inflation", worst_ratio, 10.0);
  c.require("inflated:" + (names.empty() ? std::string(" none") : names), inflated.empty());
}

void correspondence(Criterion& c) {
  std::vector<Pair> pairs = certified_pairs();
  pairs.push_back(step4().output);
  pairs.push_back(step5().output);
  pairs.push_back(chain128().pair);
  double worst = 0.0;
  for (const Pair& p : pairs) {
    const H0Residuals h = h0_residuals(*p.trivializer, p.Phi);
    worst = std::max({worst, h.first, h.second});
  }
  c.require(std::to_string(pairs.size()) + " certified pairs", true);
  c.at_most("h0 residuals", worst, 1e-7);

  // controls: u = a(g) for a random section, and a certified u against the wrong Higgs field
  Rng rng(111);
  const MetricPtr g = flat(64);
  const FourierField ua = vertical_solution_a(random_section(rng, g, 2));
  const double control_a = h0_residuals(ua, psi_from_first_equation(ua)).second;
  const Pair& p = chain128().pair;
  const Higgs wrong = Higgs::from_grid(p.A.field().metric_ptr(), std::vector<Mat3>(p.metric().size(), hat(kAxis)));
  const H0Residuals hw = h0_residuals(*p.trivializer, wrong);
  c.at_least("control a(g)", control_a, 1e-3);
  c.at_least("control wrong Phi", std::max(hw.first, hw.second), 1e-3);
}

// Verify with the structure report of loading, as the CLI does.
bool suite_fails(const Pair& p, const io::PairStructure& st) {
  VerifyOptions opt;
  opt.geodesic_checks = false;
  return !verify_pair(p, opt, &st).passed();
}

void negative_controls(Criterion& c) {
  int total = 0, caught = 0;
  std::vector<std::string> missed;
  auto record = [&](const std::string& what, bool detected) {
    ++total;
    caught += detected;
    if (!detected) missed.push_back(what);
  };
  const std::pair<const char*, const BacklundCertificate*> certs[] = {
      {"constant", &step4()}, {"factory", &factory128()}, {"factory+q", &chain128().certificates.back()}};
  for (const auto& [label, cert] : certs) {
    const Pair& p = cert->output;
    const std::string tag = std::string(label) + ": ";
    for (int m : {-1, 1}) {
      FourierField A = p.A.field();
      scale_mode(A, m, 1.01);
      io::PairStructure st;
      Pair q = p;
      q.A = Connection::project(A, &st.A);
      record(tag + "A mode " + std::to_string(m), suite_fails(q, st));
    }
    {
      FourierField Phi = p.Phi.field();
      scale_mode(Phi, 0, 1.01);
      if (max_abs(Phi) > 1e-8) {  // steps whose Phi vanishes have nothing to perturb
        Pair q = p;
        q.Phi = Higgs::project(Phi);
        record(tag + "Phi mode 0", suite_fails(q, {}));
      }
    }
    const FourierField& u = *p.trivializer;
    for (int m = -u.degree(); m <= u.degree(); ++m) {
      if (mode_norm(u, m) <= 1e-8 * l2_norm(u)) continue;  // empty modes (two-step u is even in theta)
      Pair q = p;
      FourierField v = u;
      scale_mode(v, m, 1.01);
      q.trivializer = v;
      record(tag + "u mode " + std::to_string(m), suite_fails(q, {}));
    }
    // the step's own objects: g and a
    {
      std::vector<Mat3> gv = cert->g.values();
      for (auto& x : gv) x *= 1.01;
      bool detected = false;
      try {
        detected = !backlund_transform(cert->input, UnitSection(cert->g.metric(), gv)).certified();
      } catch (const Error&) {
        detected = true;
      }
      record(tag + "g", detected);
    }
    for (int m : {-1, 0, 1}) {
      BacklundOptions opt;
      FourierField a = cert->a;
      scale_mode(a, m, 1.01);
      opt.a = a;
      bool detected = false;
      try {
        detected = !backlund_transform(cert->input, cert->g, opt).certified();
      } catch (const Error&) {
        detected = true;
      }
      record(tag + "a mode " + std::to_string(m), detected);
    }
  }
  std::string miss;
  for (const auto& m : missed) miss += " [" + m + "]";
  c.require(std::to_string(caught) + "/" + std::to_string(total) + " one-mode 1% perturbations caught" + miss,
            caught == total);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Criterion&)>>> criteria = {
      {"algebra identities", algebra},
      {"frame operators", operators},
      {"energy identity", energy},
      {"step with constant section", step_constant},
      {"step with Higgs field", step_higgs},
      {"holomorphicity equivalence", lemma_equivalence},
      {"inverse step", inverse},
      {"two-step", two_step},
      {"degree reduction", reduction},
      {"gauge invariance", gauge},
      {"correspondence", correspondence},
      {"negative controls", negative_controls},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second(c);
    } catch (const std::exception& e) {
      c.require(std::string("threw: ") + e.what(), false);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d  %s  %-28s %6.1fs  %s\n", id, c.pass() ? "PASS" : "FAIL", criteria[k].first, secs,
                c.detail().c_str());
    std::fflush(stdout);
    failed += !c.pass();
  }
  return failed ? 1 : 0;
}
