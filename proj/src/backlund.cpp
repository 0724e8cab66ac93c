#include "tpair/backlund.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tpair/cocycle.hpp"
#include "tpair/error.hpp"
#include "tpair/weierstrass.hpp"

namespace tpair {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

double ratio(double num, double den) { return den > 0.0 ? num / den : num; }

FourierField scalar_times(const MetricPtr& metric, const std::vector<Mat3>& g, const std::vector<double>& s) {
  std::vector<Mat3> out(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) out[p] = s[p] * g[p];
  return FourierField::base(metric, out);
}

// Largest |Fourier coefficient| on the Nyquist row/column relative to the
// largest coefficient, over all nine entries.
double nyquist_ratio(const TorusMetric& metric, const std::vector<Mat3>& values) {
  MatGrid buf(values.size());
  for (std::size_t p = 0; p < values.size(); ++p) buf[p] = values[p].cast<Complex>();
  auto* data = reinterpret_cast<Complex*>(buf.data());
  metric.spectral().forward(data, data, 9);
  double top = 0.0, nyq = 0.0;
  for (int j = 0; j < metric.ny(); ++j)
    for (int i = 0; i < metric.nx(); ++i) {
      const double v = buf[metric.index(i, j)].cwiseAbs().maxCoeff();
      top = std::max(top, v);
      if (2 * i == metric.nx() || 2 * j == metric.ny()) nyq = std::max(nyq, v);
    }
  return ratio(nyq, top);
}

}  // namespace

// ---- unit sections and projectors -------------------------------------------------

UnitSection::UnitSection(MetricPtr metric, std::vector<Mat3> values) : metric_(std::move(metric)), values_(std::move(values)) {
  if (values_.size() != metric_->size()) throw Error(ErrorCode::invalid_argument, "section grid size mismatch");
  for (auto& v : values_) v = 0.5 * (v - v.transpose());
  const double r = unit_residual();
  if (!(r <= kUnitTol)) throw Error(ErrorCode::not_unit, "max |g^3 + g| = " + std::to_string(r));
  if (nyquist_ratio(*metric_, values_) > 1e-6)
    throw Error(ErrorCode::invalid_argument, "unit section is not resolved by the grid");
}

UnitSection UnitSection::from_axes(MetricPtr metric, const std::vector<Vec3>& axes) {
  std::vector<Mat3> v(axes.size());
  for (std::size_t p = 0; p < axes.size(); ++p) {
    const double n = axes[p].norm();
    if (n == 0.0) throw Error(ErrorCode::not_unit, "axis field vanishes");
    v[p] = hat(axes[p] / n);
  }
  return UnitSection(std::move(metric), std::move(v));
}

UnitSection UnitSection::constant(MetricPtr metric, const Vec3& axis) {
  const std::size_t n = metric->size();
  return from_axes(std::move(metric), std::vector<Vec3>(n, axis));
}

double UnitSection::unit_residual() const {
  double worst = 0.0;
  for (const auto& g : values_) worst = std::max(worst, (g * g * g + g).norm());
  return worst;
}

ProjectorField projector(const UnitSection& g) {
  MatGrid pi(g.values().size()), perp(g.values().size());
  for (std::size_t p = 0; p < pi.size(); ++p) {
    const Mat3C gc = g.values()[p].cast<Complex>();
    pi[p] = -0.5 * gc * (gc + kI * Mat3C::Identity());
    perp[p] = Mat3C::Identity() - pi[p];
  }
  return {FourierField::base(g.metric(), std::move(pi)), FourierField::base(g.metric(), std::move(perp))};
}

ProjectorResiduals projector_residuals(const UnitSection& g) {
  const ProjectorField P = projector(g);
  ProjectorResiduals r;
  const MatGrid& pi = P.pi.mode(0);
  const MatGrid& perp = P.perp.mode(0);
  for (std::size_t p = 0; p < pi.size(); ++p) {
    const Mat3C& m = pi[p];
    r.idempotent = std::max(r.idempotent, (m * m - m).norm());
    r.hermitian = std::max(r.hermitian, (m.adjoint() - m).norm());
    r.trace = std::max(r.trace, std::abs(m.trace() - 1.0));
    r.partition = std::max(r.partition, (m + perp[p] - Mat3C::Identity()).norm());
  }
  return r;
}

FourierField vertical_solution_a(const UnitSection& g, const std::vector<Mat3>* r) {
  FourierField a(g.metric(), 1);
  const Mat3C id = Mat3C::Identity();
  for (std::size_t p = 0; p < g.values().size(); ++p) {
    const Mat3C gc = g.values()[p].cast<Complex>();
    const Mat3C rc = r ? (*r)[p].cast<Complex>() : id;
    a.mode(0)[p] = rc * (id + gc * gc);
    a.mode(1)[p] = -0.5 * rc * gc * (gc + kI * id);
    a.mode(-1)[p] = -0.5 * rc * gc * (gc - kI * id);
  }
  return a;
}

namespace {

// Roundoff scale of d_A g = X g + [A, g]; covariantly constant sections
// (d_A g = 0 up to roundoff) then count as holomorphic.
double derivative_scale(const FourierField& gf, const Connection& A) {
  return l2_norm(geodesic_derivative(gf)) + l2_norm(A.field()) + 1e-12 * l2_norm(gf);
}

}  // namespace

double gmero_residual(const UnitSection& g, const Connection& A) {
  const FourierField gf = g.field();
  const FourierField d = covariant_derivative(gf, A);
  return l2_norm(hodge_star(d) + commutator(d, gf)) / derivative_scale(gf, A);
}

double LemmaEqResiduals::max() const { return std::max({gmero, dbar, line_bundle, projector}); }

LemmaEqResiduals lemma_eq_residuals(const UnitSection& g, const Connection& A) {
  LemmaEqResiduals r;
  const FourierField gf = g.field();
  const double scale = derivative_scale(gf, A);
  const FourierField d = covariant_derivative(gf, A);
  r.gmero = l2_norm(hodge_star(d) + commutator(d, gf)) / scale;
  r.g_dg_g = l2_norm(gf * d * gf) / scale;

  const FourierField db = dbar_A(gf, A).value;
  r.dbar = l2_norm(db - kI * commutator(db, gf)) / scale;

  const ProjectorField P = projector(g);
  const FourierField dpi = dbar_A(P.pi, A).value;
  r.line_bundle = l2_norm(dpi * P.pi) / scale;
  r.projector = l2_norm(P.perp * dpi) / scale;
  return r;
}

// ---- the transformation ---------------------------------------------------------------

std::vector<std::string> BacklundCertificate::failures(const BacklundTolerances& tol) const {
  std::vector<std::string> out;
  auto check = [&](const char* name, double value, double bound) {
    if (!(value <= bound)) out.emplace_back(name);
  };
  check("holomorphic_section", gmero, tol.gmero);
  check("input_transport_equation", input_transport, tol.input_transport);
  check("transport_equation", transport, tol.transport);
  check("connection_modes", connection_leak, tol.mode_leak);
  check("higgs_modes", higgs_leak, tol.mode_leak);
  check("connection_reality", connection_reality, tol.antisymmetry);
  check("connection_antisymmetry", connection_antisymmetry, tol.antisymmetry);
  check("higgs_reality", higgs_reality, tol.antisymmetry);
  check("higgs_antisymmetry", higgs_antisymmetry, tol.antisymmetry);
  check("vertical_solution", a_vertical, 1e-12);
  check("vertical_solution_orthogonality", a_orthogonality, 1e-10);
  return out;
}

BacklundCertificate backlund_transform(const Pair& input, const UnitSection& g, const BacklundOptions& opt) {
  if (!input.trivializer) throw Error(ErrorCode::input_not_certified, "input pair has no trivializer");
  const MetricPtr& metric = g.metric();
  BacklundCertificate cert;
  cert.input = input;
  cert.g = g;
  cert.input_transport = transport_residual_field(input.A, input.Phi, *input.trivializer);
  if (!opt.unchecked && !(cert.input_transport <= opt.tol.input_transport))
    throw Error(ErrorCode::input_not_certified, "input transport residual " + std::to_string(cert.input_transport));
  cert.gmero = gmero_residual(g, input.A);
  if (!opt.unchecked && !(cert.gmero <= opt.tol.gmero))
    throw Error(ErrorCode::g_not_holomorphic, "holomorphic section residual " + std::to_string(cert.gmero));

  cert.a = opt.a ? *opt.a : vertical_solution_a(g);
  const FourierField& a = cert.a;
  const FourierField at = a.transpose();
  const FourierField gf = g.field();

  std::vector<double> gphi(g.values().size());
  const std::vector<Mat3> phi = input.Phi.values();
  for (std::size_t p = 0; p < gphi.size(); ++p) gphi[p] = inner(g.values()[p], phi[p]);
  const FourierField s = scalar_times(metric, g.values(), gphi);
  const FourierField sd = hodge_star(covariant_derivative(gf, input.A));

  const FourierField phi_raw = a * (s + sd) * at;
  const FourierField xa = geodesic_derivative(a) * at;
  const FourierField a_raw = -xa + a * (input.A.field() + input.Phi.field() - s - sd) * at;
  // leaks relative to the terms of the formulas, not the (possibly vanishing) outputs
  const double scale =
      l2_norm(xa) + l2_norm(input.A.field()) + l2_norm(input.Phi.field()) + l2_norm(s) + l2_norm(sd);
  cert.higgs_leak = ratio(norm_outside(phi_raw, {0}), scale);
  cert.connection_leak = ratio(norm_outside(a_raw, {-1, 1}), scale);

  Connection::Projection crep;
  Higgs::Projection hrep;
  cert.output.A = Connection::project(a_raw, &crep);
  cert.output.Phi = Higgs::project(phi_raw, &hrep);
  cert.connection_reality = crep.reality;
  cert.connection_antisymmetry = crep.antisymmetry;
  cert.higgs_reality = hrep.reality;
  cert.higgs_antisymmetry = hrep.antisymmetry;
  cert.output.trivializer = a * *input.trivializer;
  cert.transport = transport_residual_field(cert.output.A, cert.output.Phi, *cert.output.trivializer);

  cert.a_vertical = max_abs(a * gf - vertical(a));
  cert.a_orthogonality = orthogonality_residual(a, 8);
  return cert;
}

InverseResult inverse_backlund(const BacklundCertificate& cert, const BacklundOptions& opt) {
  const MetricPtr& metric = cert.g.metric();
  const FourierField gf = cert.g.field();
  const FourierField at = cert.a.transpose();
  const FourierField q_raw = cert.a * gf * at;

  InverseResult r;
  r.q_vertical = ratio(l2_norm(vertical(q_raw)), l2_norm(q_raw));
  const Higgs qh = Higgs::project(q_raw);
  std::vector<Mat3> gp = qh.values();
  for (auto& v : gp) v = -v;
  r.g_prime = UnitSection(metric, gp);

  const FourierField q = qh.field();
  const Connection& Ag = cert.output.A;
  const FourierField dq = covariant_derivative(q, Ag);
  const FourierField t = commutator(cert.a * cert.input.Phi.field() * at, q);
  // |A_g| rather than |[A_g, q]|: for constant g on a curved torus A_g commutes with q
  const double scale = derivative_scale(q, Ag) + l2_norm(t);
  r.q_derivative = ratio(l2_norm(dq - t), scale);
  r.q_gmero = ratio(l2_norm(dq + commutator(hodge_star(dq), q)), scale);

  BacklundOptions inv = opt;
  inv.a = at;
  r.certificate = backlund_transform(cert.output, r.g_prime, inv);
  r.connection_gap = l2_norm(r.certificate.output.A.field() - cert.input.A.field());
  r.higgs_gap = l2_norm(r.certificate.output.Phi.field() - cert.input.Phi.field());
  return r;
}

int fiber_parity(const FourierField& u, std::size_t point, int samples) {
  std::vector<Rot3> loop;
  loop.reserve(samples);
  for (int k = 0; k < samples; ++k) loop.emplace_back(u.at(point, kTwoPi * k / samples).real());
  return su2_path_lift(loop);
}

TwoStepResult two_step_su2(const Pair& input, const UnitSection& g, const BacklundOptions& opt) {
  if (max_abs(input.Phi.field()) > 1e-12) throw Error(ErrorCode::phi_not_zero, "two-step input has a Higgs field");
  TwoStepResult r;
  r.first = backlund_transform(input, g, opt);
  const FourierField q_raw = r.first.a * g.field() * r.first.a.transpose();
  const UnitSection q(g.metric(), Higgs::project(q_raw).values());
  r.second = backlund_transform(r.first.output, q, opt);

  r.phi_q = max_abs(r.second.output.Phi.field());
  const FourierField c = r.second.a * r.first.a;
  r.c_generator = max_abs(c.transpose() * vertical(c) - 2.0 * g.field());
  const std::vector<Mat3> phig = r.first.output.Phi.values();
  for (std::size_t p = 0; p < phig.size(); ++p)
    r.q_phi_inner = std::max(r.q_phi_inner, std::abs(inner(q.values()[p], phig[p])));
  r.parity_first = fiber_parity(*r.first.output.trivializer, 0);
  r.parity_second = fiber_parity(*r.second.output.trivializer, 0);
  return r;
}

double useful_identity_residual(const Connection& A, const FourierField& b) {
  const FourierField bt = b.transpose();
  const FourierField f = bt * vertical(b);
  const FourierField lhs = vertical(A.field());
  const FourierField t1 = b * geodesic_derivative(f) * bt;
  const FourierField t2 = horizontal_derivative(b) * bt;
  const double scale = l2_norm(lhs) + l2_norm(t1) + l2_norm(t2) + l2_norm(b);
  return ratio(l2_norm(lhs + t1 + t2), scale);
}

// ---- factory ---------------------------------------------------------------------------

FactorySpec default_factory_spec(const TorusMetric& metric) {
  FactorySpec spec;
  spec.poles.push_back({Complex(0.31 * metric.lx(), 0.27 * metric.ly()), 0.15});
  spec.constant = Complex(0.2, -0.1);
  return spec;
}

UnitSection factory_section_unchecked(const MetricPtr& metric, const FactorySpec& spec) {
  const WeierstrassP wp(metric->lx(), metric->ly());
  const double near = 0.25 * std::min(metric->lx(), metric->ly());
  const double mn = std::sqrt(std::norm(spec.alpha) + std::norm(spec.beta));
  if (mn == 0.0) throw Error(ErrorCode::invalid_argument, "degenerate Moebius map");
  const Complex alpha = spec.alpha / mn, beta = spec.beta / mn;

  std::vector<Vec3> axes(metric->size());
  const std::size_t K = spec.poles.size();
  std::vector<Complex> num(K), den(K);
  for (int j = 0; j < metric->ny(); ++j)
    for (int i = 0; i < metric->nx(); ++i) {
      const Complex z(metric->x(i), metric->y(j));
      // each term as num/den, with den = d^2 near its pole
      for (std::size_t k = 0; k < K; ++k) {
        const Complex d = wp.reduce(z - spec.poles[k].z);
        if (std::abs(d) < near) {
          num[k] = 1.0 + d * d * wp.regular_part(d);
          den[k] = d * d;
        } else {
          num[k] = 1.0 / (d * d) + wp.regular_part(d);
          den[k] = 1.0;
        }
      }
      Complex Q = 1.0;
      for (std::size_t k = 0; k < K; ++k) Q *= den[k];
      Complex P = spec.constant * Q;
      for (std::size_t k = 0; k < K; ++k) {
        Complex term = spec.poles[k].strength * num[k];
        for (std::size_t l = 0; l < K; ++l)
          if (l != k) term *= den[l];
        P += term;
      }
      if (spec.conjugate) {
        P = std::conj(P);
        Q = std::conj(Q);
      }
      const Complex p = alpha * P + beta * Q;
      const Complex q = -std::conj(beta) * P + std::conj(alpha) * Q;
      const Complex pq = p * std::conj(q);
      const double np = std::norm(p), nq = std::norm(q);
      axes[metric->index(i, j)] = Vec3(2.0 * pq.real(), 2.0 * pq.imag(), np - nq) / (np + nq);
    }
  return UnitSection::from_axes(metric, axes);
}

UnitSection holomorphic_g_factory(const MetricPtr& metric, const FactorySpec& spec) {
  UnitSection g = factory_section_unchecked(metric, spec);
  const LemmaEqResiduals r = lemma_eq_residuals(g, Connection::zero(metric));
  if (!(r.max() <= spec.tolerance))
    throw Error(ErrorCode::factory_validation_failed, "holomorphicity residual " + std::to_string(r.max()));
  return g;
}

// ---- degree reduction ---------------------------------------------------------------------

std::vector<std::string> ReductionResult::failures(const ReductionOptions& opt) const {
  std::vector<std::string> out;
  auto check = [&](const char* name, double value, double bound) {
    if (!(value <= bound)) out.emplace_back(name);
  };
  check("a1_bN", a1_bN, opt.constraint_tol);
  check("a0_bN", a0_bN, opt.constraint_tol);
  check("a1_bN-1", a1_bN1, opt.constraint_tol);
  check("top_modes", top_modes, opt.top_mode_tol);
  check("holomorphic_section", lemma.max(), opt.lemma_tol);
  for (const auto& f : certificate.failures(opt.backlund)) out.push_back("step:" + f);
  return out;
}

ReductionResult reduce_degree(const Pair& pair, const ReductionOptions& opt) {
  if (!pair.trivializer) throw Error(ErrorCode::input_not_certified, "pair has no trivializer");
  const FourierField& b_full = *pair.trivializer;
  const MetricPtr& metric = b_full.metric_ptr();
  const TorusMetric& grid = *metric;

  // effective degree: drop negligible top modes
  const double bnorm = l2_norm(b_full);
  int N = b_full.degree();
  while (N > 0 && mode_norm(b_full, N) <= 1e-10 * bnorm && mode_norm(b_full, -N) <= 1e-10 * bnorm) --N;
  if (N < 1) throw Error(ErrorCode::invalid_argument, "trivializer has degree 0");
  const FourierField b = b_full.with_degree(N);

  ReductionResult r;
  r.input_degree = N;
  const MatGrid& bN = b.mode(N);
  const MatGrid& bN1 = b.mode(N - 1);
  const std::size_t np = grid.size();

  std::vector<double> sigma(np);
  double smax = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    sigma[p] = bN[p].norm();  // rank one: Frobenius norm = sigma_1
    smax = std::max(smax, sigma[p]);
  }
  if (smax == 0.0) throw Error(ErrorCode::rank_deficient, "top mode vanishes identically");

  std::vector<Vec3> n(np, Vec3::Zero());
  std::vector<char> valid(np, 0);
  std::size_t zeros = 0;
  const Vec3 basis[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  for (std::size_t p = 0; p < np; ++p) {
    if (sigma[p] < opt.rank_threshold * smax) {
      ++zeros;
      continue;
    }
    const Mat3 C = bN[p].real(), D = bN[p].imag();
    // y maximizing |Cy|; g(Cy) = Dy, g(Dy) = -Cy makes g = hat(Cy x Dy / |Cy|^2)
    int best = 0;
    double cbest = -1.0;
    for (int k = 0; k < 3; ++k) {
      const double c = (C * basis[k]).norm();
      if (c > cbest) {
        cbest = c;
        best = k;
      }
    }
    auto axis_for = [&](int k) { return (C * basis[k]).cross(D * basis[k]).normalized(); };
    n[p] = axis_for(best);
    valid[p] = 1;
    for (int k = 0; k < 3; ++k)
      if (k != best && (C * basis[k]).norm() >= 0.1 * cbest)
        r.y_policy_gap = std::max(r.y_policy_gap, (axis_for(k) - n[p]).norm());

    Eigen::Matrix<double, 6, 3> M;
    M.topRows<3>() = C.transpose();
    M.bottomRows<3>() = D.transpose();
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 3>> svd(M, Eigen::ComputeFullV);
    const Vec3 x = svd.matrixV().col(2);
    r.kernel_alignment = std::max(r.kernel_alignment, n[p].cross(x).norm());
  }
  r.zero_fraction = static_cast<double>(zeros) / static_cast<double>(np);
  if (r.zero_fraction > opt.max_zero_fraction)
    throw Error(ErrorCode::rank_deficient, "top mode vanishes on " + std::to_string(r.zero_fraction) + " of the grid");

  // fill zeros of b_N by inverse-distance weighting of nearby axes
  for (std::size_t p = 0; p < np && zeros > 0; ++p) {
    if (valid[p]) continue;
    const int pi = static_cast<int>(p % grid.nx()), pj = static_cast<int>(p / grid.nx());
    Vec3 acc = Vec3::Zero();
    for (int radius = 1; radius <= 16 && acc.norm() == 0.0; ++radius) {
      for (int dj = -radius; dj <= radius; ++dj)
        for (int di = -radius; di <= radius; ++di) {
          const int qi = ((pi + di) % grid.nx() + grid.nx()) % grid.nx();
          const int qj = ((pj + dj) % grid.ny() + grid.ny()) % grid.ny();
          const std::size_t q = grid.index(qi, qj);
          if (!valid[q]) continue;
          acc += n[q] / std::hypot(di * grid.hx(), dj * grid.hy());
        }
    }
    if (acc.norm() == 0.0) throw Error(ErrorCode::rank_deficient, "isolated zero region too large to fill");
    n[p] = acc.normalized();
  }

  std::vector<Mat3> gv(np);
  for (std::size_t p = 0; p < np; ++p) gv[p] = hat(n[p]);
  r.g = UnitSection(metric, gv);
  r.a = vertical_solution_a(r.g);

  const MatGrid& a1 = r.a.mode(1);
  const MatGrid& a0 = r.a.mode(0);
  for (std::size_t p = 0; p < np; ++p) {
    r.a1_bN = std::max(r.a1_bN, (a1[p] * bN[p]).norm());
    r.a0_bN = std::max(r.a0_bN, (a0[p] * bN[p]).norm());
    r.a1_bN1 = std::max(r.a1_bN1, (a1[p] * bN1[p]).norm());
    r.bNt_bN1 = std::max(r.bNt_bN1, (bN[p].transpose() * bN1[p]).norm());
  }
  r.a1_bN /= smax;
  r.a0_bN /= smax;
  r.a1_bN1 /= smax;
  r.bNt_bN1 /= smax;

  Pair input = pair;
  input.trivializer = b;
  BacklundOptions bopt;
  bopt.tol = opt.backlund;
  bopt.a = r.a;
  bopt.unchecked = true;
  r.certificate = backlund_transform(input, r.g, bopt);

  const FourierField& u = *r.certificate.output.trivializer;
  double top = 0.0;
  for (int m = N; m <= u.degree(); ++m) top += std::pow(mode_norm(u, m), 2) + std::pow(mode_norm(u, -m), 2);
  r.top_modes = ratio(std::sqrt(top), l2_norm(u));
  r.certificate.output.trivializer = u.with_degree(N - 1);
  r.certificate.transport =
      transport_residual_field(r.certificate.output.A, r.certificate.output.Phi, *r.certificate.output.trivializer);
  r.lemma = lemma_eq_residuals(r.g, pair.A);

  const auto fails = r.failures(opt);
  if (!fails.empty()) {
    std::string msg = "reduction residuals above tolerance:";
    for (const auto& f : fails) msg += " " + f;
    throw Error(ErrorCode::reduction_failed, msg);
  }
  return r;
}

// ---- chains ------------------------------------------------------------------------------------

ChainResult generate_chain(const MetricPtr& metric, const std::vector<StepSpec>& steps, const BacklundOptions& opt) {
  ChainResult chain;
  chain.pair = trivial_pair(metric);
  for (const auto& step : steps) {
    UnitSection g;
    if (const auto* c = std::get_if<ConstantStep>(&step)) {
      g = UnitSection::constant(metric, c->axis);
    } else if (const auto* f = std::get_if<FactoryStep>(&step)) {
      g = holomorphic_g_factory(metric, f->spec);
    } else {
      if (chain.certificates.empty()) throw Error(ErrorCode::invalid_argument, "q step needs a previous step");
      const BacklundCertificate& prev = chain.certificates.back();
      const FourierField q_raw = prev.a * prev.g.field() * prev.a.transpose();
      g = UnitSection(metric, Higgs::project(q_raw).values());
    }
    chain.certificates.push_back(backlund_transform(chain.pair, g, opt));
    chain.pair = chain.certificates.back().output;
  }
  return chain;
}

}  // namespace tpair
