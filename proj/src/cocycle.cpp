#include "tpair/cocycle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "tpair/error.hpp"

namespace tpair {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double orthogonality_drift(const Mat3& c) {
  return std::max((c.transpose() * c - Mat3::Identity()).norm(), std::abs(c.determinant() - 1.0));
}

std::string fmt17(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

}  // namespace

// ---- evaluators ---------------------------------------------------------------

TrigEvaluator::TrigEvaluator(const FourierField& u)
    : nx_(u.metric().nx()), ny_(u.metric().ny()), degree_(u.degree()), lx_(u.metric().lx()), ly_(u.metric().ly()) {
  const std::size_t np = u.points();
  coefficients_.resize((2 * degree_ + 1) * np * 9);
  std::vector<Complex> buf(np * 9);
  const double scale = 1.0 / static_cast<double>(np);
  for (int m = -degree_; m <= degree_; ++m) {
    const MatGrid& g = u.mode(m);
    std::copy_n(reinterpret_cast<const Complex*>(g.data()), np * 9, buf.data());
    u.metric().spectral().forward(buf.data(), buf.data(), 9);
    Complex* dst = coefficients_.data() + (m + degree_) * np * 9;
    for (std::size_t q = 0; q < np * 9; ++q) dst[q] = buf[q] * scale;
  }
}

// Nyquist terms are split evenly between +k and -k (cosine interpolant).
Mat3C TrigEvaluator::operator()(double x, double y, double theta) const {
  std::vector<Complex> ex(nx_), ey(ny_);
  for (int i = 0; i < nx_; ++i) {
    const int k = i <= nx_ / 2 ? i : i - nx_;
    ex[i] = (2 * i == nx_) ? Complex(std::cos(kTwoPi * k * x / lx_)) : std::polar(1.0, kTwoPi * k * x / lx_);
  }
  for (int j = 0; j < ny_; ++j) {
    const int k = j <= ny_ / 2 ? j : j - ny_;
    ey[j] = (2 * j == ny_) ? Complex(std::cos(kTwoPi * k * y / ly_)) : std::polar(1.0, kTwoPi * k * y / ly_);
  }
  const std::size_t np = static_cast<std::size_t>(nx_) * ny_;
  Mat3C out = Mat3C::Zero();
  for (int m = -degree_; m <= degree_; ++m) {
    const Complex* c = coefficients_.data() + (m + degree_) * np * 9;
    Eigen::Matrix<Complex, 9, 1> acc = Eigen::Matrix<Complex, 9, 1>::Zero();
    for (int j = 0; j < ny_; ++j) {
      Eigen::Matrix<Complex, 9, 1> row = Eigen::Matrix<Complex, 9, 1>::Zero();
      for (int i = 0; i < nx_; ++i) {
        const Complex* e = c + (static_cast<std::size_t>(j) * nx_ + i) * 9;
        row += ex[i] * Eigen::Map<const Eigen::Matrix<Complex, 9, 1>>(e);
      }
      acc += ey[j] * row;
    }
    out += std::polar(1.0, m * theta) * Eigen::Map<const Mat3C>(acc.data());
  }
  return out;
}

PairEvaluator::PairEvaluator(const Connection& A, const Higgs& Phi, int refine_target) {
  const TorusMetric& g = A.metric();
  const auto a = A.a(), b = A.b(), phi = Phi.values();
  std::vector<std::vector<double>> channels(9, std::vector<double>(g.size()));
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Vec3 va = vee(a[p]), vb = vee(b[p]), vp = vee(phi[p]);
    for (int c = 0; c < 3; ++c) {
      channels[c][p] = va[c];
      channels[3 + c][p] = vb[c];
      channels[6 + c][p] = vp[c];
    }
  }
  const int refine = std::max(PeriodicInterpolator::refine_for(g.nx(), refine_target),
                              PeriodicInterpolator::refine_for(g.ny(), refine_target));
  interp_ = PeriodicInterpolator(g.nx(), g.ny(), g.lx(), g.ly(), channels, refine);
}

Mat3 PairEvaluator::operator()(double x, double y, double theta) const {
  double v[9];
  interp_.eval(x, y, v);
  const double c = std::cos(theta), s = std::sin(theta);
  return hat(Vec3(c * v[0] + s * v[3] + v[6], c * v[1] + s * v[4] + v[7], c * v[2] + s * v[5] + v[8]));
}

// ---- transport -------------------------------------------------------------------

CocycleResult transport(const Pair& pair, const SMPoint& p0, double T, const TransportOptions& opt) {
  const PairEvaluator eval(pair.A, pair.Phi, opt.refine_target);
  return transport(eval, pair.metric(), p0, T, opt);
}

CocycleResult transport(const PairEvaluator& eval, const TorusMetric& metric, const SMPoint& p0, double T,
                        const TransportOptions& opt) {
  const StepPlan plan = plan_steps(metric, T, opt.dt);
  const double h = plan.h;
  CocycleResult res;
  res.path.dt = h;
  res.path.t.reserve(plan.steps + 1);
  res.path.points.reserve(plan.steps + 1);
  res.C.reserve(plan.steps + 1);
  res.drift.reserve(plan.steps + 1);

  struct State {
    SMPoint p;
    Mat3 C;
  };
  auto rhs = [&](const State& s) {
    const auto v = geodesic_velocity(metric, s.p);
    const Mat3 M = eval(s.p.x, s.p.y, s.p.theta);
    return State{{v[0], v[1], v[2]}, -M * s.C};
  };
  auto axpy = [](const State& s, const State& k, double a) {
    return State{{s.p.x + a * k.p.x, s.p.y + a * k.p.y, s.p.theta + a * k.p.theta}, s.C + a * k.C};
  };

  State s{p0, Mat3::Identity()};
  auto record = [&](double t) {
    res.path.t.push_back(t);
    res.path.points.push_back(wrap(s.p, metric));
    res.C.push_back(s.C);
    const double d = orthogonality_drift(s.C);
    res.drift.push_back(d);
    res.max_drift = std::max(res.max_drift, d);
  };
  record(0.0);
  for (int n = 0; n < plan.steps; ++n) {
    const State k1 = rhs(s);
    const State k2 = rhs(axpy(s, k1, 0.5 * h));
    const State k3 = rhs(axpy(s, k2, 0.5 * h));
    const State k4 = rhs(axpy(s, k3, h));
    s.p.x += h / 6.0 * (k1.p.x + 2.0 * k2.p.x + 2.0 * k3.p.x + k4.p.x);
    s.p.y += h / 6.0 * (k1.p.y + 2.0 * k2.p.y + 2.0 * k3.p.y + k4.p.y);
    s.p.theta += h / 6.0 * (k1.p.theta + 2.0 * k2.p.theta + 2.0 * k3.p.theta + k4.p.theta);
    s.C += h / 6.0 * (k1.C + 2.0 * k2.C + 2.0 * k3.C + k4.C);
    if (opt.reproject_every > 0 && (n + 1) % opt.reproject_every == 0) s.C = project_to_rotation(s.C).matrix();
    record((n + 1) * h);
    if (res.drift.back() > opt.drift_tol) {
      throw Error(ErrorCode::non_orthogonal_drift,
                  "orthogonality drift " + fmt17(res.drift.back()) + " at t = " + fmt17((n + 1) * h));
    }
  }
  return res;
}

double triviality_residual(const Pair& pair, const CocycleResult& run, int stride) {
  if (!pair.trivializer) throw Error(ErrorCode::invalid_argument, "pair has no trivializer");
  return triviality_residual(TrigEvaluator(*pair.trivializer), run, stride);
}

double triviality_residual(const TrigEvaluator& u, const CocycleResult& run, int stride) {
  const SMPoint& p0 = run.path.points.front();
  const Mat3 u0inv = u(p0.x, p0.y, p0.theta).real().transpose();
  double worst = 0.0;
  const std::size_t n = run.C.size();
  for (std::size_t k = 0; k < n; k += std::max(1, stride)) {
    const SMPoint& p = run.path.points[k];
    worst = std::max(worst, (run.C[k] - u(p.x, p.y, p.theta).real() * u0inv).norm());
  }
  const SMPoint& p = run.path.points.back();
  worst = std::max(worst, (run.C.back() - u(p.x, p.y, p.theta).real() * u0inv).norm());
  return worst;
}

double holonomy_closed(const Pair& pair, const SMPoint& p0, double T, const TransportOptions& opt) {
  const CocycleResult run = transport(pair, p0, T, opt);
  const double miss = periodic_distance(run.path.points.back(), wrap(p0, pair.metric()), pair.metric());
  if (miss > 1e-8) throw Error(ErrorCode::not_closed, "geodesic misses its start by " + fmt17(miss));
  return (run.C.back() - Mat3::Identity()).norm();
}

// ---- field diagnostics ----------------------------------------------------------

double transport_residual_field(const Pair& pair) {
  if (!pair.trivializer) throw Error(ErrorCode::invalid_argument, "pair has no trivializer");
  return transport_residual_field(pair.A, pair.Phi, *pair.trivializer);
}

double transport_residual_field(const Connection& A, const Higgs& Phi, const FourierField& u) {
  const FourierField r = geodesic_derivative(u) + multiply(A.field() + Phi.field(), u);
  const double scale = l2_norm(u);
  return scale > 0.0 ? l2_norm(r) / scale : l2_norm(r);
}

std::vector<RecurrenceResidual> recurrence_residuals(const Connection& A, const Higgs& Phi, const FourierField& u) {
  const MetricPtr& g = u.metric_ptr();
  const int N = u.degree();
  const double scale = std::max(l2_norm(u), 1e-300);
  auto single = [&](int m) {
    FourierField f(g, std::abs(m));
    if (u.has_mode(m)) f.mode(m) = u.mode(m);
    return f;
  };
  std::vector<RecurrenceResidual> out;
  for (int m = -N - 1; m <= N + 1; ++m) {
    FourierField sum = mu_plus(single(m - 1), A) + mu_minus(single(m + 1), A) + multiply(Phi.field(), single(m));
    out.push_back({m, mode_norm(sum, m) / scale});
  }
  return out;
}

double max_recurrence_residual(const Connection& A, const Higgs& Phi, const FourierField& u) {
  double worst = 0.0;
  for (const auto& r : recurrence_residuals(A, Phi, u)) worst = std::max(worst, r.residual);
  return worst;
}

GaugeResult gauge_transform(const Pair& pair, const std::vector<Mat3>& r) {
  const MetricPtr& g = pair.A.field().metric_ptr();
  const FourierField rf = FourierField::base(g, r);
  const FourierField rt = rf.transpose();
  GaugeResult out;
  out.pair.A = Connection::project(rt * geodesic_derivative(rf) + rt * pair.A.field() * rf, &out.leak);
  out.pair.Phi = Higgs::project(rt * pair.Phi.field() * rf);
  if (pair.trivializer) out.pair.trivializer = rt * *pair.trivializer;
  return out;
}

namespace {

struct H0Terms {
  FourierField Hf, VXf, bracket;
};

H0Terms h0_terms(const FourierField& f) {
  const FourierField Xf = geodesic_derivative(f);
  return {horizontal_derivative(f), vertical(Xf), commutator(Xf, f)};
}

}  // namespace

FourierField psi_from_first_equation(const FourierField& u) {
  const FourierField f = u.transpose() * vertical(u);
  const H0Terms t = h0_terms(f);
  return -(t.Hf + t.VXf - t.bracket);
}

H0Residuals h0_residuals(const FourierField& u, const Higgs& Phi) {
  return h0_residuals(u, u.transpose() * Phi.field() * u);
}

H0Residuals h0_residuals(const FourierField& u, const FourierField& Psi) {
  const FourierField f = u.transpose() * vertical(u);
  const H0Terms t = h0_terms(f);
  const FourierField first = t.Hf + t.VXf - t.bracket + Psi;
  const FourierField second = vertical(Psi) + commutator(f, Psi);
  // |u| keeps the scale away from roundoff when f is constant or zero
  const double scale = l2_norm(t.Hf) + l2_norm(t.VXf) + l2_norm(t.bracket) + l2_norm(Psi) + l2_norm(u);
  if (scale == 0.0) return {l2_norm(first), l2_norm(second)};
  return {l2_norm(first) / scale, l2_norm(second) / scale};
}

void write_csv(std::ostream& out, const CocycleResult& run) {
  out << "t,c00,c01,c02,c10,c11,c12,c20,c21,c22,drift\n";
  for (std::size_t k = 0; k < run.C.size(); ++k) {
    out << fmt17(run.path.t[k]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out << ',' << fmt17(run.C[k](i, j));
    out << ',' << fmt17(run.drift[k]) << '\n';
  }
}

}  // namespace tpair
