#include "tpair/torus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "tpair/error.hpp"

namespace tpair {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double trig(Trig t, double arg) { return t == Trig::cos ? std::cos(arg) : std::sin(arg); }

double wrap_into(double v, double period) {
  double r = std::fmod(v, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

double periodic_gap(double a, double b, double period) {
  const double d = wrap_into(a - b, period);
  return std::min(d, period - d);
}
}  // namespace

MetricPtr TorusMetric::build(const MetricSpec& spec) {
  if (spec.nx < 16 || spec.ny < 16) throw Error(ErrorCode::invalid_argument, "grid sizes must be >= 16");
  if (!(spec.lx > 0.0) || !(spec.ly > 0.0)) throw Error(ErrorCode::invalid_argument, "periods must be positive");
  std::vector<double> lambda(static_cast<std::size_t>(spec.nx) * spec.ny, 0.0);
  for (int j = 0; j < spec.ny; ++j) {
    const double y = j * spec.ly / spec.ny;
    for (int i = 0; i < spec.nx; ++i) {
      const double x = i * spec.lx / spec.nx;
      double v = 0.0;
      for (const auto& h : spec.lambda)
        v += h.amplitude * trig(h.x_trig, kTwoPi * h.kx * x / spec.lx) * trig(h.y_trig, kTwoPi * h.ky * y / spec.ly);
      lambda[static_cast<std::size_t>(j) * spec.nx + i] = v;
    }
  }
  return from_grid(spec.nx, spec.ny, spec.lx, spec.ly, std::move(lambda));
}

MetricPtr TorusMetric::from_grid(int nx, int ny, double lx, double ly, std::vector<double> lambda) {
  if (nx < 16 || ny < 16) throw Error(ErrorCode::invalid_argument, "grid sizes must be >= 16");
  if (lambda.size() != static_cast<std::size_t>(nx) * ny)
    throw Error(ErrorCode::invalid_argument, "lambda grid has wrong size");
  std::shared_ptr<TorusMetric> m(new TorusMetric());
  m->nx_ = nx;
  m->ny_ = ny;
  m->lx_ = lx;
  m->ly_ = ly;
  m->lambda_ = std::move(lambda);
  m->spectral_ = std::make_shared<Spectral2D>(nx, ny, lx, ly);
  const auto& fft = *m->spectral_;
  const std::size_t n = m->size();

  std::vector<Complex> spec(n);
  for (std::size_t p = 0; p < n; ++p) spec[p] = m->lambda_[p];
  fft.forward(spec.data(), spec.data(), 1);
  double nyquist = 0.0, largest = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double a = std::abs(spec[m->index(i, j)]) / static_cast<double>(n);
      largest = std::max(largest, a);
      if (2 * i == nx || 2 * j == ny) nyquist = std::max(nyquist, a);
    }
  if (nyquist > kNyquistTol)
    throw Error(ErrorCode::non_smooth_lambda, "Nyquist coefficient " + std::to_string(nyquist) + " exceeds tolerance");

  const double cutoff = 1e-15 * std::max(1.0, largest);
  std::vector<Harmonic> sparse;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Complex c = spec[m->index(i, j)] / static_cast<double>(n);
      if (std::abs(c) > cutoff) sparse.push_back({fft.kx(i), fft.ky(j), c});
    }

  auto derivative = [&](Derivative d) {
    std::vector<Complex> in(n), out(n);
    for (std::size_t p = 0; p < n; ++p) in[p] = m->lambda_[p];
    fft.apply(d, in.data(), out.data(), 1);
    std::vector<double> r(n);
    for (std::size_t p = 0; p < n; ++p) r[p] = out[p].real();
    return r;
  };
  m->lambda_x_ = derivative(Derivative::dx);
  m->lambda_y_ = derivative(Derivative::dy);
  const std::vector<double> lap = derivative(Derivative::laplacian);

  m->curvature_.resize(n);
  m->exp_lambda_.resize(n);
  m->exp_minus_lambda_.resize(n);
  m->area_weight_.resize(n);
  double slope = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double e = std::exp(m->lambda_[p]);
    m->exp_lambda_[p] = e;
    m->exp_minus_lambda_[p] = 1.0 / e;
    m->curvature_[p] = -lap[p] / (e * e);
    m->area_weight_[p] = e * e * m->hx() * m->hy();
    slope = std::max({slope, std::abs(m->lambda_x_[p]), std::abs(m->lambda_y_[p])});
  }
  m->flat_ = slope == 0.0 || (sparse.size() <= 1);

  if (sparse.size() <= kMaxExactLambdaModes) {
    m->sparse_ = std::move(sparse);
  } else {
    const int r = PeriodicInterpolator::refine_for(std::max(nx, ny));
    m->fallback_ = PeriodicInterpolator(nx, ny, lx, ly, {m->lambda_, m->lambda_x_, m->lambda_y_}, r, 8);
  }
  return m;
}

double TorusMetric::area() const {
  double a = 0.0;
  for (double w : area_weight_) a += w;
  return a;
}

LambdaSample TorusMetric::lambda_at(double x, double y) const {
  LambdaSample s;
  if (!sparse_.empty() || fallback_.empty()) {
    const Complex i(0.0, 1.0);
    for (const auto& h : sparse_) {
      const Complex e = h.coefficient * std::exp(i * (h.kx * x + h.ky * y));
      s.value += e.real();
      s.dx += (i * h.kx * e).real();
      s.dy += (i * h.ky * e).real();
    }
    return s;
  }
  double out[3];
  fallback_.eval(x, y, out);
  return {out[0], out[1], out[2]};
}

bool TorusMetric::same_as(const TorusMetric& o) const {
  return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_ &&
         std::memcmp(lambda_.data(), o.lambda_.data(), lambda_.size() * sizeof(double)) == 0;
}

SMPoint wrap(const SMPoint& p, const TorusMetric& metric) {
  return {wrap_into(p.x, metric.lx()), wrap_into(p.y, metric.ly()), wrap_into(p.theta, kTwoPi)};
}

double periodic_distance(const SMPoint& a, const SMPoint& b, const TorusMetric& metric) {
  return std::max({periodic_gap(a.x, b.x, metric.lx()), periodic_gap(a.y, b.y, metric.ly()),
                   periodic_gap(a.theta, b.theta, kTwoPi)});
}

std::array<double, 3> geodesic_velocity(const TorusMetric& metric, const SMPoint& p) {
  const LambdaSample l = metric.lambda_at(p.x, p.y);
  const double e = std::exp(-l.value);
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  return {e * c, e * s, e * (-l.dx * s + l.dy * c)};
}

StepPlan plan_steps(const TorusMetric& metric, double T, double dt) {
  const double limit = 1e-2 * std::min(metric.lx(), metric.ly());
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be positive");
  if (dt > limit * (1.0 + 1e-12))
    throw Error(ErrorCode::step_too_large, "dt = " + std::to_string(dt) + " exceeds " + std::to_string(limit));
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(T) / dt - 1e-9)));
  return {steps, T / steps};
}

GeodesicPath integrate_geodesic(const TorusMetric& metric, const SMPoint& p0, double T, double dt) {
  const StepPlan plan = plan_steps(metric, T, dt);
  GeodesicPath path;
  path.dt = plan.h;
  path.t.reserve(plan.steps + 1);
  path.points.reserve(plan.steps + 1);
  SMPoint p = p0;
  path.t.push_back(0.0);
  path.points.push_back(wrap(p, metric));
  auto shifted = [](const SMPoint& q, const std::array<double, 3>& k, double a) {
    return SMPoint{q.x + a * k[0], q.y + a * k[1], q.theta + a * k[2]};
  };
  const double h = plan.h;
  for (int n = 0; n < plan.steps; ++n) {
    const auto k1 = geodesic_velocity(metric, p);
    const auto k2 = geodesic_velocity(metric, shifted(p, k1, 0.5 * h));
    const auto k3 = geodesic_velocity(metric, shifted(p, k2, 0.5 * h));
    const auto k4 = geodesic_velocity(metric, shifted(p, k3, h));
    p.x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    p.y += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    p.theta += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
    path.t.push_back((n + 1) * h);
    path.points.push_back(wrap(p, metric));
  }
  return path;
}

}  // namespace tpair
