#include "tpair/smfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fftw3.h>

#include "tpair/error.hpp"
#include "tpair/spectral.hpp"

namespace tpair {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

MatGrid zero_grid(std::size_t n) { return MatGrid(n, Mat3C::Zero()); }

}  // namespace

MatGrid grid_derivative(const TorusMetric& metric, Derivative d, const MatGrid& grid) {
  static_assert(sizeof(Mat3C) == 9 * sizeof(Complex), "Mat3C must be densely packed");
  MatGrid out(grid.size());
  metric.spectral().apply(d, reinterpret_cast<const Complex*>(grid.data()),
                          reinterpret_cast<Complex*>(out.data()), 9);
  return out;
}

// ---- FourierField ------------------------------------------------------------

FourierField::FourierField(MetricPtr metric, int degree) : metric_(std::move(metric)), degree_(degree) {
  if (!metric_) throw Error(ErrorCode::invalid_argument, "field without metric");
  if (degree < 0) throw Error(ErrorCode::invalid_argument, "negative degree");
  modes_.assign(2 * degree + 1, zero_grid(metric_->size()));
}

FourierField FourierField::constant(MetricPtr metric, const Mat3C& value) {
  FourierField f(std::move(metric), 0);
  std::fill(f.modes_[0].begin(), f.modes_[0].end(), value);
  return f;
}

FourierField FourierField::base(MetricPtr metric, MatGrid grid) {
  FourierField f(std::move(metric), 0);
  if (grid.size() != f.points()) throw Error(ErrorCode::invalid_argument, "grid size mismatch");
  f.modes_[0] = std::move(grid);
  return f;
}

FourierField FourierField::base(MetricPtr metric, const std::vector<Mat3>& grid) {
  MatGrid g(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) g[p] = grid[p].cast<Complex>();
  return base(std::move(metric), std::move(g));
}

MatGrid& FourierField::mode(int m) {
  if (!has_mode(m)) throw Error(ErrorCode::invalid_argument, "mode out of range");
  return modes_[m + degree_];
}

const MatGrid& FourierField::mode(int m) const {
  if (!has_mode(m)) throw Error(ErrorCode::invalid_argument, "mode out of range");
  return modes_[m + degree_];
}

FourierField FourierField::with_degree(int degree) const {
  FourierField out(metric_, degree);
  for (int m = -std::min(degree, degree_); m <= std::min(degree, degree_); ++m) out.mode(m) = mode(m);
  return out;
}

FourierField FourierField::only_modes(std::initializer_list<int> modes) const {
  FourierField out(metric_, degree_);
  for (int m : modes)
    if (has_mode(m)) out.mode(m) = mode(m);
  return out;
}

FourierField FourierField::transpose() const {
  FourierField out(metric_, degree_);
  for (std::size_t k = 0; k < modes_.size(); ++k)
    for (std::size_t p = 0; p < points(); ++p) out.modes_[k][p] = modes_[k][p].transpose();
  return out;
}

FourierField FourierField::conj() const {
  FourierField out(metric_, degree_);
  for (int m = -degree_; m <= degree_; ++m) {
    const MatGrid& src = mode(-m);
    MatGrid& dst = out.mode(m);
    for (std::size_t p = 0; p < points(); ++p) dst[p] = src[p].conjugate();
  }
  return out;
}

Mat3C FourierField::at(std::size_t point, double theta) const {
  Mat3C v = Mat3C::Zero();
  for (int m = -degree_; m <= degree_; ++m) v += mode(m)[point] * std::polar(1.0, m * theta);
  return v;
}

void FourierField::check_compatible(const FourierField& o) const {
  if (metric_ != o.metric_ && !metric_->same_as(*o.metric_))
    throw Error(ErrorCode::invalid_argument, "fields live on different metrics");
}

FourierField& FourierField::operator+=(const FourierField& o) {
  check_compatible(o);
  if (o.degree_ > degree_) *this = with_degree(o.degree_);
  for (int m = -o.degree_; m <= o.degree_; ++m) {
    MatGrid& dst = mode(m);
    const MatGrid& src = o.mode(m);
    for (std::size_t p = 0; p < points(); ++p) dst[p] += src[p];
  }
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& o) {
  check_compatible(o);
  if (o.degree_ > degree_) *this = with_degree(o.degree_);
  for (int m = -o.degree_; m <= o.degree_; ++m) {
    MatGrid& dst = mode(m);
    const MatGrid& src = o.mode(m);
    for (std::size_t p = 0; p < points(); ++p) dst[p] -= src[p];
  }
  return *this;
}

FourierField& FourierField::operator*=(Complex s) {
  for (auto& grid : modes_)
    for (auto& v : grid) v *= s;
  return *this;
}

FourierField FourierField::operator-() const {
  FourierField out = *this;
  out *= -1.0;
  return out;
}

// ---- algebra -------------------------------------------------------------------

FourierField multiply(const FourierField& u, const FourierField& v) {
  FourierField out(u.metric_ptr(), u.degree() + v.degree());
  const std::size_t n = u.points();
  for (int k = -u.degree(); k <= u.degree(); ++k) {
    const MatGrid& uk = u.mode(k);
    for (int l = -v.degree(); l <= v.degree(); ++l) {
      const MatGrid& vl = v.mode(l);
      MatGrid& dst = out.mode(k + l);
      for (std::size_t p = 0; p < n; ++p) dst[p].noalias() += uk[p] * vl[p];
    }
  }
  return out;
}

FourierField commutator(const FourierField& u, const FourierField& v) { return multiply(u, v) - multiply(v, u); }

FourierField scale_by(const FourierField& u, const std::vector<double>& s) {
  FourierField out = u;
  for (int m = -u.degree(); m <= u.degree(); ++m) {
    MatGrid& g = out.mode(m);
    for (std::size_t p = 0; p < g.size(); ++p) g[p] *= s[p];
  }
  return out;
}

Complex l2_inner(const FourierField& u, const FourierField& v) {
  const auto& w = u.metric().area_weight();
  const int d = std::min(u.degree(), v.degree());
  Complex sum = 0.0;
  for (int m = -d; m <= d; ++m) {
    const MatGrid& a = u.mode(m);
    const MatGrid& b = v.mode(m);
    for (std::size_t p = 0; p < a.size(); ++p) sum += (a[p].array() * b[p].conjugate().array()).sum() * w[p];
  }
  return kTwoPi * sum;
}

double mode_norm(const FourierField& u, int m) {
  if (!u.has_mode(m)) return 0.0;
  const auto& w = u.metric().area_weight();
  const MatGrid& a = u.mode(m);
  double sum = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) sum += a[p].squaredNorm() * w[p];
  return std::sqrt(kTwoPi * sum);
}

double l2_norm(const FourierField& u) { return norm_beyond(u, -1); }

double norm_beyond(const FourierField& u, int keep) {
  double sum = 0.0;
  for (int m = -u.degree(); m <= u.degree(); ++m) {
    if (std::abs(m) <= keep) continue;
    const double n = mode_norm(u, m);
    sum += n * n;
  }
  return std::sqrt(sum);
}

double norm_outside(const FourierField& u, std::initializer_list<int> modes) {
  double sum = 0.0;
  for (int m = -u.degree(); m <= u.degree(); ++m) {
    if (std::find(modes.begin(), modes.end(), m) != modes.end()) continue;
    const double n = mode_norm(u, m);
    sum += n * n;
  }
  return std::sqrt(sum);
}

double max_abs(const FourierField& u) {
  double best = 0.0;
  for (int m = -u.degree(); m <= u.degree(); ++m)
    for (const auto& v : u.mode(m)) best = std::max(best, v.norm());
  return best;
}

double reality_residual(const FourierField& u) {
  double best = 0.0;
  for (int m = 0; m <= u.degree(); ++m) {
    const MatGrid& a = u.mode(m);
    const MatGrid& b = u.mode(-m);
    for (std::size_t p = 0; p < a.size(); ++p) best = std::max(best, (b[p] - a[p].conjugate()).norm());
  }
  return best;
}

// Mode-wise antisymmetry is equivalent to antisymmetry of every sample.
double antisymmetry_residual(const FourierField& u) {
  double best = 0.0;
  for (int m = -u.degree(); m <= u.degree(); ++m)
    for (const auto& v : u.mode(m)) best = std::max(best, (v + v.transpose()).norm());
  return best;
}

double orthogonality_residual(const FourierField& u, int theta_samples) {
  const int n = theta_samples > 0 ? theta_samples : 4 * u.degree() + 4;
  double best = 0.0;
  for (int k = 0; k < n; ++k) {
    const double theta = kTwoPi * k / n;
    for (std::size_t p = 0; p < u.points(); ++p) {
      const Mat3C v = u.at(p, theta);
      const Mat3 r = v.real();
      best = std::max({best, (r.transpose() * r - Mat3::Identity()).norm(), std::abs(r.determinant() - 1.0),
                       v.imag().norm()});
    }
  }
  return best;
}

// ---- frame operators ---------------------------------------------------------------

FourierField vertical(const FourierField& u) {
  FourierField out = u;
  for (int m = -u.degree(); m <= u.degree(); ++m) {
    const Complex s(0.0, m);
    for (auto& v : out.mode(m)) v *= s;
  }
  return out;
}

// Product-rule forms: eta_- = e^{-lambda}(dbar h + m (dbar lambda) h) and
// eta_+ = e^{-lambda}(d h - m (d lambda) h); spectrally exact on band-limited h.
FourierField eta_minus(const FourierField& u) {
  const TorusMetric& g = u.metric();
  FourierField out(u.metric_ptr(), u.degree() + 1);
  const auto& lx = g.lambda_x();
  const auto& ly = g.lambda_y();
  const auto& em = g.exp_minus_lambda();
  for (int m = -u.degree(); m <= u.degree(); ++m) {
    const MatGrid& h = u.mode(m);
    MatGrid dh = grid_derivative(g, Derivative::dzbar, h);
    MatGrid& dst = out.mode(m - 1);
    for (std::size_t p = 0; p < h.size(); ++p) {
      const Complex dbar_lambda(0.5 * lx[p], 0.5 * ly[p]);
      dst[p] = em[p] * (dh[p] + (static_cast<double>(m) * dbar_lambda) * h[p]);
    }
  }
  return out;
}

FourierField eta_plus(const FourierField& u) {
  const TorusMetric& g = u.metric();
  FourierField out(u.metric_ptr(), u.degree() + 1);
  const auto& lx = g.lambda_x();
  const auto& ly = g.lambda_y();
  const auto& em = g.exp_minus_lambda();
  for (int m = -u.degree(); m <= u.degree(); ++m) {
    const MatGrid& h = u.mode(m);
    MatGrid dh = grid_derivative(g, Derivative::dz, h);
    MatGrid& dst = out.mode(m + 1);
    for (std::size_t p = 0; p < h.size(); ++p) {
      const Complex d_lambda(0.5 * lx[p], -0.5 * ly[p]);
      dst[p] = em[p] * (dh[p] - (static_cast<double>(m) * d_lambda) * h[p]);
    }
  }
  return out;
}

FourierField geodesic_derivative(const FourierField& u) { return eta_plus(u) + eta_minus(u); }

FourierField horizontal_derivative(const FourierField& u) { return kI * (eta_plus(u) - eta_minus(u)); }

// ---- connections and Higgs fields ----------------------------------------------------

Connection Connection::zero(MetricPtr metric) { return Connection(FourierField(std::move(metric), 1)); }

Connection Connection::from_coefficients(MetricPtr metric, const std::vector<Mat3>& a, const std::vector<Mat3>& b) {
  FourierField f(std::move(metric), 1);
  if (a.size() != f.points() || b.size() != f.points())
    throw Error(ErrorCode::invalid_argument, "connection coefficient grid size mismatch");
  MatGrid& plus = f.mode(1);
  MatGrid& minus = f.mode(-1);
  for (std::size_t p = 0; p < a.size(); ++p) {
    const Mat3 as = 0.5 * (a[p] - a[p].transpose());
    const Mat3 bs = 0.5 * (b[p] - b[p].transpose());
    plus[p] = 0.5 * (as.cast<Complex>() - kI * bs.cast<Complex>());
    minus[p] = plus[p].conjugate();
  }
  return Connection(std::move(f));
}

Connection Connection::project(const FourierField& f, Projection* report) {
  FourierField out(f.metric_ptr(), 1);
  if (f.has_mode(1)) {
    const MatGrid& plus = f.mode(1);
    const MatGrid& minus = f.mode(-1);
    for (std::size_t p = 0; p < f.points(); ++p) {
      const Mat3C real = 0.5 * (plus[p] + minus[p].conjugate());
      out.mode(1)[p] = 0.5 * (real - real.transpose());
      out.mode(-1)[p] = out.mode(1)[p].conjugate();
    }
  }
  if (report) {
    const double total = l2_norm(f);
    report->mode_leak = total > 0.0 ? norm_outside(f, {-1, 1}) / total : 0.0;
    report->reality = f.has_mode(1) ? reality_residual(f.only_modes({-1, 1})) : 0.0;
    report->antisymmetry = f.has_mode(1) ? antisymmetry_residual(f.only_modes({-1, 1})) : 0.0;
  }
  return Connection(std::move(out));
}

std::vector<Mat3> Connection::a() const {
  std::vector<Mat3> out(field_.points());
  const MatGrid& plus = field_.mode(1);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = 2.0 * plus[p].real();
  return out;
}

std::vector<Mat3> Connection::b() const {
  std::vector<Mat3> out(field_.points());
  const MatGrid& plus = field_.mode(1);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = -2.0 * plus[p].imag();
  return out;
}

Higgs Higgs::zero(MetricPtr metric) { return Higgs(FourierField(std::move(metric), 0)); }

Higgs Higgs::from_grid(MetricPtr metric, const std::vector<Mat3>& values) {
  std::vector<Mat3> anti(values.size());
  for (std::size_t p = 0; p < values.size(); ++p) anti[p] = 0.5 * (values[p] - values[p].transpose());
  return Higgs(FourierField::base(std::move(metric), anti));
}

Higgs Higgs::project(const FourierField& f, Projection* report) {
  FourierField out(f.metric_ptr(), 0);
  const MatGrid& zero = f.mode(0);
  for (std::size_t p = 0; p < f.points(); ++p) {
    const Mat3 r = zero[p].real();
    out.mode(0)[p] = (0.5 * (r - r.transpose())).cast<Complex>();
  }
  if (report) {
    const double total = l2_norm(f);
    report->mode_leak = total > 0.0 ? norm_outside(f, {0}) / total : 0.0;
    report->reality = reality_residual(f.only_modes({0}).with_degree(0));
    report->antisymmetry = antisymmetry_residual(f.only_modes({0}).with_degree(0));
  }
  return Higgs(std::move(out));
}

std::vector<Mat3> Higgs::values() const {
  std::vector<Mat3> out(field_.points());
  const MatGrid& zero = field_.mode(0);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = zero[p].real();
  return out;
}

Pair trivial_pair(MetricPtr metric) {
  Pair pair{Connection::zero(metric), Higgs::zero(metric), FourierField::identity(metric)};
  return pair;
}

std::pair<FourierField, FourierField> decompose_connection(const Connection& A) {
  return {A.field().only_modes({1}), A.field().only_modes({-1})};
}

FourierField mu_plus(const FourierField& u, const Connection& A) {
  return eta_plus(u) + multiply(A.field().only_modes({1}), u);
}

FourierField mu_minus(const FourierField& u, const Connection& A) {
  return eta_minus(u) + multiply(A.field().only_modes({-1}), u);
}

Connection hodge_star(const Connection& A) { return Connection::project(-vertical(A.field())); }

FourierField hodge_star(const FourierField& form) { return -vertical(form); }

FourierField covariant_derivative(const FourierField& g, const Connection& A) {
  return geodesic_derivative(g) + commutator(A.field(), g);
}

DbarResult dbar_A(const FourierField& f, const Connection& A) {
  DbarResult r;
  r.value = eta_minus(f).only_modes({-1}) + commutator(A.field().only_modes({-1}), f);
  const FourierField dA = covariant_derivative(f, A);
  const FourierField other = 0.5 * (dA - kI * hodge_star(dA));
  const FourierField gap = other - r.value;
  const double scale = std::max(l2_norm(r.value), l2_norm(other));
  r.formula_gap = scale > 0.0 ? l2_norm(gap) / scale : 0.0;
  return r;
}

// star F = e^{-lambda}(b_x + lambda_x b - a_y - lambda_y a) + [a, b]
FourierField star_curvature(const Connection& A) {
  const TorusMetric& g = A.metric();
  const std::vector<Mat3> a = A.a();
  const std::vector<Mat3> b = A.b();
  MatGrid ac(a.size()), bc(b.size());
  for (std::size_t p = 0; p < a.size(); ++p) {
    ac[p] = a[p].cast<Complex>();
    bc[p] = b[p].cast<Complex>();
  }
  const MatGrid bx = grid_derivative(g, Derivative::dx, bc);
  const MatGrid ay = grid_derivative(g, Derivative::dy, ac);
  const auto& lx = g.lambda_x();
  const auto& ly = g.lambda_y();
  const auto& em = g.exp_minus_lambda();
  std::vector<Mat3> out(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) {
    const Mat3 d = bx[p].real() + lx[p] * b[p] - ay[p].real() - ly[p] * a[p];
    out[p] = em[p] * d + (a[p] * b[p] - b[p] * a[p]);
  }
  return FourierField::base(A.field().metric_ptr(), out);
}

EnergyIdentity energy_identity(const FourierField& u, int m, const Connection& A) {
  EnergyIdentity e;
  e.plus_sq = std::pow(l2_norm(mu_plus(u, A)), 2);
  e.minus_sq = std::pow(l2_norm(mu_minus(u, A)), 2);
  const FourierField F = star_curvature(A);
  const FourierField Fu = kI * multiply(F, u);
  const FourierField Ku = static_cast<double>(m) * scale_by(u, u.metric().curvature());
  e.rhs = 0.5 * l2_inner(Fu - Ku, u).real();
  // Cauchy-Schwarz bounds of both curvature terms: they cancel pointwise when
  // u is fibre-flat, and then both sides of the identity are roundoff
  const double scale =
      e.plus_sq + e.minus_sq + std::abs(e.rhs) + 0.5 * (l2_norm(Fu) + l2_norm(Ku)) * l2_norm(u);
  e.relative_residual = scale > 0.0 ? std::abs(e.plus_sq - e.minus_sq - e.rhs) / scale : 0.0;
  return e;
}

// ---- sampled representation --------------------------------------------------------

SampledField sample(const FourierField& u, int n_theta) {
  SampledField s{u.metric_ptr(), std::vector<MatGrid>(n_theta, zero_grid(u.points()))};
  for (int k = 0; k < n_theta; ++k) {
    const double theta = kTwoPi * k / n_theta;
    for (int m = -u.degree(); m <= u.degree(); ++m) {
      const Complex e = std::polar(1.0, m * theta);
      const MatGrid& src = u.mode(m);
      for (std::size_t p = 0; p < src.size(); ++p) s.slices[k][p] += e * src[p];
    }
  }
  return s;
}

FourierField unsample(const SampledField& s, int degree) {
  FourierField u(s.metric, degree);
  const int n = s.n_theta();
  if (n < 2 * degree + 1) throw Error(ErrorCode::sampling_too_coarse, "too few theta samples to unsample");
  for (int m = -degree; m <= degree; ++m) {
    MatGrid& dst = u.mode(m);
    for (int k = 0; k < n; ++k) {
      const Complex e = std::polar(1.0 / n, -m * kTwoPi * k / n);
      for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += e * s.slices[k][p];
    }
  }
  return u;
}

namespace {

// d/dtheta of equispaced samples by a batched FFT along theta; the Nyquist
// mode of an even sample count is dropped.
std::vector<MatGrid> theta_derivative(const SampledField& s) {
  const int n = s.n_theta();
  const std::size_t np = s.metric->size();
  const std::size_t stride = np * 9;
  std::vector<Complex> buf(stride * n);
  for (int k = 0; k < n; ++k)
    std::copy_n(reinterpret_cast<const Complex*>(s.slices[k].data()), stride, buf.data() + k * stride);
  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(fftw_planner_mutex());
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    const int dims[1] = {n};
    fwd = fftw_plan_many_dft(1, dims, static_cast<int>(stride), data, nullptr, static_cast<int>(stride), 1, data,
                             nullptr, static_cast<int>(stride), 1, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_many_dft(1, dims, static_cast<int>(stride), data, nullptr, static_cast<int>(stride), 1, data,
                             nullptr, static_cast<int>(stride), 1, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  for (int k = 0; k < n; ++k) {
    const int m = k <= n / 2 ? k : k - n;
    const Complex symbol = (2 * k == n) ? Complex(0.0) : Complex(0.0, static_cast<double>(m) / n);
    for (std::size_t q = 0; q < stride; ++q) buf[k * stride + q] *= symbol;
  }
  fftw_execute(bwd);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  std::vector<MatGrid> out(n, MatGrid(np));
  for (int k = 0; k < n; ++k)
    std::copy_n(buf.data() + k * stride, stride, reinterpret_cast<Complex*>(out[k].data()));
  return out;
}

}  // namespace

SampledField frame_apply(FrameField w, const SampledField& s) {
  const TorusMetric& g = *s.metric;
  const int n = s.n_theta();
  const std::size_t np = g.size();
  std::vector<MatGrid> dtheta = theta_derivative(s);

  SampledField out{s.metric, std::vector<MatGrid>(n, zero_grid(np))};
  if (w == FrameField::V) {
    out.slices = std::move(dtheta);
    return out;
  }
  const auto& lx = g.lambda_x();
  const auto& ly = g.lambda_y();
  const auto& em = g.exp_minus_lambda();
  for (int k = 0; k < n; ++k) {
    const double theta = kTwoPi * k / n;
    const double c = std::cos(theta), sn = std::sin(theta);
    const MatGrid ux = grid_derivative(g, Derivative::dx, s.slices[k]);
    const MatGrid uy = grid_derivative(g, Derivative::dy, s.slices[k]);
    for (std::size_t p = 0; p < np; ++p) {
      if (w == FrameField::X) {
        out.slices[k][p] = em[p] * (c * ux[p] + sn * uy[p] + (-lx[p] * sn + ly[p] * c) * dtheta[k][p]);
      } else {
        out.slices[k][p] = em[p] * (-sn * ux[p] + c * uy[p] - (lx[p] * c + ly[p] * sn) * dtheta[k][p]);
      }
    }
  }
  return out;
}

}  // namespace tpair
