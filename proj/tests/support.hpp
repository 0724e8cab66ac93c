#pragma once

// Hand-rolled generators shared by the test binaries.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tpair/backlund.hpp"
#include "tpair/smfield.hpp"

namespace tpair::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec(Rng& rng) { return Vec3(uniform(rng), uniform(rng), uniform(rng)); }

inline Mat3C random_mat(Rng& rng) {
  Mat3C m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = Complex(uniform(rng), uniform(rng));
  return m;
}

/// Random trigonometric polynomial grid with wave numbers |k| <= kmax.
inline std::vector<double> random_scalar(Rng& rng, const TorusMetric& g, int kmax, double amp = 1.0) {
  std::vector<double> out(g.size(), 0.0);
  const double tx = 2.0 * std::numbers::pi / g.lx(), ty = 2.0 * std::numbers::pi / g.ly();
  for (int kx = -kmax; kx <= kmax; ++kx)
    for (int ky = 0; ky <= kmax; ++ky) {
      const double c = amp * uniform(rng) / (1 + kx * kx + ky * ky), ph = uniform(rng, 0, 6.3);
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) out[g.index(i, j)] += c * std::cos(tx * kx * g.x(i) + ty * ky * g.y(j) + ph);
    }
  return out;
}

/// Random band-limited complex matrix grid.
inline MatGrid random_grid(Rng& rng, const TorusMetric& g, int kmax, double amp = 1.0) {
  MatGrid out(g.size(), Mat3C::Zero());
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const auto re = random_scalar(rng, g, kmax, amp);
      const auto im = random_scalar(rng, g, kmax, amp);
      for (std::size_t p = 0; p < out.size(); ++p) out[p](r, c) = Complex(re[p], im[p]);
    }
  return out;
}

inline std::vector<Mat3> random_so3_grid(Rng& rng, const TorusMetric& g, int kmax, double amp = 1.0) {
  std::vector<Mat3> out(g.size());
  const auto x = random_scalar(rng, g, kmax, amp), y = random_scalar(rng, g, kmax, amp),
             z = random_scalar(rng, g, kmax, amp);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = hat(Vec3(x[p], y[p], z[p]));
  return out;
}

inline FourierField random_field(Rng& rng, const MetricPtr& g, int degree, int kmax) {
  FourierField f(g, degree);
  for (int m = -degree; m <= degree; ++m) f.mode(m) = random_grid(rng, *g, kmax);
  return f;
}

inline Connection random_connection(Rng& rng, const MetricPtr& g, int kmax, double amp) {
  return Connection::from_coefficients(g, random_so3_grid(rng, *g, kmax, amp), random_so3_grid(rng, *g, kmax, amp));
}

inline MetricPtr metric_cos(int n, double eps, double lx = 1.0, double ly = 1.0) {
  MetricSpec spec{n, n, lx, ly, {}};
  if (eps != 0.0) spec.lambda.push_back({eps, 1, 0, Trig::cos, Trig::cos});
  return TorusMetric::build(spec);
}

/// Two-harmonic conformal factor used for generic non-flat tests.
inline MetricPtr metric_generic(int n, double eps = 0.1) {
  MetricSpec spec{n, n, 1.0, 1.0, {}};
  spec.lambda.push_back({eps, 1, 0, Trig::cos, Trig::cos});
  spec.lambda.push_back({0.5 * eps, 1, 1, Trig::sin, Trig::cos});
  return TorusMetric::build(spec);
}

/// One certified step from the trivial pair with a constant section.
inline BacklundCertificate constant_step(const MetricPtr& g, const Vec3& axis = Vec3(0.3, -0.5, 0.8)) {
  return backlund_transform(trivial_pair(g), UnitSection::constant(g, axis));
}

/// One certified step from the trivial pair with the default factory section.
inline BacklundCertificate factory_step(const MetricPtr& g) {
  return backlund_transform(trivial_pair(g), holomorphic_g_factory(g, default_factory_spec(*g)));
}

/// Pointwise rotation grid exp(hat(w)) for a band-limited generator w.
inline std::vector<Mat3> random_rotation_grid(Rng& rng, const TorusMetric& g, int kmax, double amp) {
  const auto w = random_so3_grid(rng, g, kmax, amp);
  std::vector<Mat3> out(w.size());
  for (std::size_t p = 0; p < w.size(); ++p) out[p] = so3_exp(So3::from_matrix(w[p])).matrix();
  return out;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace tpair::testing
