#include "tpair/spectral.hpp"

#include <algorithm>
#include <numbers>
#include <vector>

#include <fftw3.h>

namespace tpair {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {
std::mutex& planner_mutex() { return fftw_planner_mutex(); }

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

struct Spectral2D::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

Spectral2D::Spectral2D(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {}

Spectral2D::~Spectral2D() = default;

const Spectral2D::Plans& Spectral2D::plans(int channels) const {
  std::lock_guard lock(mutex_);
  auto it = plans_.find(channels);
  if (it != plans_.end()) return *it->second;
  auto p = std::make_unique<Plans>();
  {
    std::lock_guard planner(planner_mutex());
    std::vector<Complex> scratch(size() * channels);
    int n[2] = {ny_, nx_};
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p->forward = fftw_plan_many_dft(2, n, channels, as_fftw(scratch.data()), nullptr, channels, 1,
                                    as_fftw(scratch.data()), nullptr, channels, 1, FFTW_FORWARD, flags);
    p->backward = fftw_plan_many_dft(2, n, channels, as_fftw(scratch.data()), nullptr, channels, 1,
                                     as_fftw(scratch.data()), nullptr, channels, 1, FFTW_BACKWARD, flags);
  }
  const Plans& ref = *p;
  plans_.emplace(channels, std::move(p));
  return ref;
}

double Spectral2D::kx(int i, bool odd) const {
  if (odd && 2 * i == nx_) return 0.0;
  return 2.0 * std::numbers::pi / lx_ * signed_index_x(i);
}

double Spectral2D::ky(int j, bool odd) const {
  if (odd && 2 * j == ny_) return 0.0;
  return 2.0 * std::numbers::pi / ly_ * signed_index_y(j);
}

void Spectral2D::forward(const Complex* in, Complex* out, int channels) const {
  const auto& p = plans(channels);
  if (in != out) std::copy(in, in + size() * channels, out);
  fftw_execute_dft(p.forward, as_fftw(out), as_fftw(out));
}

void Spectral2D::backward(const Complex* in, Complex* out, int channels) const {
  const auto& p = plans(channels);
  if (in != out) std::copy(in, in + size() * channels, out);
  fftw_execute_dft(p.backward, as_fftw(out), as_fftw(out));
  const double scale = 1.0 / static_cast<double>(size());
  for (std::size_t k = 0; k < size() * channels; ++k) out[k] *= scale;
}

void Spectral2D::apply(Derivative d, const Complex* in, Complex* out, int channels) const {
  forward(in, out, channels);
  const Complex i(0.0, 1.0);
  for (int jy = 0; jy < ny_; ++jy) {
    for (int ix = 0; ix < nx_; ++ix) {
      Complex symbol;
      switch (d) {
        case Derivative::dx: symbol = i * kx(ix, true); break;
        case Derivative::dy: symbol = i * ky(jy, true); break;
        case Derivative::dz: symbol = 0.5 * (i * kx(ix, true) + ky(jy, true)); break;
        case Derivative::dzbar: symbol = 0.5 * (i * kx(ix, true) - ky(jy, true)); break;
        case Derivative::laplacian: {
          const double a = kx(ix), b = ky(jy);
          symbol = -(a * a + b * b);
          break;
        }
      }
      Complex* p = out + (static_cast<std::size_t>(jy) * nx_ + ix) * channels;
      for (int c = 0; c < channels; ++c) p[c] *= symbol;
    }
  }
  backward(out, out, channels);
}

}  // namespace tpair
