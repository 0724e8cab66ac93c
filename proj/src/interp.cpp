#include "tpair/interp.hpp"

#include <cmath>

#include "tpair/error.hpp"
#include "tpair/spectral.hpp"

namespace tpair {

int PeriodicInterpolator::refine_for(int n, int target) {
  int r = 1;
  while (n * r < target) r *= 2;
  return r;
}

PeriodicInterpolator::PeriodicInterpolator(int nx, int ny, double lx, double ly,
                                           const std::vector<std::vector<double>>& channels,
                                           int refine, int width)
    : nx_(nx * refine), ny_(ny * refine), channels_(static_cast<int>(channels.size())), width_(width) {
  if (width < 2 || width % 2 != 0) throw Error(ErrorCode::invalid_argument, "stencil width must be even");
  hx_ = lx / nx_;
  hy_ = ly / ny_;
  const std::size_t coarse = static_cast<std::size_t>(nx) * ny;
  const std::size_t fine = static_cast<std::size_t>(nx_) * ny_;
  data_.assign(fine * channels_, 0.0);

  if (refine == 1) {
    for (int c = 0; c < channels_; ++c)
      for (std::size_t p = 0; p < coarse; ++p) data_[p * channels_ + c] = channels[c][p];
  } else {
    Spectral2D coarse_fft(nx, ny, lx, ly);
    Spectral2D fine_fft(nx_, ny_, lx, ly);
    std::vector<Complex> spec(coarse), padded(fine);
    const double scale = static_cast<double>(fine) / static_cast<double>(coarse);
    for (int c = 0; c < channels_; ++c) {
      if (channels[c].size() != coarse) throw Error(ErrorCode::invalid_argument, "channel size mismatch");
      for (std::size_t p = 0; p < coarse; ++p) spec[p] = channels[c][p];
      coarse_fft.forward(spec.data(), spec.data(), 1);
      std::fill(padded.begin(), padded.end(), Complex(0.0));
      for (int j = 0; j < ny; ++j) {
        const int kj = coarse_fft.signed_index_y(j);
        if (2 * j == ny) continue;  // drop the Nyquist row
        const int fj = kj >= 0 ? kj : kj + ny_;
        for (int i = 0; i < nx; ++i) {
          if (2 * i == nx) continue;
          const int ki = coarse_fft.signed_index_x(i);
          const int fi = ki >= 0 ? ki : ki + nx_;
          padded[static_cast<std::size_t>(fj) * nx_ + fi] = spec[static_cast<std::size_t>(j) * nx + i] * scale;
        }
      }
      fine_fft.backward(padded.data(), padded.data(), 1);
      for (std::size_t p = 0; p < fine; ++p) data_[p * channels_ + c] = padded[p].real();
    }
  }

  denominators_.resize(width_);
  for (int k = 0; k < width_; ++k) {
    double d = 1.0;
    for (int j = 0; j < width_; ++j)
      if (j != k) d *= static_cast<double>(k - j);
    denominators_[k] = d;
  }
}

void PeriodicInterpolator::eval(double x, double y, std::span<double> out) const {
  const int half = width_ / 2;
  auto weights = [&](double u, int& base, double* w) {
    const double fl = std::floor(u);
    const double s = u - fl;
    base = static_cast<int>(fl) - half + 1;
    // nodes at offsets 0..width-1 relative to base; evaluation point at s + half - 1
    const double t = s + half - 1;
    for (int k = 0; k < width_; ++k) {
      double num = 1.0;
      for (int j = 0; j < width_; ++j)
        if (j != k) num *= (t - j);
      w[k] = num / denominators_[k];
    }
  };
  double wx[32], wy[32];
  int bx = 0, by = 0;
  weights(x / hx_, bx, wx);
  weights(y / hy_, by, wy);
  for (int c = 0; c < channels_; ++c) out[c] = 0.0;
  for (int b = 0; b < width_; ++b) {
    int j = (by + b) % ny_;
    if (j < 0) j += ny_;
    for (int a = 0; a < width_; ++a) {
      int i = (bx + a) % nx_;
      if (i < 0) i += nx_;
      const double w = wx[a] * wy[b];
      const double* p = data_.data() + (static_cast<std::size_t>(j) * nx_ + i) * channels_;
      for (int c = 0; c < channels_; ++c) out[c] += w * p[c];
    }
  }
}

}  // namespace tpair
