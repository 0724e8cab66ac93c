#pragma once

// Spectral differentiation on a periodic nx x ny grid.  Grid data is stored
// row-major with x fastest: index = j * nx + i.  Multi-channel data is
// interleaved, index = (j * nx + i) * channels + c.

#include <complex>
#include <map>
#include <memory>
#include <mutex>

namespace tpair {

using Complex = std::complex<double>;

/// Guards every FFTW planner call; the planner is not reentrant.
std::mutex& fftw_planner_mutex();

enum class Derivative {
  dx,
  dy,
  dz,     ///< (d/dx - i d/dy) / 2
  dzbar,  ///< (d/dx + i d/dy) / 2
  laplacian,
};

class Spectral2D {
 public:
  Spectral2D(int nx, int ny, double lx, double ly);
  ~Spectral2D();
  Spectral2D(const Spectral2D&) = delete;
  Spectral2D& operator=(const Spectral2D&) = delete;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  /// Signed angular wave numbers; zero at the Nyquist index when `odd` is set.
  double kx(int i, bool odd = false) const;
  double ky(int j, bool odd = false) const;
  int signed_index_x(int i) const { return i <= nx_ / 2 ? i : i - nx_; }
  int signed_index_y(int j) const { return j <= ny_ / 2 ? j : j - ny_; }

  /// Unnormalized forward transform.
  void forward(const Complex* in, Complex* out, int channels) const;
  /// Inverse transform including the 1/(nx ny) factor.
  void backward(const Complex* in, Complex* out, int channels) const;

  void apply(Derivative d, const Complex* in, Complex* out, int channels) const;

 private:
  struct Plans;
  const Plans& plans(int channels) const;

  int nx_, ny_;
  double lx_, ly_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::unique_ptr<Plans>> plans_;
};

}  // namespace tpair
