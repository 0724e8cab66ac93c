#pragma once

#include <span>
#include <vector>

namespace tpair {

/// Off-grid evaluation of periodic grid data.  The data is first refined by
/// spectral zero padding (factor `refine`), then evaluated with a
/// tensor-product Lagrange stencil of `width` points per axis.  For
/// band-limited input the error is O(h^width) in the refined spacing h.
class PeriodicInterpolator {
 public:
  PeriodicInterpolator() = default;
  PeriodicInterpolator(int nx, int ny, double lx, double ly,
                       const std::vector<std::vector<double>>& channels, int refine = 2, int width = 8);

  int channels() const { return channels_; }
  bool empty() const { return channels_ == 0; }

  void eval(double x, double y, std::span<double> out) const;

  /// Refinement factor giving at least `target` points per axis.
  static int refine_for(int n, int target = 512);

 private:
  int nx_ = 0, ny_ = 0, channels_ = 0, width_ = 0;
  double hx_ = 1.0, hy_ = 1.0;
  std::vector<double> data_;         // interleaved, refined grid
  std::vector<double> denominators_; // Lagrange denominators per node
};

}  // namespace tpair
