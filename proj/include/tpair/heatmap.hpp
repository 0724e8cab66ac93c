#pragma once

// Scalar heatmaps of one component of a field, written as binary PGM (P5).
//
// Selector text: "m=<mode>,entry=<r>:<c>|norm,part=abs|re|im".  entry=norm is
// the pointwise Frobenius norm of the selected part of the 3x3 matrix.
// Pixels are row-major in (y, x) with y = 0 in the first row.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tpair/smfield.hpp"

namespace tpair::io {

enum class Part { abs, re, im };

struct Selector {
  int mode = 0;
  int row = -1;  ///< -1 selects the Frobenius norm
  int col = -1;
  Part part = Part::abs;
};

/// Throws InvalidArgument on unknown keys, bad values or entries outside 3x3.
Selector parse_selector(std::string_view text);

/// nx*ny values; throws InvalidArgument when the mode exceeds the degree.
std::vector<double> select(const FourierField& f, const Selector& s);

struct Heatmap {
  int nx = 0;
  int ny = 0;
  int bits = 8;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::uint16_t> levels;

  int max_level() const { return (1 << bits) - 1; }
  /// Value represented by pixel k; exact to half a quantization step.
  double value(std::size_t k) const;
  double step() const { return max > min ? (max - min) / max_level() : 0.0; }
};

/// Min-max scaling to 8 or 16 bits; a constant image maps to level 0.
Heatmap quantize(const std::vector<double>& values, int nx, int ny, int bits);

/// P5, maxval 255 or 65535 (16-bit samples big-endian).
std::string pgm_bytes(const Heatmap& h);
/// Inverse of pgm_bytes for the levels; min and max are left at zero.
Heatmap parse_pgm(std::string_view bytes);

/// Companion scale file: min, max, bits, and the level-to-value rule.
std::string scale_text(const Heatmap& h);
/// Reads min, max and bits back from scale_text output into h.
void parse_scale(std::string_view text, Heatmap& h);

}  // namespace tpair::io
