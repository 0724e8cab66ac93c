#include "tpair/heatmap.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "tpair/error.hpp"
#include "tpair/field_io.hpp"

namespace tpair::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::invalid_argument, "selector: " + what); }

int parse_int(std::string_view s, const char* what) {
  int v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) bad(std::string("bad ") + what + " '" + std::string(s) + "'");
  return v;
}

double component(const Mat3C& M, const Selector& s) {
  auto pick = [&](Complex z) {
    switch (s.part) {
      case Part::re: return z.real();
      case Part::im: return z.imag();
      default: return std::abs(z);
    }
  };
  if (s.row >= 0) return pick(M(s.row, s.col));
  switch (s.part) {
    case Part::re: return M.real().norm();
    case Part::im: return M.imag().norm();
    default: return M.norm();
  }
}

}  // namespace

Selector parse_selector(std::string_view text) {
  Selector s;
  bool have_mode = false, have_entry = false, have_part = false;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) bad("expected key=value, got '" + std::string(item) + "'");
    const std::string_view key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "m" && !have_mode) {
      s.mode = parse_int(val, "mode");
      have_mode = true;
    } else if (key == "entry" && !have_entry) {
      if (val == "norm") {
        s.row = s.col = -1;
      } else {
        const std::size_t colon = val.find(':');
        if (colon == std::string_view::npos) bad("entry must be r:c or norm");
        s.row = parse_int(val.substr(0, colon), "row");
        s.col = parse_int(val.substr(colon + 1), "column");
        if (s.row < 0 || s.row > 2 || s.col < 0 || s.col > 2) bad("entry outside 3x3");
      }
      have_entry = true;
    } else if (key == "part" && !have_part) {
      if (val == "abs") s.part = Part::abs;
      else if (val == "re") s.part = Part::re;
      else if (val == "im") s.part = Part::im;
      else bad("part must be abs, re or im");
      have_part = true;
    } else {
      bad("unknown or repeated key '" + std::string(key) + "'");
    }
  }
  return s;
}

std::vector<double> select(const FourierField& f, const Selector& s) {
  if (!f.has_mode(s.mode)) bad("mode " + std::to_string(s.mode) + " exceeds degree " + std::to_string(f.degree()));
  const MatGrid& grid = f.mode(s.mode);
  std::vector<double> out(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) out[p] = component(grid[p], s);
  return out;
}

double Heatmap::value(std::size_t k) const { return min + levels[k] * step(); }

Heatmap quantize(const std::vector<double>& values, int nx, int ny, int bits) {
  if (bits != 8 && bits != 16) throw Error(ErrorCode::invalid_argument, "bits must be 8 or 16");
  if (values.size() != static_cast<std::size_t>(nx) * ny) throw Error(ErrorCode::invalid_argument, "size mismatch");
  Heatmap h{nx, ny, bits, INFINITY, -INFINITY, std::vector<std::uint16_t>(values.size(), 0)};
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "non-finite value in heatmap");
    h.min = std::min(h.min, v);
    h.max = std::max(h.max, v);
  }
  if (values.empty()) h.min = h.max = 0.0;
  if (h.max > h.min) {
    const double s = h.max_level() / (h.max - h.min);
    for (std::size_t k = 0; k < values.size(); ++k)
      h.levels[k] = static_cast<std::uint16_t>(std::lround((values[k] - h.min) * s));
  }
  return h;
}

std::string pgm_bytes(const Heatmap& h) {
  std::string out = "P5\n" + std::to_string(h.nx) + " " + std::to_string(h.ny) + "\n" + std::to_string(h.max_level()) + "\n";
  for (std::uint16_t v : h.levels) {
    if (h.bits == 16) out += static_cast<char>(v >> 8);
    out += static_cast<char>(v & 0xff);
  }
  return out;
}

Heatmap parse_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  auto number = [&](const char* what) {
    const std::string_view t = token();
    int v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) throw Error(ErrorCode::io, std::string("PGM: bad ") + what);
    return v;
  };
  if (token() != "P5") throw Error(ErrorCode::io, "PGM: not P5");
  Heatmap h;
  h.nx = number("width");
  h.ny = number("height");
  const int maxval = number("maxval");
  if (maxval != 255 && maxval != 65535) throw Error(ErrorCode::io, "PGM: unsupported maxval");
  h.bits = maxval == 255 ? 8 : 16;
  ++pos;  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(h.nx) * h.ny, w = h.bits / 8;
  if (pos > bytes.size() || bytes.size() - pos != n * w) throw Error(ErrorCode::io, "PGM: raster has wrong length");
  h.levels.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto* b = reinterpret_cast<const unsigned char*>(bytes.data() + pos + k * w);
    h.levels[k] = w == 2 ? static_cast<std::uint16_t>(b[0] << 8 | b[1]) : b[0];
  }
  return h;
}

std::string scale_text(const Heatmap& h) {
  return "min " + format_double(h.min) + "\nmax " + format_double(h.max) + "\nbits " + std::to_string(h.bits) +
         "\n# value = min + level * (max - min) / " + std::to_string(h.max_level()) + "\n";
}

void parse_scale(std::string_view text, Heatmap& h) {
  std::istringstream in{std::string(text)};
  std::string key;
  bool seen[3] = {false, false, false};
  while (in >> key) {
    if (key == "min") seen[0] = static_cast<bool>(in >> h.min);
    else if (key == "max") seen[1] = static_cast<bool>(in >> h.max);
    else if (key == "bits") seen[2] = static_cast<bool>(in >> h.bits);
    else std::getline(in, key);
  }
  if (!seen[0] || !seen[1] || !seen[2]) throw Error(ErrorCode::io, "scale file needs min, max and bits");
}

}  // namespace tpair::io
