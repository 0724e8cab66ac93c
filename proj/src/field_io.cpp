#include "tpair/field_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "tpair/error.hpp"

namespace tpair::io {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::io, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, std::string("bad value for '") + key + "': " + e.what());
  }
}

void append_array(std::string& out, const double* v, std::size_t n) {
  out += '[';
  char buf[32];
  for (std::size_t k = 0; k < n; ++k) {
    if (k) out += ',';
    auto r = std::to_chars(buf, buf + sizeof buf, v[k], std::chars_format::general, 17);
    out.append(buf, r.ptr);
  }
  out += ']';
}

MetricPtr metric_from(const json& j, const MetricPtr& reuse) {
  const json& grid = j.at("grid");
  const int nx = get<int>(grid, "nx"), ny = get<int>(grid, "ny");
  const double lx = get<double>(grid, "lx"), ly = get<double>(grid, "ly");
  auto lambda = get<std::vector<double>>(j, "metric_lambda");
  if (reuse && reuse->nx() == nx && reuse->ny() == ny && reuse->lx() == lx && reuse->ly() == ly &&
      reuse->lambda() == lambda)
    return reuse;
  return TorusMetric::from_grid(nx, ny, lx, ly, std::move(lambda));
}

FourierField field_from(const json& j, const MetricPtr& reuse) {
  if (!j.is_object() || !j.contains("grid")) throw Error(ErrorCode::io, "not a field object");
  const MetricPtr metric = metric_from(j, reuse);
  const int degree = get<int>(j, "degree");
  if (degree < 0) throw Error(ErrorCode::io, "negative degree");
  FourierField f(metric, degree);
  const std::size_t n = metric->size() * 9;
  for (const json& mode : j.at("modes")) {
    const int m = get<int>(mode, "m");
    if (!f.has_mode(m)) throw Error(ErrorCode::io, "mode " + std::to_string(m) + " beyond degree");
    const auto re = get<std::vector<double>>(mode, "re");
    const auto im = get<std::vector<double>>(mode, "im");
    if (re.size() != n || im.size() != n) throw Error(ErrorCode::io, "mode data has wrong length");
    MatGrid& grid = f.mode(m);
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          const std::size_t k = p * 9 + r * 3 + c;
          grid[p](r, c) = Complex(re[k], im[k]);
        }
  }
  return f;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string format_shortest(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, h >>= 4) s[k] = digits[h & 15];
  return s;
}

std::string field_json(const FourierField& f) {
  const TorusMetric& g = f.metric();
  std::string out = "{\"grid\":{\"nx\":" + std::to_string(g.nx()) + ",\"ny\":" + std::to_string(g.ny()) +
                    ",\"lx\":" + format_double(g.lx()) + ",\"ly\":" + format_double(g.ly()) + "},\n\"metric_lambda\":";
  append_array(out, g.lambda().data(), g.size());
  out += ",\n\"degree\":" + std::to_string(f.degree()) + ",\n\"modes\":[";
  std::vector<double> re(g.size() * 9), im(g.size() * 9);
  for (int m = -f.degree(); m <= f.degree(); ++m) {
    const MatGrid& grid = f.mode(m);
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          re[p * 9 + r * 3 + c] = grid[p](r, c).real();
          im[p * 9 + r * 3 + c] = grid[p](r, c).imag();
        }
    if (m > -f.degree()) out += ',';
    out += "\n{\"m\":" + std::to_string(m) + ",\"re\":";
    append_array(out, re.data(), re.size());
    out += ",\"im\":";
    append_array(out, im.data(), im.size());
    out += '}';
  }
  out += "]}\n";
  return out;
}

FourierField parse_field(std::string_view text, const MetricPtr& metric) { return field_from(parse_json(text), metric); }

std::string pair_json(const Pair& pair) {
  return "{\"A\":\n" + field_json(pair.A.field()) + ",\"Phi\":\n" + field_json(pair.Phi.field()) + "}\n";
}

Pair parse_pair(std::string_view text, const MetricPtr& metric, PairStructure* structure) {
  const json j = parse_json(text);
  if (!j.contains("A") || !j.contains("Phi")) throw Error(ErrorCode::io, "pair file needs 'A' and 'Phi'");
  const FourierField A = field_from(j.at("A"), metric);
  const FourierField Phi = field_from(j.at("Phi"), A.metric_ptr());
  if (A.metric_ptr() != Phi.metric_ptr()) throw Error(ErrorCode::io, "A and Phi live on different metrics");
  PairStructure local;
  PairStructure& st = structure ? *structure : local;
  Pair p;
  p.A = Connection::project(A, &st.A);
  p.Phi = Higgs::project(Phi, &st.Phi);
  return p;
}

Pair parse_pair_with_trivializer(std::string_view pair_text, std::string_view trivializer_text,
                                 PairStructure* structure) {
  Pair p = parse_pair(pair_text, nullptr, structure);
  FourierField u = parse_field(trivializer_text, p.A.field().metric_ptr());
  if (u.metric_ptr() != p.A.field().metric_ptr()) throw Error(ErrorCode::io, "trivializer lives on a different metric");
  p.trivializer = std::move(u);
  return p;
}

std::string section_json(const UnitSection& g) { return field_json(g.field()); }

UnitSection parse_section(std::string_view text, const MetricPtr& metric) {
  const FourierField f = parse_field(text, metric);
  if (f.degree() != 0) throw Error(ErrorCode::io, "section must have degree 0");
  std::vector<Mat3> v(f.points());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = f.mode(0)[p].real();
  return UnitSection(f.metric_ptr(), v);
}

std::string certificates_json(const std::vector<BacklundCertificate>& certs, const BacklundTolerances& tol) {
  JsonWriter w;
  w.begin_object();
  w.key("tolerances").begin_object();
  w.field("gmero", tol.gmero).field("input_transport", tol.input_transport).field("transport", tol.transport);
  w.field("mode_leak", tol.mode_leak).field("antisymmetry", tol.antisymmetry);
  w.end_object();
  w.begin_array("steps");
  for (const auto& c : certs) {
    const auto fails = c.failures(tol);
    w.begin_object();
    w.field("certified", fails.empty());
    w.begin_array("failures");
    for (const auto& f : fails) w.value(f);
    w.end_array();
    w.key("residuals").begin_object();
    w.field("holomorphic_section", c.gmero).field("input_transport_equation", c.input_transport);
    w.field("transport_equation", c.transport).field("connection_modes", c.connection_leak);
    w.field("higgs_modes", c.higgs_leak).field("connection_reality", c.connection_reality);
    w.field("connection_antisymmetry", c.connection_antisymmetry).field("higgs_reality", c.higgs_reality);
    w.field("higgs_antisymmetry", c.higgs_antisymmetry).field("vertical_solution", c.a_vertical);
    w.field("vertical_solution_orthogonality", c.a_orthogonality);
    w.end_object();
    w.field("output_degree", c.output.trivializer ? c.output.trivializer->degree() : -1);
    w.key("hashes").begin_object();
    w.field("input_pair", hex64(fnv1a(pair_json(c.input))));
    if (c.input.trivializer) w.field("input_trivializer", hex64(fnv1a(field_json(*c.input.trivializer))));
    w.field("g", hex64(fnv1a(section_json(c.g))));
    w.field("a", hex64(fnv1a(field_json(c.a))));
    w.field("output_pair", hex64(fnv1a(pair_json(c.output))));
    if (c.output.trivializer) w.field("output_trivializer", hex64(fnv1a(field_json(*c.output.trivializer))));
    w.end_object();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::io, "write failed for " + path);
}

// ---- JsonWriter ------------------------------------------------------------------

void JsonWriter::separator() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!first_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array(std::string_view k) {
  if (!k.empty()) key(k);
  separator();
  out_ += '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
  separator();
  out_ += json(std::string(k)).dump();
  out_ += ':';
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  out_ += std::isfinite(v) ? format_double(v) : "null";
  return *this;
}

JsonWriter& JsonWriter::value(long long v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
  separator();
  out_ += json(std::string(s)).dump();
  return *this;
}

JsonWriter& JsonWriter::raw(std::string_view j) {
  separator();
  out_ += j;
  return *this;
}

}  // namespace tpair::io
