#pragma once

// JSON serialization of fields, pairs and certificates.
//
// Field schema:
//   { "grid": {"nx","ny","lx","ly"}, "metric_lambda": [nx*ny reals],
//     "degree": N, "modes": [{"m": int, "re": [nx*ny*9], "im": [nx*ny*9]}] }
// with entries row-major in (y, x), then 3x3 row-major.  Reals are written
// with 17 significant digits, so load(save(x)) == x bitwise.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tpair/backlund.hpp"
#include "tpair/smfield.hpp"

namespace tpair::io {

std::string format_double(double v);
/// Shortest text that reads back to v; for human-readable reports.
std::string format_shortest(double v);
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t h);

std::string field_json(const FourierField& f);
/// Reuses `metric` when the file's grid and lambda match it bitwise.
FourierField parse_field(std::string_view text, const MetricPtr& metric = nullptr);

/// What loading removed from the stored fields to make them a connection
/// (modes +-1, real, antisymmetric) and a Higgs field (mode 0, real,
/// antisymmetric).  Zero for files written by pair_json.
struct PairStructure {
  Connection::Projection A;
  Higgs::Projection Phi;
};

/// {"A": field, "Phi": field}
std::string pair_json(const Pair& pair);
Pair parse_pair(std::string_view text, const MetricPtr& metric = nullptr, PairStructure* structure = nullptr);

/// Pair plus trivializer from the two files' contents; the trivializer is
/// placed on the pair's metric.
Pair parse_pair_with_trivializer(std::string_view pair_text, std::string_view trivializer_text,
                                 PairStructure* structure = nullptr);

std::string section_json(const UnitSection& g);
UnitSection parse_section(std::string_view text, const MetricPtr& metric = nullptr);

/// Array of certificate objects: residuals, tolerances, failures and FNV-1a
/// hashes of the serialized input, section, a and output fields.
std::string certificates_json(const std::vector<BacklundCertificate>& certs, const BacklundTolerances& tol = {});

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Minimal JSON object writer with deterministic key order and number format.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array(std::string_view key = {});
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double v);
  JsonWriter& value(long long v);
  JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view s);
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& raw(std::string_view json);
  template <class T>
  JsonWriter& field(std::string_view k, const T& v) {
    key(k);
    return value(v);
  }
  const std::string& str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<bool> first_;
  bool after_key_ = false;
};

}  // namespace tpair::io
