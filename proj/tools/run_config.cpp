#include "run_config.hpp"

#include <json.hpp>
#include <random>
#include <set>

#include "tpair/error.hpp"

namespace tpair::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::invalid_argument, "config: " + what); }

void allow_keys(const json& j, const char* where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(std::string(where) + " must be an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) bad("unknown key '" + k + "' in " + where);
}

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

int integer(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad(std::string("'") + key + "' must be an integer");
  return j.at(key).get<int>();
}

double positive(const json& j, const char* key, double fallback) {
  const double v = number(j, key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) bad(std::string("'") + key + "' must be positive");
  return v;
}

Complex complex_pair(const json& j, const char* key, Complex fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    bad(std::string("'") + key + "' must be [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Trig trig(const json& j, const char* key) {
  if (!j.contains(key)) return Trig::cos;
  const json& v = j.at(key);
  if (v == "cos") return Trig::cos;
  if (v == "sin") return Trig::sin;
  bad(std::string("'") + key + "' must be \"cos\" or \"sin\"");
}

MetricSpec parse_metric(const json& j) {
  allow_keys(j, "metric", {"nx", "ny", "lx", "ly", "lambda"});
  MetricSpec m;
  m.nx = integer(j, "nx", m.nx);
  m.ny = integer(j, "ny", m.ny);
  if (m.nx < 16 || m.ny < 16) bad("grid sizes must be at least 16");
  m.lx = positive(j, "lx", m.lx);
  m.ly = positive(j, "ly", m.ly);
  if (j.contains("lambda")) {
    if (!j.at("lambda").is_array()) bad("'lambda' must be an array");
    for (const json& h : j.at("lambda")) {
      allow_keys(h, "lambda harmonic", {"amplitude", "kx", "ky", "x_trig", "y_trig"});
      m.lambda.push_back({number(h, "amplitude", 0.0), integer(h, "kx", 0), integer(h, "ky", 0), trig(h, "x_trig"),
                          trig(h, "y_trig")});
    }
  }
  return m;
}

ChainEntry parse_step(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) bad("chain entries need a string 'type'");
  const std::string type = j.at("type");
  ChainEntry e;
  if (type == "constant") {
    allow_keys(j, "constant step", {"type", "axis"});
    e.kind = ChainEntry::Kind::constant;
    if (j.contains("axis")) {
      const json& a = j.at("axis");
      if (!a.is_array() || a.size() != 3) bad("'axis' must have three numbers");
      for (int k = 0; k < 3; ++k) {
        if (!a[k].is_number()) bad("'axis' must have three numbers");
        e.axis[k] = a[k].get<double>();
      }
      if (!(e.axis.norm() > 0.0)) bad("'axis' must be nonzero");
    }
  } else if (type == "factory") {
    allow_keys(j, "factory step", {"type", "poles", "constant", "alpha", "beta", "tolerance"});
    e.kind = ChainEntry::Kind::factory;
    e.default_spec = !j.contains("poles");
    if (e.default_spec && j.size() > 1) bad("factory parameters need 'poles'");
    if (!e.default_spec) {
      if (!j.at("poles").is_array() || j.at("poles").empty()) bad("'poles' must be a nonempty array");
      for (const json& p : j.at("poles")) {
        allow_keys(p, "pole", {"at", "strength"});
        if (!p.contains("at")) bad("poles need 'at'");
        e.spec.poles.push_back({complex_pair(p, "at", 0.0), number(p, "strength", 0.15)});
      }
      e.spec.constant = complex_pair(j, "constant", e.spec.constant);
      e.spec.alpha = complex_pair(j, "alpha", e.spec.alpha);
      e.spec.beta = complex_pair(j, "beta", e.spec.beta);
      if (std::norm(e.spec.alpha) + std::norm(e.spec.beta) == 0.0) bad("alpha and beta cannot both vanish");
      e.spec.tolerance = positive(j, "tolerance", e.spec.tolerance);
    }
  } else if (type == "random_factory") {
    allow_keys(j, "random_factory step", {"type"});
    e.kind = ChainEntry::Kind::random_factory;
  } else if (type == "q") {
    allow_keys(j, "q step", {"type"});
    e.kind = ChainEntry::Kind::q;
  } else {
    bad("unknown step type '" + type + "'");
  }
  return e;
}

// Portable uniform draw: the 53 high bits of the fully specified mt19937_64.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1p-53;
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  allow_keys(j, "config", {"metric", "chain", "tolerances", "seed", "output_dir"});
  if (!j.contains("metric")) bad("missing 'metric'");
  RunConfig cfg;
  cfg.metric = parse_metric(j.at("metric"));
  if (j.contains("chain")) {
    if (!j.at("chain").is_array()) bad("'chain' must be an array");
    for (const json& s : j.at("chain")) cfg.chain.push_back(parse_step(s));
    if (!cfg.chain.empty() && cfg.chain.front().kind == ChainEntry::Kind::q) bad("a q step needs a previous step");
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    allow_keys(t, "tolerances", {"gmero", "input_transport", "transport", "mode_leak", "antisymmetry"});
    BacklundTolerances& tol = cfg.tolerances;
    tol.gmero = positive(t, "gmero", tol.gmero);
    tol.input_transport = positive(t, "input_transport", tol.input_transport);
    tol.transport = positive(t, "transport", tol.transport);
    tol.mode_leak = positive(t, "mode_leak", tol.mode_leak);
    tol.antisymmetry = positive(t, "antisymmetry", tol.antisymmetry);
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) bad("'seed' must be a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) bad("'output_dir' must be a string");
    cfg.output_dir = j.at("output_dir");
  }
  return cfg;
}

std::vector<StepSpec> build_steps(const RunConfig& cfg, const TorusMetric& metric) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<StepSpec> steps;
  for (const ChainEntry& e : cfg.chain) {
    switch (e.kind) {
      case ChainEntry::Kind::constant:
        steps.push_back(ConstantStep{e.axis});
        break;
      case ChainEntry::Kind::q:
        steps.push_back(QStep{});
        break;
      case ChainEntry::Kind::factory: {
        if (e.default_spec) {
          steps.push_back(FactoryStep{default_factory_spec(metric)});
          break;
        }
        FactorySpec spec = e.spec;
        for (auto& p : spec.poles) p.z = Complex(p.z.real() * metric.lx(), p.z.imag() * metric.ly());
        steps.push_back(FactoryStep{spec});
        break;
      }
      case ChainEntry::Kind::random_factory: {
        // one pole: two nearby poles are rarely resolved at desk-scale grids
        FactorySpec spec;
        const Complex z(uniform(rng, 0.0, metric.lx()), uniform(rng, 0.0, metric.ly()));
        spec.poles.push_back({z, uniform(rng, 0.1, 0.3)});
        spec.constant = Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
        spec.alpha = Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
        spec.beta = Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
        steps.push_back(FactoryStep{spec});
        break;
      }
    }
  }
  return steps;
}

}  // namespace tpair::cli
