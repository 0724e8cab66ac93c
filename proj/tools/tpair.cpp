// Batch front end.  Exit codes: 0 pass, 1 verification failure, 2 input or
// configuration error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "run_config.hpp"
#include "tpair/backlund.hpp"
#include "tpair/cocycle.hpp"
#include "tpair/error.hpp"
#include "tpair/field_io.hpp"
#include "tpair/heatmap.hpp"
#include "tpair/verify.hpp"

namespace fs = std::filesystem;
using namespace tpair;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInput = 2;

// Errors that mean "the mathematics did not check out" rather than "the
// request was malformed".
int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::non_orthogonal_drift:
    case ErrorCode::g_not_holomorphic:
    case ErrorCode::input_not_certified:
    case ErrorCode::factory_validation_failed:
    case ErrorCode::rank_deficient:
    case ErrorCode::reduction_failed:
      return kFail;
    default:
      return kInput;
  }
}

std::string join(const fs::path& dir, const char* name) { return (dir / name).string(); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
}

Pair load_pair(const std::string& pair_path, const std::string& trivializer_path, io::PairStructure* st) {
  const std::string ptext = io::read_file(pair_path);
  if (trivializer_path.empty()) return io::parse_pair(ptext, nullptr, st);
  return io::parse_pair_with_trivializer(ptext, io::read_file(trivializer_path), st);
}

// ---- generate ---------------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::string output_dir;
};

int run_generate(const GenerateArgs& args) {
  const cli::RunConfig cfg = cli::parse_run_config(io::read_file(args.config));
  const fs::path out = args.output_dir.empty() ? fs::path(cfg.output_dir) : fs::path(args.output_dir);
  const MetricPtr metric = TorusMetric::build(cfg.metric);
  const std::vector<StepSpec> steps = cli::build_steps(cfg, *metric);

  BacklundOptions opt;
  opt.tol = cfg.tolerances;
  const ChainResult chain = generate_chain(metric, steps, opt);

  ensure_dir(out);
  io::write_file(join(out, "pair.json"), io::pair_json(chain.pair));
  io::write_file(join(out, "trivializer.json"), io::field_json(*chain.pair.trivializer));
  io::write_file(join(out, "certificates.json"), io::certificates_json(chain.certificates, cfg.tolerances));

  bool ok = true;
  for (std::size_t k = 0; k < chain.certificates.size(); ++k) {
    const auto fails = chain.certificates[k].failures(cfg.tolerances);
    std::cout << "step " << k << ": " << (fails.empty() ? "certified" : "NOT certified");
    for (const auto& f : fails) std::cout << ' ' << f;
    std::cout << "  transport " << io::format_shortest(chain.certificates[k].transport) << '\n';
    ok = ok && fails.empty();
  }
  std::cout << "degree " << chain.pair.trivializer->degree() << ", wrote " << out.string() << '\n';
  return ok ? kPass : kFail;
}

// ---- verify -----------------------------------------------------------------------

struct VerifyArgs {
  std::string pair, trivializer, report;
  bool no_geodesics = false;
  double dt = 1e-3;
};

int run_verify(const VerifyArgs& args) {
  io::PairStructure st;
  const Pair pair = load_pair(args.pair, args.trivializer, &st);
  VerifyOptions opt;
  opt.geodesic_checks = !args.no_geodesics;
  opt.dt = args.dt;
  const VerifyReport r = verify_pair(pair, opt, &st);
  std::cout << r.text();
  if (!args.report.empty()) io::write_file(args.report, r.json());
  return r.passed() ? kPass : kFail;
}

// ---- transport --------------------------------------------------------------------

struct TransportArgs {
  std::string pair, out;
  double x = 0.0, y = 0.0, theta = 0.0, time = 1.0, dt = 1e-3;
  int reproject = 0;
};

int run_transport(const TransportArgs& args) {
  const Pair pair = load_pair(args.pair, "", nullptr);
  TransportOptions opt;
  opt.dt = args.dt;
  opt.reproject_every = args.reproject;
  const CocycleResult run = transport(pair, {args.x, args.y, args.theta}, args.time, opt);
  if (args.out.empty()) {
    write_csv(std::cout, run);
    return kPass;
  }
  std::ostringstream csv;
  write_csv(csv, run);
  io::write_file(args.out, csv.str());
  double drift = 0.0;
  for (double d : run.drift) drift = std::max(drift, d);
  const double final_gap = (run.C.back() - Mat3::Identity()).norm();
  std::cout << "samples " << run.C.size() << ", final |C - Id| " << io::format_shortest(final_gap) << ", max drift " << io::format_shortest(drift) << '\n';
  return kPass;
}

// ---- reduce -----------------------------------------------------------------------

struct ReduceArgs {
  std::string pair, trivializer, output_dir = ".";
};

std::string reduction_json(const ReductionResult& r, const ReductionOptions& opt) {
  io::JsonWriter w;
  w.begin_object();
  const auto fails = r.failures(opt);
  w.field("passed", fails.empty());
  w.begin_array("failures");
  for (const auto& f : fails) w.value(f);
  w.end_array();
  w.field("input_degree", r.input_degree);
  w.field("output_degree", r.certificate.output.trivializer->degree());
  w.key("residuals").begin_object();
  w.field("a1_bN", r.a1_bN).field("a0_bN", r.a0_bN).field("a1_bN1", r.a1_bN1).field("bNt_bN1", r.bNt_bN1);
  w.field("top_modes", r.top_modes).field("y_policy_gap", r.y_policy_gap);
  w.field("kernel_alignment", r.kernel_alignment).field("zero_fraction", r.zero_fraction);
  w.field("holomorphic_section", r.lemma.gmero).field("dbar", r.lemma.dbar);
  w.field("line_bundle", r.lemma.line_bundle).field("projector", r.lemma.projector);
  w.field("transport_equation", r.certificate.transport);
  w.end_object();
  w.end_object();
  return w.str() + "\n";
}

int run_reduce(const ReduceArgs& args) {
  const Pair pair = load_pair(args.pair, args.trivializer, nullptr);
  const ReductionOptions opt;
  const ReductionResult r = reduce_degree(pair, opt);
  const fs::path out(args.output_dir);
  ensure_dir(out);
  io::write_file(join(out, "g.json"), io::section_json(r.g));
  io::write_file(join(out, "pair.json"), io::pair_json(r.certificate.output));
  io::write_file(join(out, "trivializer.json"), io::field_json(*r.certificate.output.trivializer));
  io::write_file(join(out, "reduction.json"), reduction_json(r, opt));
  std::cout << "degree " << r.input_degree << " -> " << r.certificate.output.trivializer->degree() << ", top modes "
            << io::format_shortest(r.top_modes) << ", transport " << io::format_shortest(r.certificate.transport) << '\n';
  return kPass;
}

// ---- export -----------------------------------------------------------------------

struct ExportArgs {
  std::string field, key, select = "m=0,entry=norm,part=abs", out;
  int bits = 8;
};

int run_export(const ExportArgs& args) {
  const io::Selector sel = io::parse_selector(args.select);
  const std::string text = io::read_file(args.field);
  FourierField f;
  if (args.key.empty()) {
    f = io::parse_field(text);
  } else {
    const Pair p = io::parse_pair(text);
    if (args.key == "A") f = p.A.field();
    else if (args.key == "Phi") f = p.Phi.field();
    else throw Error(ErrorCode::invalid_argument, "--key must be A or Phi");
  }
  const io::Heatmap h = io::quantize(io::select(f, sel), f.metric().nx(), f.metric().ny(), args.bits);
  fs::path scale(args.out);
  scale.replace_extension(".txt");
  io::write_file(args.out, io::pgm_bytes(h));
  io::write_file(scale.string(), io::scale_text(h));
  std::cout << "min " << io::format_shortest(h.min) << ", max " << io::format_shortest(h.max) << ", wrote " << args.out
            << " and " << scale.string() << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transparent pairs on conformal tori: generate, verify, transport, reduce, export"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "run a chain of steps from a JSON config");
  g->add_option("config", gen.config, "config file")->required();
  g->add_option("-o,--output-dir", gen.output_dir, "overrides output_dir from the config");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "run the residual suite on a pair");
  v->add_option("--pair", ver.pair, "pair.json")->required();
  v->add_option("--trivializer", ver.trivializer, "trivializer.json")->required();
  v->add_option("--report", ver.report, "JSON report path");
  v->add_flag("--no-geodesics", ver.no_geodesics, "skip the ODE-based checks");
  v->add_option("--dt", ver.dt, "ODE step")->check(CLI::PositiveNumber);

  TransportArgs tr;
  auto* t = app.add_subcommand("transport", "integrate the cocycle along one geodesic, CSV output");
  t->add_option("--pair", tr.pair, "pair.json")->required();
  t->add_option("--x", tr.x, "start x");
  t->add_option("--y", tr.y, "start y");
  t->add_option("--theta", tr.theta, "start angle");
  t->add_option("-T,--time", tr.time, "geodesic time")->check(CLI::PositiveNumber);
  t->add_option("--dt", tr.dt, "ODE step")->check(CLI::PositiveNumber);
  t->add_option("--reproject", tr.reproject, "polar re-projection every N steps (0: off)")->check(CLI::NonNegativeNumber);
  t->add_option("-o,--out", tr.out, "CSV path (stdout when absent)");

  ReduceArgs red;
  auto* r = app.add_subcommand("reduce", "lower the trivializer degree by one step");
  r->add_option("--pair", red.pair, "pair.json")->required();
  r->add_option("--trivializer", red.trivializer, "trivializer.json")->required();
  r->add_option("-o,--output-dir", red.output_dir, "directory for g.json, pair.json, trivializer.json, reduction.json");

  ExportArgs ex;
  auto* e = app.add_subcommand("export", "write one field component as a PGM heatmap");
  e->add_option("--field", ex.field, "field or pair file")->required();
  e->add_option("--key", ex.key, "A or Phi when --field is a pair file");
  e->add_option("--select", ex.select, "m=<mode>,entry=<r>:<c>|norm,part=abs|re|im");
  e->add_option("--bits", ex.bits, "8 or 16")->check(CLI::IsMember({8, 16}));
  e->add_option("-o,--out", ex.out, "PGM path; the scale goes to the same name with .txt")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kPass : kInput;
  }

  try {
    if (*g) return run_generate(gen);
    if (*v) return run_verify(ver);
    if (*t) return run_transport(tr);
    if (*r) return run_reduce(red);
    return run_export(ex);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kInput;
  }
}
