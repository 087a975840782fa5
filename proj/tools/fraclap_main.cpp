// Command-line front end: fraclap <subcommand> [options]

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fraclap/error.hpp"
#include "fraclap/exponents.hpp"
#include "fraclap/frac_operator.hpp"
#include "fraclap/ju.hpp"
#include "fraclap/parallel.hpp"
#include "fraclap/simulator.hpp"
#include "fraclap/sweep.hpp"
#include "fraclap/testfn.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fraclap;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = 0;
  std::string log_level = "info";
};

struct Problem {
  double p = 1.0;
  double q = 2.0;
  double beta = 1.0;
  int N = 1;
  std::optional<double> gamma;
  std::optional<double> epsilon;

  ExponentParams params() const { return {p, q, beta, N, gamma, epsilon}; }
};

void add_problem_flags(CLI::App* cmd, Problem& pr) {
  cmd->add_option("--p", pr.p, "diffusion power p")->capture_default_str();
  cmd->add_option("--q", pr.q, "source power q")->capture_default_str();
  cmd->add_option("--beta", pr.beta, "order beta of (-Delta)^{beta/2}")->capture_default_str();
  cmd->add_option("--N", pr.N, "space dimension")->capture_default_str();
  cmd->add_option("--gamma", pr.gamma, "decay exponent of the initial data");
  cmd->add_option("--epsilon", pr.epsilon, "amplitude of the algebraic-decay data");
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  file.open(path, std::ios::binary);
  require(static_cast<bool>(file), ErrorCode::io_error, "cannot write " + path);
  return file;
}

Field load_input(const std::string& input, const GridSpec& grid) {
  if (fs::exists(input)) return load_field(input);
  return sample(parse_descriptor(input), grid);
}

int cmd_exponents(const Globals& g, const Problem& pr) {
  const nlohmann::json record = exponents_record(pr.params());
  std::ofstream file;
  open_out(g.out, file) << record.dump(2) << '\n';
  return 0;
}

struct FracOpArgs {
  std::string input = "gaussian:1,1";
  std::size_t n = 1024;
  double L = 20.0;
  int N = 1;
  double beta = 1.0;
  std::string backend = "spectral";
  bool calibrate = false;
  std::string output;  // field file; diagnostics go to <output>.json
};

int cmd_frac_op(const Globals& g, const FracOpArgs& a) {
  const GridSpec grid = make_grid(a.N, a.n, a.L);
  const Field in = load_input(a.input, grid);
  OperatorSpec spec;
  spec.beta = a.beta;
  spec.backend = parse_backend(a.backend);
  if (a.calibrate && spec.backend == Backend::singular_integral) {
    spec = calibrated(spec, in.grid());
    spdlog::info("calibration factor {:.6f} (predicted {:.6f})", spec.calibration_factor, 0.5 * a.beta);
  }
  const Field out = apply_operator(in, spec);
  const Norms nm = norms(out);
  spdlog::info("output sup {:.6e} l2 {:.6e}", nm.sup, nm.l2);
  if (!in.warning().empty()) spdlog::warn("{}", in.warning());

  const auto values = out.values();
  double mean = 0.0, vmax = values.empty() ? 0.0 : values[0];
  for (double v : values) {
    mean += v;
    vmax = std::max(vmax, v);
  }
  mean /= static_cast<double>(values.size());
  nlohmann::json diag{{"backend", to_string(spec.backend)},
                      {"beta", spec.beta},
                      {"calibration_factor", spec.calibration_factor},
                      {"max", vmax},
                      {"mean", mean},
                      {"sup", nm.sup},
                      {"l2", nm.l2},
                      {"n", in.grid().points_per_dim()},
                      {"L", in.grid().half_width()},
                      {"N", in.grid().dim()},
                      {"warning", in.warning()}};

  const std::string target = a.output.empty() ? g.out : a.output;
  if (target.empty()) {
    write_csv(out, std::cout);
    spdlog::info("diagnostics {}", diag.dump());
  } else {
    save_field(out, target);
    std::ofstream(target + ".json") << diag.dump(2) << '\n';
  }
  return 0;
}

struct JuArgs {
  std::size_t count = 100;
  std::vector<double> q_list{1.0, 1.5, 2.0, 3.0};
  std::vector<double> delta_list{0.5, 1.0, 1.5};
  std::size_t n = 1024;
  double L = 10.0;
  int N = 1;
  double tolerance = 1e-8;
  std::string backend = "spectral";
  std::string report;
};

int cmd_ju(const Globals& g, const JuArgs& a) {
  JuSuiteConfig cfg;
  cfg.count = a.count;
  cfg.q_list = a.q_list;
  cfg.delta_list = a.delta_list;
  cfg.seed = g.seed.value_or(42);
  cfg.tolerance = a.tolerance;
  cfg.dim = a.N;
  cfg.n = a.n;
  cfg.half_width = a.L;
  cfg.backend = parse_backend(a.backend);
  const JuReport report = ju_sweep(cfg);
  spdlog::info("max violation {:.3e} over {} cases (tolerance {:.1e}, {} near-zero fields): {}",
               report.aggregate_max_violation, report.cases.size(), report.tolerance, report.near_zero_cases,
               report.pass ? "pass" : "FAIL");
  std::ofstream file;
  open_out(a.report.empty() ? g.out : a.report, file) << report.to_json().dump(2) << '\n';
  return report.pass ? 0 : 1;
}

struct TestfnArgs {
  std::vector<double> T_list{16, 32, 64, 128, 256};
  std::vector<double> B_list{1};
  std::optional<int> ell;
  std::optional<int> eta;
};

int cmd_testfn(const Globals& g, const Problem& pr, const TestfnArgs& a) {
  const ExponentParams ep = pr.params();
  validate(ep);
  const double alpha_value = alpha(ep.p, ep.q, ep.beta);
  CutoffSpec cut = default_cutoff(ep.p, ep.q);
  if (a.ell) cut.ell = *a.ell;
  if (a.eta) cut.eta = *a.eta;
  const double predicted_delta = delta(ep);
  const std::optional<double> growth =
      ep.gamma ? std::optional<double>(alpha_value * (ep.N - *ep.gamma)) : std::nullopt;
  const Descriptor u0 = AlgebraicDecay{ep.epsilon.value_or(1.0), ep.gamma.value_or(0.0)};

  struct Line {
    double T, B;
    RhsIntegrals r;
    std::optional<double> lower;
  };
  std::vector<Line> lines;
  for (double B : a.B_list)
    for (double T : a.T_list) lines.push_back({T, B, {}, std::nullopt});
  parallel_for(0, lines.size(), [&](std::size_t i) {
    const TestFunctionPair pair = make_pair(lines[i].T, alpha_value, lines[i].B);
    lines[i].r = rhs_integrals(pair, ep.p, ep.q, ep.beta, ep.N, cut);
    if (ep.gamma) lines[i].lower = lower_bound_integral(u0, pair, ep.N, cut.ell);
  });

  std::ofstream file;
  std::ostream& os = open_out(g.out, file);
  os.precision(17);
  os << "T,B,I1,I2,lower_bound,predicted_delta,predicted_growth\n";
  for (const auto& l : lines) {
    os << l.T << ',' << l.B << ',' << l.r.I1 << ',' << l.r.I2 << ',';
    if (l.lower) os << *l.lower;
    os << ',' << predicted_delta << ',';
    if (growth) os << *growth;
    os << '\n';
  }

  for (double B : a.B_list) {
    std::vector<double> Ts, totals;
    for (const auto& l : lines)
      if (l.B == B) {
        Ts.push_back(l.T);
        totals.push_back(l.r.I1 + l.r.I2);
      }
    if (Ts.size() >= 4) {
      const PowerLawFit fit = fit_power_law(Ts, totals);
      spdlog::info("B={}: slope of I1+I2 {:.4f} (predicted {:.4f})", B, fit.slope, -predicted_delta);
    }
  }
  return 0;
}

struct SimArgs {
  std::string initial = "gaussian:1,1";
  double t_max = 10.0;
  double cfl = 0.4;
  double dt_min = 1e-10;
  double threshold = 1e6;
  std::size_t n = 256;
  double L = 20.0;
  std::size_t stride = 1;
  bool no_dealias = false;
  bool no_source = false;
  bool snapshot = false;
};

int cmd_simulate(const Globals& g, const Problem& pr, const SimArgs& a) {
  const GridSpec grid = make_grid(pr.N, a.n, a.L);
  SimParams sp;
  sp.p = pr.p;
  sp.q = pr.q;
  sp.beta = pr.beta;
  sp.gamma = pr.gamma;
  sp.source_term = !a.no_source;
  SimControls sc;
  sc.t_max = a.t_max;
  sc.cfl = a.cfl;
  sc.dt_min = a.dt_min;
  sc.blowup_threshold = a.threshold;
  sc.dealias = !a.no_dealias;
  sc.record_stride = a.stride;

  SimOutcome outcome = [&] {
    if (a.initial == "algdecay") {
      require(pr.gamma.has_value(), ErrorCode::missing_parameter, "--initial algdecay needs --gamma");
      return probe_theorem2(*pr.gamma, pr.epsilon.value_or(1.0), sp, sc, grid);
    }
    return run(load_input(a.initial, grid), sp, sc, false);
  }();
  if (!outcome.warning.empty()) spdlog::warn("{}", outcome.warning);
  spdlog::info("{} at t={:.6g} after {} steps, final sup {:.6e} (predicted {})", to_string(outcome.classification),
               outcome.t_final, outcome.steps, outcome.final_sup, to_string(outcome.predicted_regime));

  if (g.out.empty()) {
    std::cout << outcome.to_json().dump(2) << '\n';
  } else {
    const fs::path dir = g.out;
    fs::create_directories(dir);
    std::ofstream(dir / "outcome.json") << outcome.to_json().dump(2) << '\n';
    std::ofstream hist(dir / "history.csv");
    write_history_csv(outcome, hist);
    if (a.snapshot && !outcome.diverged) write_binary(outcome.final_field, dir / "final.bin");
  }
  return outcome.diverged ? 3 : 0;
}

int cmd_sweep(const Globals& g) {
  require(!g.config.empty(), ErrorCode::missing_parameter, "sweep needs --config PATH");
  std::optional<fs::path> out;
  if (!g.out.empty()) out = g.out;
  const SweepResult r = run_config(g.config, g.seed, out);
  if (r.exit_code == 2) {
    spdlog::error("{}", r.message);
    return 2;
  }
  spdlog::info("{} rows written to {}", r.rows.size(), r.directory.string());
  if (r.summary.agreement)
    spdlog::info("agreement {:.1f}% ({} of {} decided)", 100.0 * *r.summary.agreement, r.summary.matching,
                 r.summary.decided);
  else
    spdlog::info("agreement not-applicable (0 decided)");
  if (r.exit_code == 3) spdlog::error("{}", r.message);
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("fraclap"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Fractional diffusion-reaction toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "sweep configuration file");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, off")->capture_default_str();

  Problem pr;
  auto* exps = app.add_subcommand("exponents", "derived exponents and regime");
  add_problem_flags(exps, pr);

  FracOpArgs fa;
  auto* fop = app.add_subcommand("frac-op", "apply the fractional Laplacian to a field");
  fop->add_option("--input", fa.input, "descriptor (gaussian:a,w ...) or field file")->capture_default_str();
  fop->add_option("--n", fa.n, "points per axis")->capture_default_str();
  fop->add_option("--L", fa.L, "box half-width")->capture_default_str();
  fop->add_option("--N", fa.N, "dimension")->capture_default_str();
  fop->add_option("--beta", fa.beta, "order")->capture_default_str();
  fop->add_option("--backend", fa.backend, "spectral or singular")->capture_default_str();
  fop->add_flag("--calibrate", fa.calibrate, "calibrate the singular backend first");
  fop->add_option("--output", fa.output, "output field (.csv or .bin); diagnostics in <output>.json");

  JuArgs ja;
  auto* ju = app.add_subcommand("ju-check", "random suite for the pointwise convexity inequality");
  ju->add_option("--count", ja.count)->capture_default_str();
  ju->add_option("--q-list", ja.q_list)->delimiter(',');
  ju->add_option("--delta-list", ja.delta_list)->delimiter(',');
  ju->add_option("--n", ja.n)->capture_default_str();
  ju->add_option("--L", ja.L)->capture_default_str();
  ju->add_option("--N", ja.N)->capture_default_str();
  ju->add_option("--tolerance", ja.tolerance)->capture_default_str();
  ju->add_option("--backend", ja.backend)->capture_default_str();
  ju->add_option("--report", ja.report, "JSON report path (default: --out or stdout)");

  TestfnArgs ta;
  auto* tfn = app.add_subcommand("testfn-scaling", "test-function integrals versus T and B");
  add_problem_flags(tfn, pr);
  tfn->add_option("--T-list", ta.T_list)->delimiter(',');
  tfn->add_option("--B-list", ta.B_list)->delimiter(',');
  tfn->add_option("--ell", ta.ell);
  tfn->add_option("--eta", ta.eta);

  SimArgs sa;
  auto* sim = app.add_subcommand("simulate", "integrate the evolution problem");
  add_problem_flags(sim, pr);
  sim->add_option("--initial", sa.initial, "descriptor, field file, or algdecay (uses --gamma/--epsilon)")
      ->capture_default_str();
  sim->add_option("--t-max", sa.t_max)->capture_default_str();
  sim->add_option("--cfl", sa.cfl)->capture_default_str();
  sim->add_option("--dt-min", sa.dt_min)->capture_default_str();
  sim->add_option("--threshold", sa.threshold, "blow-up threshold")->capture_default_str();
  sim->add_option("--n", sa.n)->capture_default_str();
  sim->add_option("--L", sa.L)->capture_default_str();
  sim->add_option("--record-stride", sa.stride)->capture_default_str();
  sim->add_flag("--no-dealias", sa.no_dealias);
  sim->add_flag("--no-source", sa.no_source);
  sim->add_flag("--snapshot", sa.snapshot, "write the final field as final.bin");

  auto* swp = app.add_subcommand("sweep", "run a configured parameter sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    spdlog::set_level(spdlog::level::from_str(g.log_level));
    if (g.threads > 0) set_thread_count(g.threads);
    if (*exps) return cmd_exponents(g, pr);
    if (*fop) return cmd_frac_op(g, fa);
    if (*ju) return cmd_ju(g, ja);
    if (*tfn) return cmd_testfn(g, pr, ta);
    if (*sim) return cmd_simulate(g, pr, sa);
    if (*swp) return cmd_sweep(g);
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
