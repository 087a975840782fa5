#include "fraclap/sweep.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <spdlog/spdlog.h>

#include "fraclap/error.hpp"
#include "fraclap/ju.hpp"
#include "fraclap/parallel.hpp"

namespace fraclap {

namespace {

namespace pt = boost::property_tree;

std::string num(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

[[noreturn]] void bad_field(const std::string& field, const std::string& constraint) {
  fail(ErrorCode::invalid_parameter, field + ": " + constraint);
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
    bad_field(field, "expected a finite number, got '" + text + "'");
  return v;
}

long long parse_int(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) bad_field(field, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_field(field, "expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(field, item));
  }
  if (out.empty()) bad_field(field, "expected a comma-separated list of numbers");
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"schema_version", "seed"}},
      {"problem", {"N", "beta", "p", "q_list", "q_start", "q_stop", "q_step", "gamma", "epsilon"}},
      {"initial", {"descriptor"}},
      {"exploratory", {"q_list", "descriptor"}},
      {"grid", {"n", "L"}},
      {"sim", {"t_max", "cfl", "dt_min", "blowup_threshold", "dealias", "record_stride"}},
      {"testfn", {"enabled", "T_list", "ell", "eta"}},
      {"output", {"directory"}},
  };
  return keys;
}

bool is_random_initial(const std::string& text) { return trim(text) == "random"; }

std::uint64_t derived_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

Field initial_field(const SweepConfig& config, const std::string& text, std::size_t index) {
  const GridSpec grid = make_grid(config.N, config.n, config.L);
  if (is_random_initial(text)) return random_smooth_positive(grid, derived_seed(config.seed, index));
  return sample(parse_descriptor(text), grid);
}

SimParams sim_params(const SweepConfig& config, double q) {
  SimParams sp;
  sp.p = config.p;
  sp.q = q;
  sp.beta = config.beta;
  sp.gamma = config.gamma;
  return sp;
}

ExponentParams exponent_params(const SweepConfig& config, double q) {
  return {config.p, q, config.beta, config.N, config.gamma, config.epsilon};
}

int outcome_code(Classification c) {
  switch (c) {
    case Classification::blowup: return 1;
    case Classification::decay: return -1;
    case Classification::undecided: return 0;
  }
  return 0;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io_error, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorCode::io_error, "failed writing " + path.string());
}

}  // namespace

SweepConfig parse_sweep_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::invalid_parameter, std::string("config: ") + e.message() + " (line " +
                                           std::to_string(e.line()) + ")");
  }

  // Reject unknown sections and keys up front.
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (!known_keys().at("").count(name)) bad_field(name, "unknown top-level key");
      continue;
    }
    const auto section = known_keys().find(name);
    if (section == known_keys().end() || name.empty()) bad_field(name, "unknown section");
    for (const auto& [key, value] : node)
      if (!section->second.count(key)) bad_field(name + "." + key, "unknown key");
  }

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
    return std::nullopt;
  };

  SweepConfig c;
  const auto version = get("schema_version");
  if (!version) bad_field("schema_version", "missing; expected " + std::to_string(sweep_schema_version));
  c.schema_version = static_cast<int>(parse_int("schema_version", *version));
  if (auto v = get("seed")) {
    const long long s = parse_int("seed", *v);
    if (s < 0) bad_field("seed", "must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }

  if (auto v = get("problem.N")) c.N = static_cast<int>(parse_int("problem.N", *v));
  if (auto v = get("problem.beta")) c.beta = parse_double("problem.beta", *v);
  if (auto v = get("problem.p")) c.p = parse_double("problem.p", *v);
  if (auto v = get("problem.gamma")) c.gamma = parse_double("problem.gamma", *v);
  if (auto v = get("problem.epsilon")) c.epsilon = parse_double("problem.epsilon", *v);

  const auto q_list = get("problem.q_list");
  const auto q_start = get("problem.q_start");
  const auto q_stop = get("problem.q_stop");
  const auto q_step = get("problem.q_step");
  const bool any_range = q_start || q_stop || q_step;
  if (q_list && any_range) bad_field("problem.q_list", "give either q_list or q_start/q_stop/q_step, not both");
  if (q_list) {
    c.q_values = parse_list("problem.q_list", *q_list);
  } else if (any_range) {
    if (!(q_start && q_stop && q_step)) bad_field("problem.q_start", "q_start, q_stop and q_step must all be set");
    const double start = parse_double("problem.q_start", *q_start);
    const double stop = parse_double("problem.q_stop", *q_stop);
    const double stepv = parse_double("problem.q_step", *q_step);
    if (!(stepv > 0.0)) bad_field("problem.q_step", "must be positive");
    if (stop < start) bad_field("problem.q_stop", "must be >= q_start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / stepv + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) c.q_values.push_back(start + static_cast<double>(i) * stepv);
  } else {
    bad_field("problem.q_list", "missing; give q_list or q_start/q_stop/q_step");
  }

  if (auto v = get("initial.descriptor")) c.initial = trim(*v);
  if (auto v = get("exploratory.q_list")) c.exploratory_q = parse_list("exploratory.q_list", *v);
  if (auto v = get("exploratory.descriptor")) c.exploratory_initial = trim(*v);

  if (auto v = get("grid.n")) {
    const long long n = parse_int("grid.n", *v);
    if (n <= 0) bad_field("grid.n", "must be a positive power of two >= 16");
    c.n = static_cast<std::size_t>(n);
  }
  if (auto v = get("grid.L")) c.L = parse_double("grid.L", *v);

  if (auto v = get("sim.t_max")) c.sim.t_max = parse_double("sim.t_max", *v);
  if (auto v = get("sim.cfl")) c.sim.cfl = parse_double("sim.cfl", *v);
  if (auto v = get("sim.dt_min")) c.sim.dt_min = parse_double("sim.dt_min", *v);
  if (auto v = get("sim.blowup_threshold")) c.sim.blowup_threshold = parse_double("sim.blowup_threshold", *v);
  if (auto v = get("sim.dealias")) c.sim.dealias = parse_bool("sim.dealias", *v);
  if (auto v = get("sim.record_stride")) {
    const long long s = parse_int("sim.record_stride", *v);
    if (s < 1) bad_field("sim.record_stride", "must be >= 1");
    c.sim.record_stride = static_cast<std::size_t>(s);
  }

  if (auto v = get("testfn.enabled")) c.testfn_enabled = parse_bool("testfn.enabled", *v);
  if (auto v = get("testfn.T_list")) c.T_values = parse_list("testfn.T_list", *v);
  if (auto v = get("testfn.ell")) c.ell = static_cast<int>(parse_int("testfn.ell", *v));
  if (auto v = get("testfn.eta")) c.eta = static_cast<int>(parse_int("testfn.eta", *v));

  if (auto v = get("output.directory")) c.directory = trim(*v);

  validate(c);
  return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io_error, "cannot read config " + path.string());
  return parse_sweep_config(in);
}

void validate(const SweepConfig& c) {
  if (c.schema_version != sweep_schema_version)
    bad_field("schema_version", "expected " + std::to_string(sweep_schema_version) + ", got " +
                                    std::to_string(c.schema_version));
  if (c.N != 1 && c.N != 2) bad_field("problem.N", "must be 1 or 2");
  if (!(c.beta > 0.0 && c.beta < 2.0)) bad_field("problem.beta", "must lie in (0, 2)");
  if (!(c.p > 0.0)) bad_field("problem.p", "must be positive");
  if (c.q_values.empty()) bad_field("problem.q_list", "no q values");
  for (double q : c.q_values)
    if (!(q > 0.0)) bad_field("problem.q_list", "q values must be positive");
  for (double q : c.exploratory_q)
    if (!(q > c.p && q > 1.0)) bad_field("exploratory.q_list", "q values must exceed max(1, p)");
  if (c.gamma && !(*c.gamma > 0.0 && *c.gamma < c.N))
    bad_field("problem.gamma", "must satisfy 0<gamma<N (got " + num(*c.gamma) + ", N=" + std::to_string(c.N) + ")");
  if (c.epsilon && !(*c.epsilon > 0.0)) bad_field("problem.epsilon", "must be positive");

  try {
    (void)make_grid(c.N, c.n, c.L);
  } catch (const Error& e) {
    bad_field("grid", e.what());
  }

  auto check_initial = [&](const std::string& field, const std::string& text) {
    Field u0 = [&] {
      try {
        return initial_field(c, text, 0);
      } catch (const Error& e) {
        bad_field(field, e.what());
      }
    }();
    const auto v = u0.values();
    if (*std::min_element(v.begin(), v.end()) < 0.0) bad_field(field, "initial data must be nonnegative");
    try {
      validate(c.sim, norms(u0).sup);
    } catch (const Error& e) {
      bad_field("sim", e.what());
    }
  };
  check_initial("initial.descriptor", c.initial);
  if (!c.exploratory_q.empty()) check_initial("exploratory.descriptor", c.exploratory_initial);

  if (c.testfn_enabled) {
    if (c.T_values.size() < 4) bad_field("testfn.T_list", "needs at least 4 values");
    for (double T : c.T_values)
      if (!(T > 1.0)) bad_field("testfn.T_list", "values must exceed 1");
    const auto [lo, hi] = std::minmax_element(c.T_values.begin(), c.T_values.end());
    if (*hi < 4.0 * *lo) bad_field("testfn.T_list", "values must span at least two octaves");
    if (c.ell && *c.ell < 2) bad_field("testfn.ell", "must be >= 2");
    if (c.eta && *c.eta < 2) bad_field("testfn.eta", "must be >= 2");
    for (double q : c.q_values) {
      if (!(q > c.p)) continue;
      if (!(q > 1.0)) bad_field("testfn.enabled", "test-function slopes need q > 1 (q=" + num(q) + ")");
      const CutoffSpec d = default_cutoff(c.p, q);
      if (c.ell.value_or(d.ell) <= q / (q - c.p))
        bad_field("testfn.ell", "must exceed q/(q-p) for q=" + num(q));
      if (c.eta.value_or(d.eta) <= q / (q - 1.0)) bad_field("testfn.eta", "must exceed q/(q-1) for q=" + num(q));
    }
  }
  if (c.directory.empty()) bad_field("output.directory", "must not be empty");
}

SweepPlan plan(const SweepConfig& config) {
  SweepPlan out;
  for (double q : config.q_values) {
    if (!(q > config.p)) {
      out.skipped_q.push_back(q);
      continue;
    }
    out.runs.push_back({q, false, config.initial});
  }
  for (double q : config.exploratory_q) out.runs.push_back({q, true, config.exploratory_initial});
  return out;
}

nlohmann::json row_to_json(const SweepRow& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"index", r.index},
          {"p", r.p},
          {"q", r.q},
          {"beta", r.beta},
          {"N", r.N},
          {"gamma", opt(r.gamma)},
          {"predicted_regime", to_string(r.predicted_regime)},
          {"outcome", to_string(r.outcome)},
          {"t_blowup", opt(r.t_blowup)},
          {"t_final", r.t_final},
          {"final_sup", std::isfinite(r.final_sup) ? nlohmann::json(r.final_sup) : nlohmann::json("inf")},
          {"steps", r.steps},
          {"diverged", r.diverged},
          {"slope_I", opt(r.slope_I)},
          {"slope_lower", opt(r.slope_lower)},
          {"exploratory", r.exploratory},
          {"initial", r.initial}};
}

std::vector<SweepRow> run_sweep(const SweepConfig& config, const SweepPlan& plan,
                                const std::optional<std::filesystem::path>& runs_dir) {
  std::vector<SweepRow> rows(plan.runs.size());
  parallel_for(0, plan.runs.size(), [&](std::size_t i) {
    const auto& run_spec = plan.runs[i];
    SweepRow& row = rows[i];
    row.index = i;
    row.p = config.p;
    row.q = run_spec.q;
    row.beta = config.beta;
    row.N = config.N;
    row.gamma = config.gamma;
    row.exploratory = run_spec.exploratory;
    row.initial = run_spec.initial;
    row.predicted_regime = classify(exponent_params(config, run_spec.q));

    const Field u0 = initial_field(config, run_spec.initial, i);
    const SimOutcome outcome = run(u0, sim_params(config, run_spec.q), config.sim, true);
    row.outcome = outcome.classification;
    row.t_blowup = outcome.t_blowup;
    row.t_final = outcome.t_final;
    row.final_sup = outcome.final_sup;
    row.steps = outcome.steps;
    row.diverged = outcome.diverged;

    if (config.testfn_enabled && !run_spec.exploratory) {
      ScalingInputs in;
      in.params = exponent_params(config, run_spec.q);
      in.T_values = config.T_values;
      CutoffSpec cut = default_cutoff(config.p, run_spec.q);
      if (config.ell) cut.ell = *config.ell;
      if (config.eta) cut.eta = *config.eta;
      in.cutoff = cut;
      const ScalingReport rep = scaling_fit(in);
      row.slope_I = rep.fit_total.slope;
      if (rep.fit_lower) row.slope_lower = rep.fit_lower->slope;
    }

    if (runs_dir) {
      nlohmann::json j{{"row", row_to_json(row)}, {"outcome", outcome.to_json()}};
      std::ostringstream name;
      name << "run_" << std::setw(3) << std::setfill('0') << i << ".json";
      write_text(*runs_dir / name.str(), j.dump(2) + "\n");
    }
  });
  return rows;
}

nlohmann::json SweepSummary::to_json() const {
  nlohmann::json j;
  j["rows"] = rows;
  j["decided"] = decided;
  j["matching"] = matching;
  j["agreement"] = agreement ? nlohmann::json(*agreement) : nlohmann::json("not-applicable");
  j["exploratory"] = exploratory;
  auto& arr = j["disagreements"] = nlohmann::json::array();
  for (const auto& r : disagreements) arr.push_back(row_to_json(r));
  return j;
}

SweepSummary chart(std::span<const SweepRow> rows) {
  require(!rows.empty(), ErrorCode::empty_input, "chart needs at least one row");
  SweepSummary s;
  s.rows = rows.size();
  for (const auto& r : rows) {
    if (r.exploratory) ++s.exploratory;
    if (!predicts_nonexistence(r.predicted_regime)) continue;
    if (r.outcome == Classification::undecided) continue;
    ++s.decided;
    if (r.outcome == Classification::blowup)
      ++s.matching;
    else
      s.disagreements.push_back(r);
  }
  if (s.decided > 0) s.agreement = static_cast<double>(s.matching) / static_cast<double>(s.decided);
  return s;
}

void write_rows_csv(std::span<const SweepRow> rows, std::ostream& out) {
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  out << "p,q,beta,N,gamma,predicted_regime,outcome,t_blowup,final_sup,steps,slope_I,slope_lower,exploratory\n";
  for (const auto& r : rows) {
    out << num(r.p) << ',' << num(r.q) << ',' << num(r.beta) << ',' << r.N << ',' << opt(r.gamma) << ','
        << to_string(r.predicted_regime) << ',' << to_string(r.outcome) << ',' << opt(r.t_blowup) << ','
        << (std::isfinite(r.final_sup) ? num(r.final_sup) : std::string("inf")) << ',' << r.steps << ','
        << opt(r.slope_I) << ',' << opt(r.slope_lower) << ',' << (r.exploratory ? "true" : "false") << '\n';
  }
}

void write_chart_dat(std::span<const SweepRow> rows, const SweepConfig& config, std::ostream& out) {
  out << "# q outcome(1=blowup,0=undecided,-1=decay) predicts_nonexistence exploratory\n";
  out << "# q_star " << num(q_star(config.p, config.beta, config.N)) << '\n';
  if (config.gamma) out << "# q_star_star " << num(q_star_star(config.p, config.beta, *config.gamma)) << '\n';
  for (const auto& r : rows)
    out << num(r.q) << ' ' << outcome_code(r.outcome) << ' ' << (predicts_nonexistence(r.predicted_regime) ? 1 : 0)
        << ' ' << (r.exploratory ? 1 : 0) << '\n';
}

SweepResult run_config(SweepConfig config) {
  SweepResult result;
  result.directory = config.directory;
  try {
    validate(config);
  } catch (const Error& e) {
    result.exit_code = 2;
    result.message = e.what();
    return result;
  }

  const SweepPlan p = plan(config);
  for (double q : p.skipped_q)
    spdlog::info("skipping q={} (needs q > p={})", num(q), num(config.p));
  if (p.runs.empty()) {
    result.exit_code = 2;
    result.message = "problem.q_list: every q value is <= p; nothing to run";
    return result;
  }

  const std::filesystem::path runs_dir = config.directory / "runs";
  std::filesystem::create_directories(runs_dir);
  result.rows = run_sweep(config, p, runs_dir);
  result.summary = chart(result.rows);

  std::ostringstream csv;
  write_rows_csv(result.rows, csv);
  write_text(config.directory / "rows.csv", csv.str());

  std::ostringstream dat;
  write_chart_dat(result.rows, config, dat);
  write_text(config.directory / "chart.dat", dat.str());

  nlohmann::json summary = result.summary.to_json();
  summary["timestamp"] = timestamp();
  summary["seed"] = config.seed;
  summary["skipped_q"] = p.skipped_q;
  summary["q_star"] = q_star(config.p, config.beta, config.N);
  summary["q_star_star"] =
      config.gamma ? nlohmann::json(q_star_star(config.p, config.beta, *config.gamma)) : nlohmann::json(nullptr);
  write_text(config.directory / "summary.json", summary.dump(2) + "\n");

  std::ostringstream txt;
  txt << "rows: " << result.summary.rows << " (exploratory " << result.summary.exploratory << ", skipped "
      << p.skipped_q.size() << ")\n";
  txt << "decided: " << result.summary.decided << ", matching blowup: " << result.summary.matching << '\n';
  txt << "agreement: "
      << (result.summary.agreement ? num(100.0 * *result.summary.agreement) + "%" : std::string("not-applicable"))
      << '\n';
  for (const auto& r : result.summary.disagreements)
    txt << "disagreement: q=" << num(r.q) << " predicted " << to_string(r.predicted_regime) << " observed "
        << to_string(r.outcome) << " final_sup=" << num(r.final_sup) << " t_final=" << num(r.t_final) << '\n';
  for (const auto& r : result.rows)
    if (r.exploratory)
      txt << "exploratory (no theorem applies): q=" << num(r.q) << " initial " << r.initial << " -> "
          << to_string(r.outcome) << '\n';
  write_text(config.directory / "summary.txt", txt.str());

  for (const auto& r : result.rows)
    if (r.diverged) {
      result.exit_code = 3;
      result.message = "run " + std::to_string(r.index) + " (q=" + num(r.q) + ") diverged";
    }
  return result;
}

SweepResult run_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override,
                       std::optional<std::filesystem::path> out_override) {
  SweepConfig config;
  try {
    config = load_sweep_config(path);
  } catch (const Error& e) {
    SweepResult r;
    r.exit_code = 2;
    r.message = e.what();
    return r;
  }
  if (seed_override) config.seed = *seed_override;
  if (out_override) config.directory = *out_override;
  return run_config(std::move(config));
}

}  // namespace fraclap
