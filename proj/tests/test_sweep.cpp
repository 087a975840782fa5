#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fraclap/error.hpp"
#include "fraclap/sweep.hpp"
#include "json.hpp"

using namespace fraclap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fraclap_test_sweep_" + name);
  fs::remove_all(dir);
  return dir;
}

SweepConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sweep_config(in);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected a validation error");
  return {};
}

const std::string minimal = R"(schema_version = 1
seed = 7
[problem]
N = 1
beta = 1
p = 1
q_list = 1.5
[grid]
n = 128
L = 20
[sim]
t_max = 20
)";

SweepRow row(double q, Regime regime, Classification outcome, bool exploratory = false) {
  SweepRow r;
  r.p = 1.0;
  r.q = q;
  r.beta = 1.0;
  r.predicted_regime = regime;
  r.outcome = outcome;
  r.exploratory = exploratory;
  return r;
}

}  // namespace

TEST_CASE("minimal config produces one row and one outcome record") {
  SweepConfig c = parse(minimal);
  c.directory = scratch("minimal");
  const SweepResult r = run_config(c);
  CHECK(r.exit_code == 0);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].outcome == Classification::blowup);
  CHECK(r.rows[0].predicted_regime == Regime::t1_nonexistence_strict);

  const std::string csv = read_file(c.directory / "rows.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.rfind("p,q,beta,N,gamma,predicted_regime,outcome,t_blowup,final_sup,steps,slope_I,slope_lower,exploratory\n",
                  0) == 0);
  const auto run0 = nlohmann::json::parse(read_file(c.directory / "runs" / "run_000.json"));
  CHECK(run0["outcome"]["classification"] == "blowup");
  CHECK(fs::exists(c.directory / "summary.json"));
  CHECK(fs::exists(c.directory / "summary.txt"));
  CHECK(fs::exists(c.directory / "chart.dat"));
  fs::remove_all(c.directory);
}

TEST_CASE("q range expands to 20 rows with theorem regimes up to q*") {
  SweepConfig c = parse(R"(schema_version = 1
[problem]
N = 1
beta = 1
p = 1
q_start = 1.1
q_stop = 3.0
q_step = 0.1
[grid]
n = 64
L = 20
[sim]
t_max = 5
)");
  REQUIRE(c.q_values.size() == 20);
  const SweepPlan p = plan(c);
  CHECK(p.runs.size() == 20);
  CHECK(p.skipped_q.empty());
  c.directory = scratch("range");
  const SweepResult r = run_config(c);
  REQUIRE(r.rows.size() == 20);
  for (const auto& row : r.rows) {
    if (row.q <= 2.0 + 1e-9)
      CHECK(predicts_nonexistence(row.predicted_regime));
    else
      CHECK(row.predicted_regime == Regime::outside_theorems);
  }
  CHECK(r.rows[9].predicted_regime == Regime::t1_nonexistence_critical);
  fs::remove_all(c.directory);
}

TEST_CASE("q values not above p are skipped and reported") {
  SweepConfig c = parse(R"(schema_version = 1
[problem]
p = 1.2
q_list = 1.0, 1.2, 1.5
)");
  const SweepPlan p = plan(c);
  CHECK(p.runs.size() == 1);
  CHECK(p.skipped_q.size() == 2);
}

TEST_CASE("gamma outside (0, N) fails before anything is written") {
  const fs::path dir = scratch("gamma");
  const fs::path cfg = fs::temp_directory_path() / "fraclap_test_sweep_gamma.ini";
  std::ofstream(cfg) << "schema_version = 1\n[problem]\nN = 1\np = 1\nq_list = 1.5\ngamma = 1.5\n[output]\ndirectory = "
                     << dir.string() << "\n";
  const SweepResult r = run_config(cfg);
  CHECK(r.exit_code == 2);
  CHECK(r.message.find("0<gamma<N") != std::string::npos);
  CHECK_FALSE(fs::exists(dir));
  fs::remove(cfg);
}

TEST_CASE("validation names the offending field") {
  CHECK(error_of("schema_version = 2\n[problem]\nq_list = 2\n").find("schema_version") != std::string::npos);
  CHECK(error_of("[problem]\nq_list = 2\n").find("schema_version") != std::string::npos);
  CHECK(error_of("schema_version = 1\n[problem]\nq_list = 2\nbogus = 1\n").find("problem.bogus") != std::string::npos);
  CHECK(error_of("schema_version = 1\n[problem]\nq_list = 2\nbeta = 2\n").find("problem.beta") != std::string::npos);
  CHECK(error_of("schema_version = 1\n[problem]\nq_list = 2\n[grid]\nn = 100\n").find("grid") != std::string::npos);
  CHECK(error_of("schema_version = 1\n[problem]\nq_list = 2\n[sim]\ncfl = 2\n").find("sim") != std::string::npos);
  CHECK(error_of("schema_version = 1\n[problem]\nq_list = 2\n[sim]\nblowup_threshold = 0.5\n").find("sim") !=
        std::string::npos);
  CHECK(error_of("schema_version = 1\n[problem]\nq_list = 2, x\n").find("problem.q_list") != std::string::npos);
  CHECK(error_of("schema_version = 1\n[problem]\n").find("problem.q_list") != std::string::npos);
  CHECK(error_of("schema_version = 1\n[problem]\nq_list = 2\n[testfn]\nenabled = true\nT_list = 16,32\n")
            .find("testfn.T_list") != std::string::npos);
  CHECK(error_of("schema_version = 1\n[problem]\nq_list = 2\n[initial]\ndescriptor = sinc:1\n")
            .find("initial.descriptor") != std::string::npos);
  CHECK(error_of("schema_version = 1\n[problem]\nq_list = 2\n[mystery]\nx = 1\n").find("mystery") != std::string::npos);
}

TEST_CASE("chart agreement") {
  const SweepRow all_blow[] = {row(1.2, Regime::t1_nonexistence_strict, Classification::blowup),
                               row(1.4, Regime::t1_nonexistence_strict, Classification::blowup)};
  const SweepSummary s1 = chart(all_blow);
  REQUIRE(s1.agreement);
  CHECK(*s1.agreement == 1.0);
  CHECK(s1.disagreements.empty());

  const SweepRow undecided[] = {row(1.2, Regime::t1_nonexistence_strict, Classification::undecided),
                                row(2.0, Regime::t1_nonexistence_critical, Classification::undecided)};
  const SweepSummary s2 = chart(undecided);
  CHECK_FALSE(s2.agreement);
  CHECK(s2.decided == 0);
  CHECK(s2.to_json()["agreement"] == "not-applicable");

  const SweepRow mixed[] = {row(1.2, Regime::t1_nonexistence_strict, Classification::blowup),
                            row(1.5, Regime::t1_nonexistence_strict, Classification::decay),
                            row(1.8, Regime::t1_nonexistence_strict, Classification::undecided),
                            row(1.9, Regime::t1_nonexistence_strict, Classification::blowup),
                            row(3.0, Regime::outside_theorems, Classification::decay, true)};
  const SweepSummary s3 = chart(mixed);
  CHECK(s3.decided == 3);
  CHECK(s3.matching == 2);
  CHECK(*s3.agreement == doctest::Approx(2.0 / 3.0));
  CHECK(s3.disagreements.size() == 1);
  CHECK(s3.exploratory == 1);

  CHECK_THROWS_AS(chart(std::span<const SweepRow>{}), Error);
}

TEST_CASE("chart data marks the critical exponents") {
  SweepConfig c = parse("schema_version = 1\n[problem]\nN = 2\nq_list = 1.2\ngamma = 1\n");
  const SweepRow rows[] = {row(1.2, Regime::t1_nonexistence_strict, Classification::blowup)};
  std::ostringstream out;
  write_chart_dat(rows, c, out);
  const std::string text = out.str();
  CHECK(text.find("# q_star 1.5\n") != std::string::npos);
  CHECK(text.find("# q_star_star 2\n") != std::string::npos);
  CHECK(text.find("1.2 1 1 0\n") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical CSV") {
  const std::string text = R"(schema_version = 1
seed = 11
[problem]
N = 1
beta = 1
p = 1
q_list = 1.3, 1.7, 2.5
[initial]
descriptor = random
[exploratory]
q_list = 3
[grid]
n = 64
L = 20
[sim]
t_max = 8
[testfn]
enabled = true
T_list = 16, 32, 64, 128
)";
  SweepConfig a = parse(text), b = parse(text);
  a.directory = scratch("det_a");
  b.directory = scratch("det_b");
  REQUIRE(run_config(a).exit_code == 0);
  REQUIRE(run_config(b).exit_code == 0);
  CHECK(read_file(a.directory / "rows.csv") == read_file(b.directory / "rows.csv"));
  CHECK(read_file(a.directory / "chart.dat") == read_file(b.directory / "chart.dat"));
  CHECK(read_file(a.directory / "runs" / "run_001.json") == read_file(b.directory / "runs" / "run_001.json"));

  SweepConfig c = parse(text);
  c.seed = 12;
  c.directory = scratch("det_c");
  REQUIRE(run_config(c).exit_code == 0);
  CHECK(read_file(a.directory / "rows.csv") != read_file(c.directory / "rows.csv"));
  for (const auto& d : {a.directory, b.directory, c.directory}) fs::remove_all(d);
}

#ifdef FRACLAP_CLI
namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(FRACLAP_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command-line smoke") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  const std::string d = dir.string();

  CHECK(cli("exponents --p 1 --q 1.5 --beta 1 --N 1 --out " + d + "/exp.json") == 0);
  const auto exps = nlohmann::json::parse(read_file(dir / "exp.json"));
  CHECK(exps["regime"] == "T1_nonexistence_strict");
  CHECK(cli("exponents --p 2 --q 1.5") == 2);

  CHECK(cli("frac-op --input gaussian:1,1 --n 256 --beta 1 --output " + d + "/op.bin") == 0);
  const auto diag = nlohmann::json::parse(read_file(dir / "op.bin.json"));
  CHECK(diag["backend"] == "spectral");
  CHECK(fs::file_size(dir / "op.bin") == 24 + 8 * 256);

  CHECK(cli("ju-check --count 8 --n 256 --seed 3 --report " + d + "/ju.json") == 0);
  CHECK(nlohmann::json::parse(read_file(dir / "ju.json"))["cases"].size() == 8);

  CHECK(cli("testfn-scaling --p 1 --q 1.5 --T-list 16,32,64,128 --out " + d + "/tf.csv") == 0);
  CHECK(read_file(dir / "tf.csv").rfind("T,B,I1,I2,lower_bound,predicted_delta,predicted_growth\n", 0) == 0);

  CHECK(cli("simulate --p 1 --q 1.5 --n 128 --t-max 10 --snapshot --out " + d + "/sim") == 0);
  CHECK(nlohmann::json::parse(read_file(dir / "sim" / "outcome.json"))["classification"] == "blowup");
  CHECK(fs::exists(dir / "sim" / "history.csv"));
  CHECK(fs::exists(dir / "sim" / "final.bin"));

  std::ofstream(dir / "bad.ini") << "schema_version = 1\n[problem]\nN = 1\nq_list = 1.5\ngamma = 2\n";
  CHECK(cli("sweep --config " + d + "/bad.ini --out " + d + "/bad_out") == 2);
  CHECK_FALSE(fs::exists(dir / "bad_out"));

  std::ofstream(dir / "ok.ini") << minimal;
  CHECK(cli("sweep --config " + d + "/ok.ini --out " + d + "/ok_out --seed 5") == 0);
  CHECK(fs::exists(dir / "ok_out" / "rows.csv"));
  fs::remove_all(dir);
}
#endif
