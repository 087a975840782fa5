#pragma once

// Configuration-driven parameter sweeps: each q value gets a predicted regime,
// a simulation outcome and optionally test-function slopes.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraclap/exponents.hpp"
#include "fraclap/simulator.hpp"
#include "fraclap/testfn.hpp"
#include "json.hpp"

namespace fraclap {

inline constexpr int sweep_schema_version = 1;

struct SweepConfig {
  int schema_version = sweep_schema_version;
  std::uint64_t seed = 0;

  // [problem]
  int N = 1;
  double beta = 1.0;
  double p = 1.0;
  std::vector<double> q_values;  // expanded from q_list or q_start/q_stop/q_step
  std::optional<double> gamma;
  std::optional<double> epsilon;

  // [initial]: a field descriptor, or "random" for a seeded smooth positive field
  std::string initial = "gaussian:1,1";

  // [exploratory]: extra runs outside the theorems, labeled in every output
  std::vector<double> exploratory_q;
  std::string exploratory_initial = "gaussian:0.01,1";

  // [grid]
  std::size_t n = 256;
  double L = 20.0;

  // [sim]
  SimControls sim{};

  // [testfn]
  bool testfn_enabled = false;
  std::vector<double> T_values{16, 32, 64, 128, 256};
  std::optional<int> ell;
  std::optional<int> eta;

  // [output]
  std::filesystem::path directory = "sweep_out";
};

/// Parses the sectioned key = value file and validates it. Unknown keys,
/// unparsable values and violated constraints raise Error naming the field.
SweepConfig load_sweep_config(const std::filesystem::path& path);
SweepConfig parse_sweep_config(std::istream& in);
void validate(const SweepConfig& config);

struct SweepRow {
  std::size_t index = 0;
  double p = 0.0;
  double q = 0.0;
  double beta = 0.0;
  int N = 1;
  std::optional<double> gamma;
  Regime predicted_regime = Regime::outside_theorems;
  Classification outcome = Classification::undecided;
  std::optional<double> t_blowup;
  double t_final = 0.0;
  double final_sup = 0.0;
  std::size_t steps = 0;
  bool diverged = false;
  std::optional<double> slope_I;
  std::optional<double> slope_lower;
  bool exploratory = false;
  std::string initial;
};

struct SweepPlan {
  struct Run {
    double q = 0.0;
    bool exploratory = false;
    std::string initial;
  };
  std::vector<Run> runs;
  std::vector<double> skipped_q;  // q <= p, logged and left out
};

SweepPlan plan(const SweepConfig& config);

/// Executes the plan; rows come back in plan order. Per-run JSON records are
/// written to runs_dir when given.
std::vector<SweepRow> run_sweep(const SweepConfig& config, const SweepPlan& plan,
                                const std::optional<std::filesystem::path>& runs_dir = std::nullopt);

struct SweepSummary {
  std::size_t rows = 0;
  std::size_t decided = 0;   // nonexistence regime with a blowup or decay outcome
  std::size_t matching = 0;  // of those, classified blowup
  std::optional<double> agreement;  // empty when nothing was decided
  std::vector<SweepRow> disagreements;
  std::size_t exploratory = 0;

  nlohmann::json to_json() const;
};

SweepSummary chart(std::span<const SweepRow> rows);

void write_rows_csv(std::span<const SweepRow> rows, std::ostream& out);
/// Whitespace-separated: q outcome_code regime_code exploratory, with comment
/// lines marking q* and q**.
void write_chart_dat(std::span<const SweepRow> rows, const SweepConfig& config, std::ostream& out);
nlohmann::json row_to_json(const SweepRow& row);

struct SweepResult {
  int exit_code = 0;  // 0 success, 2 validation failure, 3 diverged run
  std::filesystem::path directory;
  std::vector<SweepRow> rows;
  SweepSummary summary;
  std::string message;
};

/// Loads, validates and runs; writes rows.csv, runs/run_NNN.json,
/// summary.json, summary.txt and chart.dat. Nothing is written when
/// validation fails.
SweepResult run_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = {},
                       std::optional<std::filesystem::path> out_override = {});
SweepResult run_config(SweepConfig config);

}  // namespace fraclap
