#pragma once

// Pseudospectral integration of
//   u_t = -(-Delta)^{beta/2}(|u|^p) + |u|^q
// on the periodic box with SSP-RK3 and numerical blow-up detection.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fraclap/exponents.hpp"
#include "fraclap/field.hpp"
#include "json.hpp"

namespace fraclap {

enum class DiffusionForm {
  natural_power,   // u^p for integer p, |u|^p otherwise
  absolute_power,  // |u|^p
  signed_power,    // sign(u) |u|^p; equals u for p = 1 (linear oracle)
};

struct SimParams {
  double p = 1.0;
  double q = 2.0;
  double beta = 1.0;
  bool source_term = true;
  DiffusionForm diffusion = DiffusionForm::natural_power;
  std::optional<double> gamma;  // only used for the predicted regime
};

struct SimControls {
  double t_max = 10.0;
  double cfl = 0.4;
  double dt_min = 1e-10;
  double blowup_threshold = 1e6;
  bool dealias = true;  // 2/3 rule
  std::size_t record_stride = 1;
};

struct HistoryEntry {
  double t = 0.0;
  double sup = 0.0;
  double l2 = 0.0;
  double min = 0.0;
};

struct SimState {
  Field u;
  double t = 0.0;
  double dt = 0.0;
  std::size_t step_count = 0;
  std::vector<HistoryEntry> history;
};

enum class Classification { blowup, decay, undecided };
std::string_view to_string(Classification c);

enum class StepStatus { ok, dt_collapse, diverged };

struct SimOutcome {
  Classification classification = Classification::undecided;
  double t_final = 0.0;
  std::optional<double> t_blowup;
  double initial_sup = 0.0;
  double final_sup = 0.0;
  std::size_t steps = 0;
  bool diverged = false;
  bool dt_collapsed = false;
  Regime predicted_regime = Regime::outside_theorems;
  std::optional<double> q_star_star;  // set by probe_theorem2
  std::optional<double> delta_star;   // set by probe_theorem2
  std::string warning;                // e.g. data truncated by the box
  std::vector<HistoryEntry> history;
  Field final_field{make_grid(1, 16, 1.0)};

  nlohmann::json to_json() const;
};

/// -(-Delta)^{beta/2}(|u|^p) + |u|^q, both nonlinear products truncated to
/// |mode| <= n/3 on every axis when dealias is set.
Field rhs(const Field& u, const SimParams& params, bool dealias = true);

SimState initial_state(Field u0);

/// Stable step size cfl / (p sup^{p-1} k_max^beta + q sup^{q-1} + 1e-30).
double stable_dt(const Field& u, const SimParams& params, double cfl);

/// One SSP-RK3 step of size min(stable_dt, t_max - t). Leaves the state
/// untouched on dt_collapse; on diverged the state holds the non-finite field.
StepStatus step(SimState& state, const SimControls& controls, const SimParams& params);

/// Exact solution of u_t + (-Delta)^{beta/2} u = 0: multiplier exp(-|k|^beta t).
Field linear_exact(const Field& u0, double t, double beta);

void validate(const SimParams& params);
void validate(const SimControls& controls, double initial_sup);

/// Integrates to t_max, blow-up or divergence. probe_mode enforces u0 >= 0.
SimOutcome run(const Field& u0, const SimParams& params, const SimControls& controls, bool probe_mode = false);

/// Runs from u0 = eps (1 + |x|^2)^{-gamma/2} sampled on `grid`; needs 0 < gamma < N
/// and q < p + beta/gamma.
SimOutcome probe_theorem2(double gamma, double epsilon, const SimParams& params, const SimControls& controls,
                          const GridSpec& grid);

/// Columns t,sup,l2.
void write_history_csv(const SimOutcome& outcome, std::ostream& out);

}  // namespace fraclap
