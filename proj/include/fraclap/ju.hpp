#pragma once

// Numerical checks of the pointwise convexity inequality
//   (-Delta)^{delta/2} psi^q <= q psi^{q-1} (-Delta)^{delta/2} psi
// for nonnegative psi, q >= 1, delta in [0, 2], and of the Young step behind it.

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "fraclap/frac_operator.hpp"
#include "json.hpp"

namespace fraclap {

struct JuCase {
  Field psi;
  double q = 2.0;
  double delta = 1.0;
  Backend backend = Backend::spectral;
  double calibration_factor = 1.0;  // singular backend only
};

struct JuGap {
  Field gap;  // q psi^{q-1} Op(psi) - Op(psi^q)
  double max_violation = 0.0;  // max(0, -min gap)
};

JuGap ju_gap(const JuCase& c);

/// Largest positive value of psi_a^{q-1} psi_b - ((q-1)/q psi_a^q + psi_b^q / q)
/// over the sampled index pairs (a, b). Evaluated in extended precision.
double young_step_check(const Field& psi, double q,
                        std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// Same bound evaluated directly on two nonnegative values.
double young_excess(double psi_x, double psi_xz, double q);

/// Smooth strictly positive periodic field: random low-mode Fourier series,
/// shifted positive, clipped at zero and mollified by exp(-eps |k|^2).
Field random_smooth_positive(const GridSpec& grid, std::uint64_t seed);

struct JuSuiteConfig {
  std::size_t count = 100;
  std::vector<double> q_list{1.0, 1.5, 2.0, 3.0};
  std::vector<double> delta_list{0.5, 1.0, 1.5};
  std::uint64_t seed = 42;
  double tolerance = 1e-8;
  int dim = 1;
  std::size_t n = 1024;
  double half_width = 10.0;
  Backend backend = Backend::spectral;
};

struct JuCaseReport {
  std::size_t index = 0;
  double q = 1.0;
  double delta = 0.0;
  double max_violation = 0.0;
  double min_psi = 0.0;
  double gap_integral = 0.0;
  bool near_zero = false;  // min psi tiny relative to max psi; reported, not judged
};

struct JuReport {
  std::vector<JuCaseReport> cases;
  double aggregate_max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t near_zero_cases = 0;

  nlohmann::json to_json() const;
};

/// Case i uses q_list[i % |q|], delta_list[(i / |q|) % |delta|] and a field
/// seeded from (seed, i), so the report does not depend on evaluation order.
JuReport ju_sweep(const JuSuiteConfig& config);

}  // namespace fraclap
