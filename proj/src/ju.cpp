#include "fraclap/ju.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "fraclap/error.hpp"
#include "fraclap/parallel.hpp"

namespace fraclap {

namespace {

Field pointwise_power(const Field& f, double exponent) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::pow(f[i], exponent);
  return Field(f.grid(), std::move(out));
}

}  // namespace

JuGap ju_gap(const JuCase& c) {
  require(c.q >= 1.0, ErrorCode::invalid_parameter, "Ju gap needs q >= 1");
  require(c.delta >= 0.0 && c.delta <= 2.0, ErrorCode::invalid_parameter, "Ju gap needs delta in [0, 2]");
  require(c.psi.is_finite(), ErrorCode::non_finite, "psi must be finite");
  const auto psi = c.psi.values();
  require(*std::min_element(psi.begin(), psi.end()) >= 0.0, ErrorCode::invalid_parameter,
          "psi must be nonnegative");

  OperatorSpec spec;
  spec.beta = c.delta;
  spec.backend = c.backend;
  spec.calibration_factor = c.calibration_factor;

  const Field op_psi = apply_operator(c.psi, spec);
  const Field op_psi_q = apply_operator(pointwise_power(c.psi, c.q), spec);

  std::vector<double> gap(c.psi.size());
  double min_gap = 0.0;
  for (std::size_t i = 0; i < gap.size(); ++i) {
    // pow(0, 0) == 1 gives the q = 1 convention.
    gap[i] = c.q * std::pow(psi[i], c.q - 1.0) * op_psi[i] - op_psi_q[i];
    min_gap = std::min(min_gap, gap[i]);
  }
  return {Field(c.psi.grid(), std::move(gap)), std::max(0.0, -min_gap)};
}

double young_excess(double psi_x, double psi_xz, double q) {
  require(q > 1.0, ErrorCode::invalid_parameter, "Young step needs q > 1");
  require(psi_x >= 0.0 && psi_xz >= 0.0, ErrorCode::invalid_parameter, "Young step needs nonnegative values");
  const long double a = psi_x, b = psi_xz, Q = q;
  const long double lhs = std::pow(a, Q - 1.0L) * b;
  const long double rhs = (Q - 1.0L) / Q * std::pow(a, Q) + std::pow(b, Q) / Q;
  return static_cast<double>(lhs - rhs);
}

double young_step_check(const Field& psi, double q,
                        std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  require(q > 1.0, ErrorCode::invalid_parameter, "Young step needs q > 1");
  double worst = 0.0;
  for (const auto& [a, b] : pairs) {
    require(a < psi.size() && b < psi.size(), ErrorCode::invalid_parameter, "pair index outside the grid");
    worst = std::max(worst, young_excess(psi[a], psi[b], q));
  }
  return worst;
}

Field random_smooth_positive(const GridSpec& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const int modes = grid.dim() == 1 ? 6 : 4;
  const double base = std::numbers::pi / grid.half_width();
  struct Term {
    double k0, k1, a, b;
  };
  std::vector<Term> terms;
  if (grid.dim() == 1) {
    for (int k = 1; k <= modes; ++k) terms.push_back({k * base, 0.0, normal(rng) / k, normal(rng) / k});
  } else {
    for (int i = -modes; i <= modes; ++i)
      for (int j = 0; j <= modes; ++j) {
        if (j == 0 && i <= 0) continue;
        const double decay = 1.0 + std::hypot(i, j);
        terms.push_back({i * base, j * base, normal(rng) / decay, normal(rng) / decay});
      }
  }
  const double margin = 0.05 + 0.45 * uniform(rng);
  const double mollifier = 0.05 * uniform(rng);

  const std::size_t n = grid.points_per_dim();
  std::vector<double> values(grid.size());
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    const double x0 = grid.coordinate(grid.dim() == 1 ? idx : idx / n);
    const double x1 = grid.dim() == 1 ? 0.0 : grid.coordinate(idx % n);
    double s = 0.0;
    for (const auto& t : terms) {
      const double phase = t.k0 * x0 + t.k1 * x1;
      s += t.a * std::cos(phase) + t.b * std::sin(phase);
    }
    values[idx] = s;
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double offset = -*lo + margin * (*hi - *lo);
  for (auto& v : values) v = std::max(v + offset, 0.0);

  const Field raw(grid, std::move(values));
  return apply_radial_multiplier(raw, [mollifier](double k) { return std::exp(-mollifier * k * k); });
}

nlohmann::json JuReport::to_json() const {
  nlohmann::json j;
  j["aggregate_max_violation"] = aggregate_max_violation;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  j["near_zero_cases"] = near_zero_cases;
  auto& arr = j["cases"] = nlohmann::json::array();
  for (const auto& c : cases)
    arr.push_back({{"index", c.index},
                   {"q", c.q},
                   {"delta", c.delta},
                   {"max_violation", c.max_violation},
                   {"min_psi", c.min_psi},
                   {"gap_integral", c.gap_integral},
                   {"near_zero", c.near_zero}});
  return j;
}

JuReport ju_sweep(const JuSuiteConfig& config) {
  require(config.count > 0 && !config.q_list.empty() && !config.delta_list.empty(), ErrorCode::empty_input,
          "Ju suite needs count > 0 and nonempty q and delta lists");
  for (double q : config.q_list) require(q >= 1.0, ErrorCode::invalid_parameter, "Ju suite q values must be >= 1");
  for (double d : config.delta_list)
    require(d >= 0.0 && d <= 2.0, ErrorCode::invalid_parameter, "Ju suite delta values must lie in [0, 2]");
  const GridSpec grid = make_grid(config.dim, config.n, config.half_width);

  JuReport report;
  report.tolerance = config.tolerance;
  report.cases.resize(config.count);

  // Calibrate once per delta for the singular backend.
  std::vector<double> calibration(config.delta_list.size(), 1.0);
  if (config.backend == Backend::singular_integral)
    for (std::size_t k = 0; k < config.delta_list.size(); ++k)
      calibration[k] = calibrate_constant(grid.dim(), config.delta_list[k], grid);

  const std::size_t nq = config.q_list.size();
  const std::size_t nd = config.delta_list.size();
  parallel_for(0, config.count, [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::array<std::uint64_t, 1> case_seed{};
    seq.generate(reinterpret_cast<std::uint32_t*>(case_seed.data()),
                 reinterpret_cast<std::uint32_t*>(case_seed.data()) + 2);

    JuCase c{random_smooth_positive(grid, case_seed[0]), config.q_list[i % nq], config.delta_list[(i / nq) % nd],
             config.backend, calibration[(i / nq) % nd]};
    const JuGap g = ju_gap(c);
    const auto psi = c.psi.values();
    const auto [lo, hi] = std::minmax_element(psi.begin(), psi.end());

    JuCaseReport& r = report.cases[i];
    r.index = i;
    r.q = c.q;
    r.delta = c.delta;
    r.max_violation = g.max_violation;
    r.min_psi = *lo;
    r.gap_integral = integrate(g.gap);
    r.near_zero = *lo < 1e-3 * *hi;
  });

  for (const auto& c : report.cases) {
    report.aggregate_max_violation = std::max(report.aggregate_max_violation, c.max_violation);
    if (c.near_zero) ++report.near_zero_cases;
  }
  report.pass = report.aggregate_max_violation <= config.tolerance;
  return report;
}

}  // namespace fraclap
