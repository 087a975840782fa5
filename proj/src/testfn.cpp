#include "fraclap/testfn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "fraclap/cutoff.hpp"
#include "fraclap/error.hpp"
#include "fraclap/frac_operator.hpp"
#include "fraclap/parallel.hpp"

namespace fraclap {

namespace {

double resolved_box_factor(int dim, const QuadratureControls& controls) {
  if (controls.box_factor > 0.0) return controls.box_factor;
  return dim == 1 ? 4.0 : 2.0;
}

std::size_t points_for(double half_width, double target_spacing) {
  const auto needed = static_cast<std::size_t>(std::ceil(2.0 * half_width / target_spacing - 1e-9));
  return std::max<std::size_t>(16, std::bit_ceil(needed));
}

void check_exponents(double p, double q, double beta, const CutoffSpec& cutoff) {
  require(p > 0.0 && q > 1.0 && q > p, ErrorCode::invalid_parameter, "test-function integrals need q > max(1, p)");
  require(beta > 0.0 && beta <= 2.0, ErrorCode::invalid_parameter, "beta must lie in (0, 2]");
  require(cutoff.ell > q / (q - p), ErrorCode::invalid_parameter, "ell must exceed q/(q-p)");
  require(cutoff.eta > q / (q - 1.0), ErrorCode::invalid_parameter, "eta must exceed q/(q-1)");
}

}  // namespace

CutoffSpec default_cutoff(double p, double q) {
  require(q > p, ErrorCode::invalid_parameter, "default cutoff needs q > p");
  const int power = std::max(4, static_cast<int>(std::ceil(2.0 * q / (q - p))) + 1);
  return {power, power};
}

double TestFunctionPair::support_radius() const { return std::pow(B * T, alpha); }

double TestFunctionPair::space(double r) const { return cutoff::profile(r / support_radius()); }

double TestFunctionPair::time(double t) const { return cutoff::profile(t / T); }

double TestFunctionPair::time_derivative(double t) const { return cutoff::profile_derivative(t / T) / T; }

TestFunctionPair make_pair(double T, double alpha, double B) {
  require(T > 1.0, ErrorCode::invalid_parameter, "horizon T must exceed 1");
  require(B >= 1.0, ErrorCode::invalid_parameter, "dilation B must be >= 1");
  require(alpha > 0.0, ErrorCode::invalid_parameter, "alpha must be positive");
  return {T, B, alpha};
}

GridSpec adapted_grid(const TestFunctionPair& pair, int dim, const QuadratureControls& controls) {
  require(controls.cells_across_annulus >= 1, ErrorCode::invalid_parameter, "need at least one cell per annulus");
  const double R = pair.support_radius();
  const double L = resolved_box_factor(dim, controls) * R;
  require(L > R, ErrorCode::invalid_parameter, "box must contain the support");
  const double target = 0.5 * R / static_cast<double>(controls.cells_across_annulus);
  return make_grid(dim, points_for(L, target), L);
}

Field sample_space_profile(const TestFunctionPair& pair, const GridSpec& grid) {
  return sample(Bump{pair.support_radius()}, grid);
}

RhsIntegrals rhs_integrals(const TestFunctionPair& pair, double p, double q, double beta,
                           const CutoffSpec& cutoff, const GridSpec& grid, std::size_t time_nodes) {
  check_exponents(p, q, beta, cutoff);
  require(time_nodes >= 256, ErrorCode::invalid_parameter, "time quadrature needs >= 256 nodes");
  const double R = pair.support_radius();
  require(grid.spacing() <= R / 64.0, ErrorCode::grid_too_coarse,
          "grid spacing exceeds support_radius/64; the cutoff annulus is under-resolved");
  require(grid.half_width() >= R, ErrorCode::invalid_parameter, "box must contain the support");

  const double s = q / (q - p);
  const double q_tilde = q / (q - 1.0);

  const Field phi1 = sample_space_profile(pair, grid);
  const Field lap = spectral_frac_lap(phi1, beta);
  double space1 = 0.0, space2 = 0.0;
  for (std::size_t i = 0; i < phi1.size(); ++i) {
    if (phi1[i] > 0.0) space2 += std::pow(phi1[i], cutoff.ell);
    space1 += std::pow(phi1[i], cutoff.ell - s) * std::pow(std::abs(lap[i]), s);
  }
  space1 *= grid.cell_volume();
  space2 *= grid.cell_volume();

  const double dt = pair.T / static_cast<double>(time_nodes);
  double time1 = 0.0, time2 = 0.0;
  for (std::size_t k = 0; k < time_nodes; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * dt;
    const double phi2 = pair.time(t);
    if (phi2 <= 0.0) continue;
    time1 += std::pow(phi2, cutoff.eta);
    time2 += std::pow(phi2, cutoff.eta - q_tilde) * std::pow(std::abs(pair.time_derivative(t)), q_tilde);
  }
  return {space1 * time1 * dt, space2 * time2 * dt};
}

RhsIntegrals rhs_integrals(const TestFunctionPair& pair, double p, double q, double beta, int dim,
                           const CutoffSpec& cutoff, const QuadratureControls& controls) {
  return rhs_integrals(pair, p, q, beta, cutoff, adapted_grid(pair, dim, controls), controls.time_nodes);
}

double lower_bound_integral(const Descriptor& u0, const TestFunctionPair& pair, int dim, int ell,
                            const QuadratureControls& controls) {
  const auto* decay = std::get_if<AlgebraicDecay>(&u0);
  require(decay != nullptr, ErrorCode::invalid_parameter, "lower bound needs algebraic-decay initial data");
  require(decay->gamma > 0.0, ErrorCode::invalid_parameter, "gamma must be positive");
  require(decay->gamma < dim, ErrorCode::invalid_parameter,
          "gamma must satisfy 0<gamma<N; at gamma >= N the growth law changes");
  require(ell >= 1, ErrorCode::invalid_parameter, "ell must be positive");

  // Resolve both the annulus and the unit scale of the data.
  const double R = pair.support_radius();
  const double L = resolved_box_factor(dim, controls) * R;
  const double target = std::min(0.5 * R / static_cast<double>(controls.cells_across_annulus), 0.5);
  const GridSpec grid = make_grid(dim, points_for(L, target), L);

  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r2 = grid.radius_squared(i);
    if (r2 >= R * R) continue;
    const double phi = cutoff::profile(std::sqrt(r2) / R);
    sum += decay->epsilon * std::pow(1.0 + r2, -0.5 * decay->gamma) * std::pow(phi, ell);
  }
  return sum * grid.cell_volume();
}

Case2Terms case2_terms(const TestFunctionPair& pair_B, double p, double q, double beta, int dim,
                       double tail_mass, const CutoffSpec& cutoff, const QuadratureControls& controls) {
  const double critical = q_star(p, beta, dim);
  require(std::abs(q - critical) <= critical_tolerance * std::max(1.0, critical), ErrorCode::invalid_parameter,
          "dilated estimate needs the critical exponent q = p + beta/N");
  require(tail_mass >= 0.0, ErrorCode::invalid_parameter, "tail mass must be nonnegative");
  Case2Terms terms;
  terms.term1 = rhs_integrals(pair_B, p, q, beta, dim, cutoff, controls).I1;
  const double q_tilde = q / (q - 1.0);
  terms.term2 = std::pow(std::pow(pair_B.B, dim * pair_B.alpha), 1.0 / q_tilde) * std::pow(tail_mass, 1.0 / q);
  return terms;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::invalid_parameter, "fit series differ in length");
  require(x.size() >= 4, ErrorCode::degenerate_fit, "power-law fit needs at least 4 points");
  for (std::size_t i = 0; i < x.size(); ++i)
    require(x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i]), ErrorCode::invalid_parameter,
            "power-law fit needs positive finite data");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  require(*hi >= 4.0 * *lo, ErrorCode::degenerate_fit, "power-law fit needs x spanning two octaves");

  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

nlohmann::json ScalingReport::to_json() const {
  auto fit = [](const PowerLawFit& f) { return nlohmann::json{{"slope", f.slope}, {"intercept", f.intercept}}; };
  nlohmann::json j;
  j["T"] = T_values;
  j["I1"] = I1_values;
  j["I2"] = I2_values;
  j["lower_bound"] = lower_bound_values;
  j["alpha"] = alpha;
  j["ell"] = cutoff.ell;
  j["eta"] = cutoff.eta;
  j["fit_total"] = fit(fit_total);
  j["fit_I1"] = fit(fit_I1);
  j["fit_I2"] = fit(fit_I2);
  j["fit_lower"] = fit_lower ? fit(*fit_lower) : nlohmann::json(nullptr);
  j["predicted_decay"] = predicted_decay;
  j["predicted_growth"] = predicted_growth ? nlohmann::json(*predicted_growth) : nlohmann::json(nullptr);
  return j;
}

ScalingReport scaling_fit(const ScalingInputs& inputs) {
  const ExponentParams& ep = inputs.params;
  require(ep.N == 1 || ep.N == 2, ErrorCode::invalid_dimension, "test-function integrals support N = 1 or 2");
  require(!inputs.T_values.empty(), ErrorCode::empty_input, "no T values");
  if (ep.gamma)
    require(*ep.gamma > 0.0 && *ep.gamma < ep.N, ErrorCode::invalid_parameter, "gamma must satisfy 0<gamma<N");

  ScalingReport report;
  report.T_values = inputs.T_values;
  report.alpha = alpha(ep.p, ep.q, ep.beta);
  report.cutoff = inputs.cutoff.value_or(default_cutoff(ep.p, ep.q));
  check_exponents(ep.p, ep.q, ep.beta, report.cutoff);

  const std::size_t count = inputs.T_values.size();
  report.I1_values.resize(count);
  report.I2_values.resize(count);
  if (ep.gamma) report.lower_bound_values.resize(count);
  const Descriptor u0 = AlgebraicDecay{ep.epsilon.value_or(1.0), ep.gamma.value_or(0.0)};

  parallel_for(0, count, [&](std::size_t i) {
    const TestFunctionPair pair = make_pair(inputs.T_values[i], report.alpha);
    const RhsIntegrals r = rhs_integrals(pair, ep.p, ep.q, ep.beta, ep.N, report.cutoff, inputs.controls);
    report.I1_values[i] = r.I1;
    report.I2_values[i] = r.I2;
    if (ep.gamma)
      report.lower_bound_values[i] = lower_bound_integral(u0, pair, ep.N, report.cutoff.ell, inputs.controls);
  });

  std::vector<double> total(count);
  for (std::size_t i = 0; i < count; ++i) total[i] = report.I1_values[i] + report.I2_values[i];
  report.fit_total = fit_power_law(report.T_values, total);
  report.fit_I1 = fit_power_law(report.T_values, report.I1_values);
  report.fit_I2 = fit_power_law(report.T_values, report.I2_values);
  report.predicted_decay = -delta(ep);
  if (ep.gamma) {
    report.fit_lower = fit_power_law(report.T_values, report.lower_bound_values);
    report.predicted_growth = report.alpha * (ep.N - *ep.gamma);
  }
  return report;
}

}  // namespace fraclap
