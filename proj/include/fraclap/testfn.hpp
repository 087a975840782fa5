#pragma once

// Scaled cutoff test functions and the integrals of the test-function method:
//   phi1(x) = Phi(|x| / R), R = (B T)^alpha,   phi2(t) = Phi(t / T).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fraclap/exponents.hpp"
#include "fraclap/field.hpp"
#include "json.hpp"

namespace fraclap {

struct CutoffSpec {
  int ell = 4;  // power of phi1
  int eta = 4;  // power of phi2
};

/// ell = eta = max(4, ceil(2q/(q-p)) + 1).
CutoffSpec default_cutoff(double p, double q);

struct TestFunctionPair {
  double T = 2.0;
  double B = 1.0;
  double alpha = 1.0;

  double support_radius() const;
  double space(double r) const;            // phi1 at radius r
  double time(double t) const;             // phi2
  double time_derivative(double t) const;  // d phi2 / dt
};

/// Validates T > 1, B >= 1, alpha > 0.
TestFunctionPair make_pair(double T, double alpha, double B = 1.0);

struct QuadratureControls {
  std::size_t cells_across_annulus = 128;  // annulus width is R/2
  double box_factor = 0.0;                 // L / R; 0 selects 4 in 1D and 2 in 2D
  std::size_t time_nodes = 1024;           // midpoint rule on [0, T]
};

/// Grid scaled with the support radius, so every T sees the same discrete picture.
GridSpec adapted_grid(const TestFunctionPair& pair, int dim, const QuadratureControls& controls = {});

/// phi1 sampled on `grid`.
Field sample_space_profile(const TestFunctionPair& pair, const GridSpec& grid);

struct RhsIntegrals {
  double I1 = 0.0;  // int int phi2^eta phi1^{ell - s} |(-Delta)^{beta/2} phi1|^s, s = q/(q-p)
  double I2 = 0.0;  // int int phi1^ell phi2^{eta - q~} |phi2'|^{q~},        q~ = q/(q-1)
};

/// Fractional Laplacian by the spectral backend over the whole box.
/// Fails with grid_too_coarse when spacing > R/64.
RhsIntegrals rhs_integrals(const TestFunctionPair& pair, double p, double q, double beta,
                           const CutoffSpec& cutoff, const GridSpec& grid,
                           std::size_t time_nodes = 1024);
RhsIntegrals rhs_integrals(const TestFunctionPair& pair, double p, double q, double beta, int dim,
                           const CutoffSpec& cutoff, const QuadratureControls& controls = {});

/// int u0 phi1^ell dx for u0 = algebraic decay with 0 < gamma < N.
double lower_bound_integral(const Descriptor& u0, const TestFunctionPair& pair, int dim, int ell,
                            const QuadratureControls& controls = {});

struct Case2Terms {
  double term1 = 0.0;  // I1 with the dilated phi1
  double term2 = 0.0;  // (B^{N alpha})^{1/q~} tail_mass^{1/q}
};

/// Requires q = p + beta/N.
Case2Terms case2_terms(const TestFunctionPair& pair_B, double p, double q, double beta, int dim,
                       double tail_mass, const CutoffSpec& cutoff, const QuadratureControls& controls = {});

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least squares for log y = intercept + slope log x. Needs >= 4 positive
/// points with max x / min x >= 4.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct ScalingInputs {
  ExponentParams params;  // gamma and epsilon enable the lower-bound series
  std::vector<double> T_values{16, 32, 64, 128, 256};
  std::optional<CutoffSpec> cutoff;  // default_cutoff when empty
  QuadratureControls controls{};
};

struct ScalingReport {
  std::vector<double> T_values;
  std::vector<double> I1_values;
  std::vector<double> I2_values;
  std::vector<double> lower_bound_values;  // empty without gamma
  double alpha = 0.0;
  CutoffSpec cutoff{};
  PowerLawFit fit_total;  // I1 + I2
  PowerLawFit fit_I1;
  PowerLawFit fit_I2;
  std::optional<PowerLawFit> fit_lower;
  double predicted_decay = 0.0;                 // -delta
  std::optional<double> predicted_growth;       // alpha (N - gamma)

  nlohmann::json to_json() const;
};

ScalingReport scaling_fit(const ScalingInputs& inputs);

}  // namespace fraclap
