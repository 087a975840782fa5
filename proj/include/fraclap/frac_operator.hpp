#pragma once

// Two discretizations of the fractional Laplacian (-Delta)^{beta/2} on the
// periodic box:
//  * spectral: multiply the discrete spectrum by |k|^beta;
//  * singular_integral: c_N(beta) * int (psi(x) - psi(x+z)) / |z|^{N+beta} dz
//    by lattice quadrature with a periodized kernel.
// The spectral route is the reference; the singular route uses the printed
// constant c_N and is reconciled with calibrate_constant().

#include <string_view>

#include "fraclap/field.hpp"

namespace fraclap {

enum class Backend { spectral, singular_integral };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view text);

/// Treatment of the |z|^{-N-beta} singularity at the origin.
enum class InnerRegularization {
  zeta_corrected,  // lattice-zeta correction proportional to h^{2-beta} * Laplacian
  none,            // plain rectangle rule over nonzero offsets
};

struct QuadratureSettings {
  /// Offsets with |z| below this radius are summed in symmetrized
  /// second-difference form. 0 selects 4 * spacing.
  double cutoff_radius = 0.0;
  InnerRegularization inner_regularization = InnerRegularization::zeta_corrected;
};

struct OperatorSpec {
  double beta = 1.0;
  Backend backend = Backend::spectral;
  QuadratureSettings quadrature{};
  double calibration_factor = 1.0;
};

struct SingularIntegralSpec {
  double constant_cN = 0.0;  // printed constant times calibration_factor
  int dense_factor = 4;      // oversampling used by the dense quadrature oracle
};

SingularIntegralSpec singular_integral_spec(int dim, const OperatorSpec& spec);

/// Field whose spectrum is |k|^beta times the input spectrum; beta in [0, 2].
/// beta = 0 is the identity (mean included), beta = 2 is the periodic -Laplacian.
Field spectral_frac_lap(const Field& field, double beta);

/// 2^delta Gamma((N+delta)/2) / (pi^{N/2} Gamma(1 - delta/2)), delta in (0, 2).
double normalization_constant(int dim, double delta);

/// 2^delta Gamma((N+delta)/2) / (pi^{N/2} |Gamma(-delta/2)|): the constant that
/// makes the singular integral agree with the |xi|^delta multiplier.
double standard_normalization_constant(int dim, double delta);

/// Singular-integral backend. Requires beta in (0, 2) and spacing <= cutoff.
Field singular_frac_lap(const Field& field, const OperatorSpec& spec);

/// Quadrature oracle: samples `descriptor` on a grid refined by
/// `dense_factor`, applies the singular backend there and restricts back.
Field singular_frac_lap_dense(const Descriptor& descriptor, const GridSpec& grid,
                              const OperatorSpec& spec, int dense_factor);

/// Least-squares factor lambda with lambda * singular(gaussian) ~ spectral(gaussian)
/// where the singular output uses the printed constant with calibration 1.
double calibrate_constant(int dim, double beta, const GridSpec& grid);

/// Copy of spec with calibration_factor set by calibrate_constant on `grid`.
OperatorSpec calibrated(OperatorSpec spec, const GridSpec& grid);

/// Dispatches on spec.backend.
Field apply_operator(const Field& field, const OperatorSpec& spec);

}  // namespace fraclap
