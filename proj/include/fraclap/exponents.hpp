#pragma once

// Closed-form exponents of the nonexistence theory and regime classification.

#include <optional>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include "json.hpp"

namespace fraclap {

struct ExponentParams {
  double p = 1.0;
  double q = 2.0;
  double beta = 1.0;
  int N = 1;
  std::optional<double> gamma;
  std::optional<double> epsilon;
};

/// Checks p > 0, q > 1, 0 < beta < 2, N >= 1 and 0 < gamma < N when present.
void validate(const ExponentParams& params);

struct DerivedExponents {
  double alpha = 0.0;
  double delta = 0.0;
  std::optional<double> delta_star;
  double q_star = 0.0;
  std::optional<double> q_star_star;
  double elliptic_sup = 0.0;  // +inf when N <= beta
};

/// (q - p) / (beta (q - 1)); rejects q <= p and q <= 1.
double alpha(double p, double q, double beta);
/// q/(q-1) - N alpha - 1.
double delta(const ExponentParams& params);
/// delta + alpha (N - gamma); needs gamma.
double delta_star(const ExponentParams& params);
double q_star(double p, double beta, int N);
double q_star_star(double p, double beta, double gamma);
/// N p / (N - beta)_+, +inf when N <= beta.
double elliptic_sup(double p, double beta, int N);

DerivedExponents derive(const ExponentParams& params);

enum class Regime {
  t1_nonexistence_strict,
  t1_nonexistence_critical,
  t2_nonexistence,
  outside_theorems,
};

std::string_view to_string(Regime regime);
/// Hypothesis set under which the regime predicts nonexistence.
std::string_view governing_theorem(Regime regime);
bool predicts_nonexistence(Regime regime);

/// |q - q*| below this (relative to max(1, q*)) counts as q = q*.
inline constexpr double critical_tolerance = 1e-12;

Regime classify(const ExponentParams& params);

nlohmann::json to_json(const ExponentParams& params);
nlohmann::json exponents_record(const ExponentParams& params);

/// Exact arithmetic on the binary values of the inputs. Every finite double is
/// a dyadic rational, so these decide signs and equalities without rounding.
namespace exact {

using Rational = boost::multiprecision::cpp_rational;

Rational from_double(double value);
Rational alpha(const Rational& p, const Rational& q, const Rational& beta);
Rational delta(const Rational& p, const Rational& q, const Rational& beta, int N);
Rational delta_star(const Rational& p, const Rational& q, const Rational& beta, int N,
                    const Rational& gamma);
Rational q_star(const Rational& p, const Rational& beta, int N);
Rational q_star_star(const Rational& p, const Rational& beta, const Rational& gamma);
int sign(const Rational& value);

}  // namespace exact

}  // namespace fraclap
