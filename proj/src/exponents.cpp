#include "fraclap/exponents.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

#include "fraclap/error.hpp"

namespace fraclap {

void validate(const ExponentParams& params) {
  require(params.p > 0.0, ErrorCode::invalid_parameter, "p must be positive");
  require(params.q > 1.0, ErrorCode::invalid_parameter, "q must exceed 1");
  require(params.beta > 0.0 && params.beta < 2.0, ErrorCode::invalid_parameter,
          "beta must lie in (0, 2)");
  require(params.N >= 1, ErrorCode::invalid_dimension, "N must be >= 1");
  if (params.gamma)
    require(*params.gamma > 0.0 && *params.gamma < params.N, ErrorCode::invalid_parameter,
            "gamma must satisfy 0<gamma<N");
  if (params.epsilon)
    require(*params.epsilon > 0.0, ErrorCode::invalid_parameter, "epsilon must be positive");
}

double alpha(double p, double q, double beta) {
  require(q > 1.0, ErrorCode::invalid_parameter, "alpha needs q > 1");
  require(q > p, ErrorCode::invalid_parameter, "alpha needs q > p (theorems assume p < q)");
  require(beta > 0.0, ErrorCode::invalid_parameter, "alpha needs beta > 0");
  return (q - p) / (beta * (q - 1.0));
}

double delta(const ExponentParams& params) {
  const double a = alpha(params.p, params.q, params.beta);
  return params.q / (params.q - 1.0) - params.N * a - 1.0;
}

double delta_star(const ExponentParams& params) {
  require(params.gamma.has_value(), ErrorCode::missing_parameter, "delta_star needs gamma");
  require(*params.gamma > 0.0 && *params.gamma < params.N, ErrorCode::invalid_parameter,
          "gamma must satisfy 0<gamma<N");
  const double a = alpha(params.p, params.q, params.beta);
  return delta(params) + a * (params.N - *params.gamma);
}

double q_star(double p, double beta, int N) {
  require(p > 0.0 && beta > 0.0 && N >= 1, ErrorCode::invalid_parameter, "q_star needs p, beta > 0, N >= 1");
  return p + beta / N;
}

double q_star_star(double p, double beta, double gamma) {
  require(p > 0.0 && beta > 0.0 && gamma > 0.0, ErrorCode::invalid_parameter,
          "q_star_star needs p, beta, gamma > 0");
  return p + beta / gamma;
}

double elliptic_sup(double p, double beta, int N) {
  require(p > 0.0 && beta > 0.0 && N >= 1, ErrorCode::invalid_parameter,
          "elliptic bound needs p, beta > 0, N >= 1");
  const double gap = N - beta;
  if (gap <= 0.0) return std::numeric_limits<double>::infinity();
  return N * p / gap;
}

DerivedExponents derive(const ExponentParams& params) {
  validate(params);
  DerivedExponents d;
  d.alpha = alpha(params.p, params.q, params.beta);
  d.delta = delta(params);
  d.q_star = q_star(params.p, params.beta, params.N);
  d.elliptic_sup = elliptic_sup(params.p, params.beta, params.N);
  if (params.gamma) {
    d.delta_star = delta_star(params);
    d.q_star_star = q_star_star(params.p, params.beta, *params.gamma);
  }
  return d;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::t1_nonexistence_strict: return "T1_nonexistence_strict";
    case Regime::t1_nonexistence_critical: return "T1_nonexistence_critical";
    case Regime::t2_nonexistence: return "T2_nonexistence";
    case Regime::outside_theorems: return "outside_theorems";
  }
  return "outside_theorems";
}

std::string_view governing_theorem(Regime regime) {
  switch (regime) {
    case Regime::t1_nonexistence_strict:
    case Regime::t1_nonexistence_critical: return "nonnegative data, p < q <= p + beta/N";
    case Regime::t2_nonexistence: return "data >= eps (1+|x|^2)^(-gamma/2), p < q < p + beta/gamma";
    case Regime::outside_theorems: return "none";
  }
  return "none";
}

bool predicts_nonexistence(Regime regime) { return regime != Regime::outside_theorems; }

Regime classify(const ExponentParams& params) {
  const double p = params.p, q = params.q;
  if (!(q > p) || !(q > 1.0)) return Regime::outside_theorems;
  const double qs = q_star(p, params.beta, params.N);
  if (std::abs(q - qs) <= critical_tolerance * std::max(1.0, qs)) return Regime::t1_nonexistence_critical;
  if (q < qs) return Regime::t1_nonexistence_strict;
  if (params.gamma && *params.gamma > 0.0 && *params.gamma < params.N &&
      q < q_star_star(p, params.beta, *params.gamma))
    return Regime::t2_nonexistence;
  return Regime::outside_theorems;
}

nlohmann::json to_json(const ExponentParams& params) {
  nlohmann::json j{{"p", params.p}, {"q", params.q}, {"beta", params.beta}, {"N", params.N}};
  j["gamma"] = params.gamma ? nlohmann::json(*params.gamma) : nlohmann::json(nullptr);
  j["epsilon"] = params.epsilon ? nlohmann::json(*params.epsilon) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json exponents_record(const ExponentParams& params) {
  const DerivedExponents d = derive(params);
  const Regime regime = classify(params);
  nlohmann::json j;
  j["params"] = to_json(params);
  j["alpha"] = d.alpha;
  j["delta"] = d.delta;
  j["delta_star"] = d.delta_star ? nlohmann::json(*d.delta_star) : nlohmann::json(nullptr);
  j["q_star"] = d.q_star;
  j["q_tilde"] = params.q / (params.q - 1.0);
  j["q_star_star"] = d.q_star_star ? nlohmann::json(*d.q_star_star) : nlohmann::json(nullptr);
  j["elliptic_sup"] = std::isinf(d.elliptic_sup) ? nlohmann::json("inf") : nlohmann::json(d.elliptic_sup);
  j["regime"] = to_string(regime);
  j["governing_condition"] = governing_theorem(regime);
  return j;
}

namespace exact {

Rational from_double(double value) {
  require(std::isfinite(value), ErrorCode::non_finite, "exact conversion of a non-finite value");
  int exponent = 0;
  const double mantissa = std::frexp(value, &exponent);
  // mantissa * 2^53 is an integer for every double.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  const boost::multiprecision::cpp_int power = boost::multiprecision::cpp_int(1) << std::abs(exponent);
  const boost::multiprecision::cpp_int numerator(scaled);
  return exponent >= 0 ? Rational(numerator * power) : Rational(numerator, power);
}

Rational alpha(const Rational& p, const Rational& q, const Rational& beta) {
  require(q > 1 && q > p && beta > 0, ErrorCode::invalid_parameter, "exact alpha needs q > max(1, p), beta > 0");
  return (q - p) / (beta * (q - 1));
}

Rational delta(const Rational& p, const Rational& q, const Rational& beta, int N) {
  return q / (q - 1) - Rational(N) * alpha(p, q, beta) - 1;
}

Rational delta_star(const Rational& p, const Rational& q, const Rational& beta, int N,
                    const Rational& gamma) {
  return delta(p, q, beta, N) + alpha(p, q, beta) * (Rational(N) - gamma);
}

Rational q_star(const Rational& p, const Rational& beta, int N) { return p + beta / Rational(N); }

Rational q_star_star(const Rational& p, const Rational& beta, const Rational& gamma) {
  return p + beta / gamma;
}

int sign(const Rational& value) { return value > 0 ? 1 : (value < 0 ? -1 : 0); }

}  // namespace exact

}  // namespace fraclap
