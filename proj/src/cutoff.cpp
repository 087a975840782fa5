#include "fraclap/cutoff.hpp"

#include <cmath>

namespace fraclap::cutoff {

namespace {

double base(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double base_derivative(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = base(t);
  const double b = base(1.0 - t);
  return a / (a + b);
}

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = base(t);
  const double b = base(1.0 - t);
  const double s = a + b;
  // d/dt [a/(a+b)] with b' = -f'(1-t)
  return (base_derivative(t) * b + a * base_derivative(1.0 - t)) / (s * s);
}

double profile(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  return smooth_step(2.0 * (1.0 - r));
}

double profile_derivative(double r) {
  if (r <= 0.5 || r >= 1.0) return 0.0;
  return -2.0 * smooth_step_derivative(2.0 * (1.0 - r));
}

}  // namespace fraclap::cutoff
