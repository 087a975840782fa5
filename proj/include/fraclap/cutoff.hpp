#pragma once

namespace fraclap::cutoff {

// Smooth plateau cutoff: Phi(r) = 1 on [0, 1/2], 0 on [1, inf), built from
// f(t) = exp(-1/t) through the transition h(t) = f(t) / (f(t) + f(1 - t)).
// Every derivative vanishes at r = 1/2 and r = 1.

double smooth_step(double t);             // h
double smooth_step_derivative(double t);  // h'
double profile(double r);                 // Phi
double profile_derivative(double r);      // Phi'

}  // namespace fraclap::cutoff
