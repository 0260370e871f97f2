#pragma once

#include <vector>

#include "kamforge/diophantine.hpp"
#include "kamforge/periodic_field.hpp"

namespace kamforge {

struct HomologicalSolution {
  PeriodicField u;
  double min_divisor = 0.0;         // smallest |<k, omega>| over active modes
  double amplification = 0.0;       // sup|u| / sup|g|
  double mode_amplification = 0.0;  // max |u-hat(k) / g-hat(k)| over active modes
  std::size_t active_modes = 0;
  double residual = 0.0;            // sup|D_omega u - g| on the grid, mean of g removed
};

// D_omega f = sum_j omega_j d f / d x_j, applied spectrally.
PeriodicField frequency_derivative(const PeriodicField& f, const std::vector<double>& omega);

// Solves D_omega u = g with mean(u) = 0. A negative tolerance selects 1e-12 sup|g|.
// Active modes are the nonzero, non-Nyquist modes whose coefficient exceeds 1e-14 of the largest one;
// the remaining modes are dropped from u.
HomologicalSolution solve_homological(const PeriodicField& g, const std::vector<double>& omega,
                                      double tolerance = -1.0);
HomologicalSolution solve_homological(const PeriodicField& g, const FrequencyVector& omega,
                                      double tolerance = -1.0);

// a-priori bound cutoff^tau / alpha_star on |u-hat(k) / g-hat(k)|.
double small_divisor_amplification(double tau, double alpha_star, double mode_cutoff);

}  // namespace kamforge
