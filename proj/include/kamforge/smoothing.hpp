#pragma once

#include <vector>

#include "kamforge/modulus.hpp"
#include "kamforge/periodic_field.hpp"

namespace kamforge {

// Radial bump: 1 on [0, rho0], 0 on [1, inf), exp(-1/s) glue in between.
struct SmoothingKernel {
  double plateau_rho0 = 0.5;
  double support_radius = 1.0;

  double profile(double t) const;
  double profile_derivative(double t) const;
  // K-hat at a frequency vector (radial in the Euclidean norm).
  double multiplier(const double* xi, int dims) const;
};

SmoothingKernel build_kernel(double rho0 = 0.5);

// Spectrum f-hat(k) K-hat(2 pi r k).
PeriodicField smooth_periodic(const PeriodicField& f, double r, const SmoothingKernel& kernel = SmoothingKernel{});

// Analytic continuation of the smoothed field at x with |Im x_j| <= r for every j.
cplx smooth_eval_strip(const PeriodicField& f, double r, const std::vector<cplx>& x,
                       const SmoothingKernel& kernel = SmoothingKernel{});

// Samples of the beta-th derivative of the 1-D real-space kernel on [-box, box) with N points,
// obtained by inverse transform of the band-limited multiplier.
struct KernelSamples {
  std::vector<double> x;
  std::vector<double> values;
  double spacing = 0.0;
};
KernelSamples real_space_kernel(const SmoothingKernel& kernel, int N, double box, int derivative = 0);

// Numeric integral of x^alpha d^beta K over the box (1-D or 2-D), trapezoid rule on the periodic box.
// Resolution is validated against N/2; relative disagreement above 1e-6 raises ResolutionError.
double kernel_moment(const SmoothingKernel& kernel, const std::vector<int>& alpha, const std::vector<int>& beta,
                     int N, double box = 64.0);

struct KernelDecayReport {
  double power = 6.0;
  double box = 50.0;
  double fitted_constant = 0.0;  // max |K(x)| (1+|x|)^power over the box
  std::vector<double> x;
  std::vector<double> weighted;  // |K(x)| (1+|x|)^power
};
KernelDecayReport kernel_decay(const SmoothingKernel& kernel, double power = 6.0, double box = 50.0, int N = 8192);

struct JacksonRow {
  double r = 0.0;
  double error = 0.0;
  double bound_shape = 0.0;  // r^k w(r)
  double ratio = 0.0;        // error / bound_shape
};

struct JacksonReport {
  std::vector<JacksonRow> rows;
  double fitted_constant = 0.0;  // max ratio
  double slope = 0.0;            // least-squares slope of ln error against ln r
  double log_exponent = 0.0;     // -slope of ln(error / r^k) against ln ln(1/r)
};

// Sup-grid error of S_r f - f for each r, compared with the shape r^k w(r).
JacksonReport jackson_error_report(const PeriodicField& f, int k, const ModulusSpec& modulus,
                                   const std::vector<double>& r_values,
                                   const SmoothingKernel& kernel = SmoothingKernel{});

// Least-squares slope of ys against xs.
double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace kamforge
