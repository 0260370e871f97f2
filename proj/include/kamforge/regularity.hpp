#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kamforge/modulus.hpp"

namespace kamforge {

// phi(x) = x^power * w(x).
struct PhiProfile {
  ModulusSpec base;
  double power = 0.0;

  // power = k - (3 - i) tau - 1 for i in {1, 2}.
  static PhiProfile from_hypothesis(const ModulusSpec& base, int k, double tau, int i);
  double eval(double x) const;
  // ln phi at x = exp(-L).
  double log_eval(double L) const;
};

struct CriticalExponent {
  int k_star = 0;
  bool unbounded = false;      // every probed order up to the cap was finite
  std::vector<DiniResult> probes;  // integral of phi / x^(m + 1) for m = 0, 1, ...
};

// Largest m with the integral of phi / x^(m + 1) over (0, 1] finite, with the m + 1 integral divergent.
CriticalExponent critical_exponent(const PhiProfile& phi, int cap = 20);

struct RemainingRow {
  double gamma = 0.0;
  double L = 0.0;
  double outer = 0.0;  // gamma * integral_L^eps phi / t^(k + 2)
  double inner = 0.0;  // integral_0^L phi / t^(k + 1)
  double value = 0.0;  // the remaining modulus at gamma (= inner)
};

struct RemainingModulus {
  int k_star = 0;
  double epsilon = 0.0;
  std::vector<RemainingRow> rows;  // ascending gamma
  std::string family_tag;

  // Monotone piecewise-linear in gamma; constant above the last row, linear to 0 below the first.
  double interpolate(double gamma) const;
};

// Balances the two integrals within a factor of 2 for each gamma in (0, epsilon).
RemainingModulus remaining_modulus(const PhiProfile& phi, int k_star, double epsilon,
                                   const std::vector<double>& gammas);

// count points geometric from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int count);

struct ScaleRow {
  double h = 0.0;
  double modulus = 0.0;  // sup |f(x + h) - f(x)|
};

struct RegularityReport {
  std::vector<ScaleRow> rows;
  double holder_exponent = 0.0;  // slope of ln modulus against ln h
  double holder_residual = 0.0;  // rms of the fit
  double log_exponent = 0.0;     // minus the slope of ln modulus against ln ln(1/h)
  double log_residual = 0.0;
};

// samples on a uniform grid with the given spacing; each scale must be a positive multiple of it.
RegularityReport empirical_modulus(const std::vector<double>& samples, double spacing,
                                   const std::vector<double>& scales);

struct IterateCheck {
  double fitted_constant = 0.0;  // max increment / phi(r)
  bool pass = true;
  int failed_index = -1;  // first position whose ratio exceeds jump_factor times every earlier ratio
  double worst_jump = 0.0;
  std::vector<double> ratios;
};

// sequence of (r_nu, sup increment). One constant bounds every increment by c phi(r_nu); the guard
// flags an increment whose ratio jumps above jump_factor times the running maximum.
IterateCheck iterate_regularity_check(const std::vector<std::pair<double, double>>& sequence,
                                      const PhiProfile& phi, double jump_factor = 10.0);

// Integral over [M, X] of 1 / (l1 l2 ... l_rho^lambda) with l1 = ln z, divided by X / (l1(X) ... l_rho(X)^lambda).
double iterated_log_integral_ratio(int rho, double lambda, double M, double X);
// Integral over [M, X] of z^-sigma (ln z)^-lambda, divided by X^(1 - sigma) (ln X)^-lambda.
double power_log_integral_ratio(double sigma, double lambda, double M, double X);
// Integral over [X, inf) of z^-(1 + sigma) (ln z)^-lambda, divided by X^-sigma (ln X)^-lambda.
double power_log_tail_ratio(double sigma, double lambda, double X);

}  // namespace kamforge
