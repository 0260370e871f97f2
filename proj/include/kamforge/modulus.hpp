#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kamforge {

enum class ModulusFamily { holder, log_holder, gen_log_holder, lipschitz, power_log, tabulated };

std::string family_name(ModulusFamily family);
ModulusFamily parse_family(const std::string& name);

// A modulus of continuity on (0, delta].
//   holder          x^alpha
//   log_holder      (ln 1/x)^-lambda
//   gen_log_holder  1 / (l1 l2 ... l_{rho-1} l_rho^lambda),  l1 = ln 1/x, l_{i+1} = ln l_i
//   lipschitz       x
//   power_log       x^beta (ln 1/x)^-lambda
//   tabulated       monotone piecewise-linear through ascending (x, value) pairs,
//                   extended linearly to (0, 0) below the first node
struct ModulusSpec {
  ModulusFamily family = ModulusFamily::lipschitz;
  double alpha = 1.0;
  double lambda = 1.0;
  int rho = 1;
  double beta = 0.0;
  std::vector<std::pair<double, double>> table;
  double delta = 1.0;

  static ModulusSpec holder(double alpha, double delta = 1.0);
  static ModulusSpec log_holder(double lambda, double delta = 0.5);
  // delta <= 0 selects the default: 1/2 for rho = 1, else the point where the rho-fold log of 1/x equals 1.
  static ModulusSpec gen_log_holder(int rho, double lambda, double delta = 0.0);
  static ModulusSpec lipschitz(double delta = 1.0);
  static ModulusSpec power_log(double beta, double lambda, double delta = 0.5);
  static ModulusSpec tabulated(std::vector<std::pair<double, double>> table, double delta = 0.0);

  // Throws ConfigError on invalid parameters.
  void validate() const;
  // ln(1/delta), the smallest admissible scale variable.
  double min_scale() const;
};

double default_gen_log_delta(int rho);

// Value at x in (0, delta]; DomainError outside.
double eval_modulus(const ModulusSpec& spec, double x);

// ln of the modulus at x = exp(-L), for L >= ln(1/delta). Valid far beyond double underflow of x.
double log_eval_modulus(const ModulusSpec& spec, double L);

enum class Verdict { weaker, strictly_weaker, not_weaker };
std::string verdict_name(Verdict v);

struct RatioSample {
  double scale;  // L = ln(1/x)
  double x;      // exp(-L); zero when it underflows
  double ratio;  // w2(x) / w1(x)
};

struct ComparisonVerdict {
  Verdict verdict = Verdict::weaker;
  std::vector<RatioSample> ratio_trace;
  double tail_slope = 0.0;  // d ln(ratio) / d ln(L) over the tail
};

struct CompareOptions {
  double tolerance = 1e-3;
  int tail_points = 8;
  double slope_threshold = 0.05;
};

// Scale grids in L = ln(1/x).
std::vector<double> dyadic_scale_grid(double delta, int count);
std::vector<double> geometric_scale_grid(double L_min, double L_max, int count);

// Decides whether w1 is weaker / strictly weaker than w2 along the grid tail.
ComparisonVerdict compare_moduli(const ModulusSpec& w1, const ModulusSpec& w2,
                                 const std::vector<double>& scales,
                                 const CompareOptions& options = {});

struct SeparabilityPoint {
  double x;
  double psi;
};

struct SeparabilityProfile {
  std::vector<SeparabilityPoint> points;
  double fitted_constant = 0.0;  // max psi/x over the head of the profile
  bool linear_bound = false;
};

// psi(x) = sup over r = delta 2^-j (j <= 120, r x <= delta) of w(r x)/w(r).
SeparabilityProfile semi_separability_profile(const ModulusSpec& spec,
                                              const std::vector<double>& x_values);

// max over j in [30, 60) of w(x_j)/w(a x_j), x_j = delta 2^-j.
double weak_homogeneity_ratio(const ModulusSpec& spec, double a);

struct InvariantReport {
  bool monotone = false;
  bool vanishing = false;
  double limsup_x_over_w = 0.0;
};

// Sampled checks of the defining properties on the dyadic grid.
InvariantReport check_invariants(const ModulusSpec& spec);

struct DiniResult {
  bool finite = false;
  double value = 0.0;
  double power = 0.0;  // exponent p in the integrand w(x) x^-p
  std::string signature;
  std::vector<double> panel_starts;
  std::vector<double> panel_sums;
};

// Integral of w(x) x^-p over (0, min(delta, 1, upper)]; upper <= 0 means no extra cap.
DiniResult power_weighted_integral(const ModulusSpec& spec, double p, double upper = 0.0);

// Integral of w(x) / x^(2 tau + 3 - k) over (0, min(delta, 1)]; requires k >= 2 tau + 2.
DiniResult dini_integral(const ModulusSpec& spec, int k, double tau);

}  // namespace kamforge
