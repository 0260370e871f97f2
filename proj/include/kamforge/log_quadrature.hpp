#pragma once

#include <functional>
#include <string>
#include <vector>

// Quadrature in the logarithmic scale variable L = ln(1/x), where integrands near x = 0
// become slowly varying tails on [L0, infinity). Integrands are passed as their logarithm.
namespace kamforge::logquad {

using LogIntegrand = std::function<double(double)>;

// ln of the integral of exp(f(L)) over [a, b]; -inf when the integral vanishes.
double log_integral(const LogIntegrand& f, double a, double b);

struct TailOptions {
  int max_panels = 60;
  int decision_panels = 20;
  double flat_ratio = 1.0 - 1e-3;
  double geometric_ratio = 0.9;
  double min_power_exponent = 1.05;
  double fit_residual = 0.05;
};

struct TailResult {
  bool finite = false;
  double value = 0.0;      // integral (may under/overflow; see log_value)
  double log_value = 0.0;  // ln of the integral
  double tail_estimate = 0.0;
  std::string signature;   // "geometric", "power", "exhausted", "flat", "growth", "overflow"
  double fitted_exponent = 0.0;
  std::vector<double> panel_starts;
  std::vector<double> panel_sums;  // scaled by exp(-scale)
  double scale = 0.0;
};

// Integral of exp(f(L)) over [L0, infinity) on panels [L0, max(2 L0, L0 + 1)], then doubling.
// Throws IndeterminateError when neither a convergent nor a divergent signature is found.
TailResult tail_integral(const LogIntegrand& f, double L0, const TailOptions& options = {});

}  // namespace kamforge::logquad
