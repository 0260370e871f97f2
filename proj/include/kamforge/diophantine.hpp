#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kamforge {

struct FrequencyVector {
  std::vector<long double> omega;
  double tau = 2.0;
  std::optional<double> alpha_star_estimate;
  long K_truncation = 100;

  std::size_t dim() const { return omega.size(); }
  std::vector<double> as_double() const;
};

struct MarginResult {
  long double margin = 0.0L;
  std::vector<long> argmin;  // canonical sign: first nonzero component positive
  long K = 0;
  double tau = 0.0;
  bool resonant() const { return margin == 0.0L; }
};

// min over nonzero k with |k|_1 <= K of |<k, omega>| |k|_1^tau, scanned exhaustively.
MarginResult diophantine_margin(const std::vector<long double>& omega, double tau, long K);

// Truncated margin used as the operational lower bound for alpha_*.
double estimate_alpha_star(const std::vector<long double>& omega, double tau, long K);

// "golden2" (1, golden ratio), "sqrt2_2" (1, sqrt 2), "cubic3" (1, t, t^2) with t^3 = t + 1.
FrequencyVector standard_frequency(const std::string& name);

// Compensated inner product <k, omega> in extended precision.
long double lattice_pairing(const std::vector<long>& k, const std::vector<long double>& omega);

}  // namespace kamforge
