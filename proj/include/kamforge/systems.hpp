#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kamforge/hamiltonian.hpp"

namespace kamforge {

// ---- corner potential -------------------------------------------------------------------

// g(s) = 1 / (1 - ln|s|)^lambda with g(0) = 0; defined for |s| < e.
double corner_weight(double s, double lambda);

// P^(order)(r) for |r| <= 1, order in [0, 6]: the Cauchy form
// integral_0^r (r - s)^(5 - order) / (5 - order)! g(s) ds, and g(r) itself at order 6.
double corner_potential(double r, double lambda, int order = 0);

// The same Cauchy form without the |r| <= 1 guard (|r| < e); used for difference stencils at the edge.
double corner_potential_extended(double r, double lambda, int order = 0);

class CornerPotentialProfile final : public UnivariateProfile {
 public:
  explicit CornerPotentialProfile(double lambda);
  double derivative(double y, int order) const override;
  int max_order() const override { return 6; }
  std::string describe() const override;
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

// omega.y + |y|^2 / M + eps (sin 2 pi x_1 + sin 2 pi x_2 + P(y_1) + P(y_2)), with k = 6,
// modulus LogHolder(lambda) and action domain |y| <= 1.
HamiltonianModel hamiltonian_hh(double epsilon, double M, const std::vector<double>& omega, double lambda);

// ---- oscillatory series ----------------------------------------------------------------

struct OscillatorySeries {
  double q = 0.3;
  double lambda = 1.5;
  double theta = 0.0;                // (1/q)^(1/lambda)
  std::vector<int> exponents;        // Q_n = 10^exponents[n-1]
  std::vector<double> log_envelope;  // ln Q_n - theta^n
  double c1 = 0.0;                   // min Q_n exp(-theta^n)
  double c2 = 0.0;                   // max Q_n exp(-theta^n)

  std::size_t size() const { return exponents.size(); }
  double Q(std::size_t n) const;  // 1-based; overflows to inf beyond 1e308
};

// Q_n = 10^(a_n) with a_n = max(a_{n-1} + 1, round(theta^n / ln 10)); DomainError if a_n > 308.
OscillatorySeries qn_sequence(double q, double lambda, int count);

// Exact divisibility checks: Q_1 in 10 N+ and Q_{n+1} / Q_n in 10 N+.
bool divisibility_holds(const OscillatorySeries& series);

struct SeriesValue {
  long double value = 0.0L;
  double tail_bound = 0.0;  // q^(N+1) / (1 - q)
};

// sum_{n <= N} q^n sin(pi Q_n x) with exact reduction of Q_n x modulo 2.
SeriesValue nowhere_holder_eval(const OscillatorySeries& series, double x, int truncation = 8);

struct WitnessRecord {
  double x = 0.0;
  int m = 0;
  long long N_m = 0;
  long double R_m = 0.0L;
  long double upsilon = 0.0L;
  long double bracket = 0.0L;  // |upsilon| Q_m, exactly in [1/2, 1]
  long double S1 = 0.0L, S2 = 0.0L, S3 = 0.0L;
  long double ratio = 0.0L;        // |P(x + upsilon) - P(x)| / |upsilon|^alpha
  long double lower_bound = 0.0L;  // |S1| - |S2| - |S3|
  long double proof_bound = 0.0L;  // (1 - 3q) q^m / (2 (1 - q) Q_m^-alpha)
  double threshold = 0.0;          // smallest Q_m meeting the growth requirement
  bool threshold_met = false;
  double tail_bound = 0.0;
};

// Witness increment at scale m (1 <= m <= max_m) for the Holder exponent alpha.
WitnessRecord nowhere_holder_witness(const OscillatorySeries& series, double x, int m, double alpha,
                                     int truncation = 8, int max_m = 3);

struct DominationCheck {
  int m = 0;
  bool vacuous = false;  // m = 1 has no predecessor
  double lhs = 0.0;      // Q_{m-1} / Q_m * pi q / (1 - q)
  double rhs = 0.0;      // q^m / 2
  bool holds = false;
};
DominationCheck geometric_domination(const OscillatorySeries& series, int m);

struct LogHolderCheck {
  double fitted_C = 0.0;        // max |P(x + h) - P(x)| / w(h)
  double fitted_C_prime = 0.0;  // max q^{N_h} / w(h)
  bool split_index_valid = true;
  std::vector<double> h_values;
  std::vector<int> split_index;  // N_h per h
  std::vector<double> worst_ratio;
};

// N_h = max{n : h Q_n <= 1}, zero when none.
int split_index(const OscillatorySeries& series, double h);

LogHolderCheck log_holder_bound_check(const OscillatorySeries& series, const std::vector<double>& h_values,
                                      const std::vector<double>& x_samples, int truncation = 8);

// sum_n q^n Q_n^-6 (pi Q_n)^order sin^(order)(pi Q_n x), n <= truncation.
long double oscillatory_perturbation_derivative(const OscillatorySeries& series, double x, int order,
                                                int truncation = 8);

class OscillatoryProfile final : public UnivariateProfile {
 public:
  OscillatoryProfile(OscillatorySeries series, int truncation);
  double derivative(double y, int order) const override;
  int max_order() const override { return 6; }
  std::string describe() const override { return "oscillatory"; }

 private:
  OscillatorySeries series_;
  int truncation_;
};

// Symmetric quadratic-form field A(x) = A0 + a cos(2 pi k x_axis) I.
struct MatrixField {
  Eigen::Matrix2d constant = Eigen::Matrix2d::Identity() * 0.1;
  double cos_amplitude = 0.0;
  int cos_axis = 0;
  int cos_wavenumber = 1;
};

// omega.y + <A(x) y, y> + eps (sum q^n Q_n^-6 sin(pi Q_n x_1) + sum q^n Q_n^-6 sin(pi Q_n y_2)).
HamiltonianModel hamiltonian_hhh(double epsilon, const OscillatorySeries& series, const MatrixField& A,
                                 const std::vector<double>& omega, double M, int truncation = 8);

}  // namespace kamforge
