#include "kamforge/systems.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>

#include "kamforge/errors.hpp"

namespace kamforge {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

constexpr long double kPi = 3.141592653589793238462643383279502884L;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Cauchy repeated-integration form for r > 0 under s = r exp(-u).
double cauchy_form(double r, double lambda, int order) {
  const int p = 5 - order;
  const double base = 1.0 - std::log(r);
  const double norm = factorial(p);
  auto integrand = [&](double u) {
    const double one_minus = -std::expm1(-u);
    return std::pow(r * one_minus, p) / norm * std::pow(base + u, -lambda) * r * std::exp(-u);
  };
  double total = 0.0;
  double lo = 0.0, hi = 1.0;
  while (lo < 60.0) {
    double err = 0.0;
    const double piece =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 15, 1e-14, &err);
    total += piece;
    if (lo > 8.0 && std::abs(piece) <= 1e-18 * std::abs(total)) break;
    lo = hi;
    hi *= 2.0;
  }
  return total;
}

double corner_any(double r, double lambda, int order) {
  if (order < 0 || order > 6) throw DomainError("corner potential derivative order must lie in [0, 6]");
  if (!(lambda > 0.0)) throw DomainError("corner potential needs lambda > 0");
  if (r == 0.0) return 0.0;
  const double a = std::abs(r);
  if (!(a < std::exp(1.0))) throw DomainError("corner potential argument outside |r| < e");
  const double v = (order == 6) ? corner_weight(a, lambda) : cauchy_form(a, lambda, order);
  return (r < 0.0 && order % 2 == 1) ? -v : v;
}

// sin(pi t) for t in [0, 2).
long double sin_pi_reduced(long double t) {
  long double sign = 1.0L;
  if (t >= 1.0L) {
    t -= 1.0L;
    sign = -1.0L;
  }
  const long double u = std::min(t, 1.0L - t);
  return sign * std::sin(kPi * u);
}

// sin(pi * value) and cos(pi * value) for an exact rational value.
long double sin_pi_rational(const cpp_rational& value) {
  const cpp_int num = boost::multiprecision::numerator(value);
  const cpp_int den = boost::multiprecision::denominator(value);
  cpp_int rem = num % (2 * den);
  if (rem < 0) rem += 2 * den;
  if (rem == 0) return 0.0L;
  return sin_pi_reduced(cpp_rational(rem, den).convert_to<long double>());
}

long double cos_pi_rational(const cpp_rational& value) { return sin_pi_rational(value + cpp_rational(1, 2)); }

cpp_int power_of_ten(int a) {
  cpp_int v = 1;
  for (int i = 0; i < a; ++i) v *= 10;
  return v;
}

cpp_rational exact(double x) {
  int e = 0;
  const double mant = std::frexp(x, &e);
  const long long m = static_cast<long long>(std::ldexp(mant, 53));
  cpp_rational r(m);
  e -= 53;
  if (e >= 0) return r * cpp_rational(cpp_int(1) << e);
  return r / cpp_rational(cpp_int(1) << (-e));
}

long double series_at(const OscillatorySeries& s, const cpp_rational& x, int truncation) {
  // Neumaier summation of q^n sin(pi Q_n x).
  long double sum = 0.0L, carry = 0.0L;
  long double qn = 1.0L;
  for (int n = 1; n <= truncation; ++n) {
    qn *= s.q;
    const long double term = qn * sin_pi_rational(x * cpp_rational(power_of_ten(s.exponents[n - 1])));
    const long double t = sum + term;
    carry += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + carry;
}

void check_truncation(const OscillatorySeries& s, int truncation) {
  if (truncation < 1 || static_cast<std::size_t>(truncation) > s.size()) {
    throw DomainError("series truncation exceeds the constructed frequency list");
  }
}

}  // namespace

double corner_weight(double s, double lambda) {
  if (s == 0.0) return 0.0;
  const double base = 1.0 - std::log(std::abs(s));
  if (!(base > 0.0)) throw DomainError("corner weight needs |s| < e");
  return std::pow(base, -lambda);
}

double corner_potential(double r, double lambda, int order) {
  if (!(std::abs(r) <= 1.0)) throw DomainError("corner potential is defined for |r| <= 1");
  return corner_any(r, lambda, order);
}

double corner_potential_extended(double r, double lambda, int order) { return corner_any(r, lambda, order); }

CornerPotentialProfile::CornerPotentialProfile(double lambda) : lambda_(lambda) {
  if (!(lambda > 1.0)) throw ConfigError("corner potential needs lambda > 1");
}

double CornerPotentialProfile::derivative(double y, int order) const { return corner_potential(y, lambda_, order); }

std::string CornerPotentialProfile::describe() const {
  std::ostringstream o;
  o << "corner(lambda=" << lambda_ << ")";
  return o.str();
}

HamiltonianModel hamiltonian_hh(double epsilon, double M, const std::vector<double>& omega, double lambda) {
  if (omega.size() != 2) throw ConfigError("the corner-potential system has two degrees of freedom");
  if (!(M > 0.0)) throw ConfigError("M must be positive");
  HamiltonianModel H;
  H.n = 2;
  H.k = 6;
  H.modulus = ModulusSpec::log_holder(lambda);
  H.M = M;
  H.rho = 1.0;
  H.name = "hh";
  auto profile = std::make_shared<CornerPotentialProfile>(lambda);
  for (int i = 0; i < 2; ++i) {
    H.add({omega[i], std::nullopt, {YPart::Kind::linear, i, i, nullptr}});
    H.add({1.0 / M, std::nullopt, {YPart::Kind::quadratic, i, i, nullptr}});
    if (epsilon != 0.0) {
      H.add({epsilon, SparseTrig::sine(2, i, 1.0), {YPart::Kind::constant, 0, 0, nullptr}});
      H.add({epsilon, std::nullopt, {YPart::Kind::univariate, i, i, profile}});
    }
  }
  return H;
}

double OscillatorySeries::Q(std::size_t n) const {
  if (n < 1 || n > exponents.size()) throw DomainError("frequency index out of range");
  return std::pow(10.0, exponents[n - 1]);
}

OscillatorySeries qn_sequence(double q, double lambda, int count) {
  if (!(q > 0.0 && q < 1.0 / 3.0)) throw DomainError("series ratio q must lie in (0, 1/3)");
  if (!(lambda > 1.0)) throw DomainError("series exponent lambda must exceed 1");
  if (count < 1) throw DomainError("series length must be positive");
  OscillatorySeries s;
  s.q = q;
  s.lambda = lambda;
  s.theta = std::pow(1.0 / q, 1.0 / lambda);
  int prev = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int n = 1; n <= count; ++n) {
    const double target = std::pow(s.theta, n);
    const int a = std::max(prev + 1, static_cast<int>(std::lround(target / std::log(10.0))));
    if (a > 308) throw DomainError("frequency 10^" + std::to_string(a) + " exceeds the double range");
    s.exponents.push_back(a);
    const double env = a * std::log(10.0) - target;
    s.log_envelope.push_back(env);
    lo = std::min(lo, env);
    hi = std::max(hi, env);
    prev = a;
  }
  s.c1 = std::exp(lo);
  s.c2 = std::exp(hi);
  return s;
}

bool divisibility_holds(const OscillatorySeries& s) {
  int prev = 0;
  for (int a : s.exponents) {
    const cpp_int ratio = power_of_ten(a) / power_of_ten(prev);
    if (a - prev < 1 || power_of_ten(a) % power_of_ten(prev) != 0 || ratio % 10 != 0) return false;
    prev = a;
  }
  return true;
}

SeriesValue nowhere_holder_eval(const OscillatorySeries& series, double x, int truncation) {
  check_truncation(series, truncation);
  if (!std::isfinite(x)) throw DomainError("series argument must be finite");
  SeriesValue v;
  v.value = series_at(series, exact(x), truncation);
  v.tail_bound = std::pow(series.q, truncation + 1) / (1.0 - series.q);
  return v;
}

WitnessRecord nowhere_holder_witness(const OscillatorySeries& series, double x, int m, double alpha, int truncation,
                                     int max_m) {
  check_truncation(series, truncation);
  if (m < 1 || m > truncation) throw DomainError("witness scale must lie in [1, truncation]");
  if (m > max_m) {
    throw PrecisionError("witness scale beyond the configured cap", series.exponents[m - 1] + 20);
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("Holder exponent must lie in (0, 1]");
  WitnessRecord w;
  w.x = x;
  w.m = m;
  const cpp_rational X = exact(x);
  const cpp_int Qm = power_of_ten(series.exponents[m - 1]);
  const cpp_rational prod = X * cpp_rational(Qm);
  if (prod < 1) throw DomainError("witness requires Q_m x >= 1");
  // Nearest integer with ties to the lower one; 0 <= |R_m| <= 1/2.
  const cpp_int fl = boost::multiprecision::numerator(prod) / boost::multiprecision::denominator(prod);
  cpp_int Nm = fl;
  if (prod - cpp_rational(fl) > cpp_rational(1, 2)) Nm = fl + 1;
  const cpp_rational R = prod - cpp_rational(Nm);
  const int sgn = (R < 0) ? -1 : 1;
  w.N_m = Nm.convert_to<long long>();
  w.R_m = R.convert_to<long double>();
  const cpp_rational shifted(2 * Nm - sgn, 2 * Qm);  // x + upsilon
  const cpp_rational ups = shifted - X;
  w.upsilon = ups.convert_to<long double>();
  w.bracket = std::abs((ups * cpp_rational(Qm)).convert_to<long double>());

  const long double denom = std::pow(std::abs(w.upsilon), static_cast<long double>(alpha));
  long double qn = 1.0L;
  long double total = 0.0L;
  for (int n = 1; n <= truncation; ++n) {
    qn *= series.q;
    const cpp_rational Qn(power_of_ten(series.exponents[n - 1]));
    const long double d = qn * (sin_pi_rational(shifted * Qn) - sin_pi_rational(X * Qn)) / denom;
    if (n == m) w.S1 += d;
    else if (n < m) w.S2 += d;
    else w.S3 += d;
    total += d;
  }
  w.ratio = std::abs(total);
  w.lower_bound = std::abs(w.S1) - std::abs(w.S2) - std::abs(w.S3);
  const long double q = series.q;
  const long double Qm_ld = std::pow(10.0L, series.exponents[m - 1]);
  w.proof_bound = (1.0L - 3.0L * q) / (2.0L * (1.0L - q)) * std::pow(q, m) /
                  std::pow(1.0L / Qm_ld, static_cast<long double>(alpha));
  w.threshold = 1.0 / std::pow((1.0 - 3.0 * series.q) / (2.0 * (1.0 - series.q)) * std::pow(series.q, m) / m, alpha);
  w.threshold_met = static_cast<double>(Qm_ld) >= w.threshold;
  w.tail_bound = std::pow(series.q, truncation + 1) / (1.0 - series.q);
  return w;
}

DominationCheck geometric_domination(const OscillatorySeries& series, int m) {
  if (m < 1 || static_cast<std::size_t>(m) > series.size()) throw DomainError("domination index out of range");
  DominationCheck c;
  c.m = m;
  c.rhs = 0.5 * std::pow(series.q, m);
  if (m == 1) {
    c.vacuous = true;
    c.holds = true;
    return c;
  }
  c.lhs = std::pow(10.0, series.exponents[m - 2] - series.exponents[m - 1]) * M_PI * series.q / (1.0 - series.q);
  c.holds = c.lhs <= c.rhs;
  return c;
}

int split_index(const OscillatorySeries& series, double h) {
  if (!(h > 0.0)) throw DomainError("split index needs h > 0");
  int idx = 0;
  for (std::size_t n = 1; n <= series.size(); ++n) {
    if (h * series.Q(n) <= 1.0) idx = static_cast<int>(n);
    else break;
  }
  return idx;
}

LogHolderCheck log_holder_bound_check(const OscillatorySeries& series, const std::vector<double>& h_values,
                                      const std::vector<double>& x_samples, int truncation) {
  check_truncation(series, truncation);
  LogHolderCheck out;
  for (double h : h_values) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("increments must lie in (0, 1)");
    const double w = std::pow(std::log(1.0 / h), -series.lambda);
    const int Nh = split_index(series, h);
    if (static_cast<std::size_t>(Nh) < series.size() && !(h * series.Q(Nh + 1) > 1.0)) out.split_index_valid = false;
    if (Nh >= 1 && !(h * series.Q(Nh) <= 1.0)) out.split_index_valid = false;
    double worst = 0.0;
    const cpp_rational H = exact(h);
    for (double x : x_samples) {
      const cpp_rational X = exact(x);
      const long double diff = series_at(series, X + H, truncation) - series_at(series, X, truncation);
      worst = std::max(worst, static_cast<double>(std::abs(diff)) / w);
    }
    out.h_values.push_back(h);
    out.split_index.push_back(Nh);
    out.worst_ratio.push_back(worst);
    out.fitted_C = std::max(out.fitted_C, worst);
    out.fitted_C_prime = std::max(out.fitted_C_prime, std::pow(series.q, Nh) / w);
  }
  return out;
}

long double oscillatory_perturbation_derivative(const OscillatorySeries& series, double x, int order,
                                                int truncation) {
  check_truncation(series, truncation);
  if (order < 0 || order > 6) throw DomainError("oscillatory derivative order must lie in [0, 6]");
  const cpp_rational X = exact(x);
  long double sum = 0.0L;
  long double qn = 1.0L;
  for (int n = 1; n <= truncation; ++n) {
    qn *= series.q;
    const int a = series.exponents[n - 1];
    // q^n Q^(order - 6) pi^order, computed in the log domain to avoid overflow.
    const long double log_weight =
        std::log(qn) + (order - 6) * a * std::log(10.0L) + order * std::log(kPi);
    if (log_weight < -11000.0L) continue;
    const long double weight = std::exp(log_weight);
    const cpp_rational arg = X * cpp_rational(power_of_ten(a));
    // sin^(order) cycles through sin, cos, -sin, -cos.
    long double trig = 0.0L;
    switch (order % 4) {
      case 0: trig = sin_pi_rational(arg); break;
      case 1: trig = cos_pi_rational(arg); break;
      case 2: trig = -sin_pi_rational(arg); break;
      default: trig = -cos_pi_rational(arg); break;
    }
    sum += weight * trig;
  }
  return sum;
}

OscillatoryProfile::OscillatoryProfile(OscillatorySeries series, int truncation)
    : series_(std::move(series)), truncation_(truncation) {
  check_truncation(series_, truncation_);
}

double OscillatoryProfile::derivative(double y, int order) const {
  return static_cast<double>(oscillatory_perturbation_derivative(series_, y, order, truncation_));
}

HamiltonianModel hamiltonian_hhh(double epsilon, const OscillatorySeries& series, const MatrixField& A,
                                 const std::vector<double>& omega, double M, int truncation) {
  check_truncation(series, truncation);
  if (omega.size() != 2) throw ConfigError("the oscillatory system has two degrees of freedom");
  if (std::abs(A.constant(0, 1) - A.constant(1, 0)) > 1e-15) throw ConfigError("matrix field must be symmetric");
  HamiltonianModel H;
  H.n = 2;
  H.k = 6;
  H.modulus = ModulusSpec::log_holder(series.lambda);
  H.M = M;
  H.rho = 1.0;
  H.name = "hhh";
  for (int i = 0; i < 2; ++i) H.add({omega[i], std::nullopt, {YPart::Kind::linear, i, i, nullptr}});
  H.add({A.constant(0, 0), std::nullopt, {YPart::Kind::quadratic, 0, 0, nullptr}});
  H.add({A.constant(1, 1), std::nullopt, {YPart::Kind::quadratic, 1, 1, nullptr}});
  if (A.constant(0, 1) != 0.0) H.add({2.0 * A.constant(0, 1), std::nullopt, {YPart::Kind::quadratic, 0, 1, nullptr}});
  if (A.cos_amplitude != 0.0) {
    const SparseTrig c = SparseTrig::cosine(2, A.cos_axis, A.cos_wavenumber);
    for (int i = 0; i < 2; ++i) H.add({A.cos_amplitude, c, {YPart::Kind::quadratic, i, i, nullptr}});
  }
  if (epsilon != 0.0) {
    SparseTrig osc;
    osc.dims = 2;
    long double qn = 1.0L;
    for (int n = 1; n <= truncation; ++n) {
      qn *= series.q;
      const long double amp = qn * std::pow(10.0L, -6.0L * series.exponents[n - 1]);
      if (static_cast<double>(amp) == 0.0) continue;
      // sin(pi Q x) = sin(2 pi (Q/2) x)
      osc.append(SparseTrig::sine(2, 0, 0.5 * series.Q(n), static_cast<double>(amp)));
    }
    if (!osc.modes.empty()) H.add({epsilon, osc, {YPart::Kind::constant, 0, 0, nullptr}});
    H.add({epsilon, std::nullopt,
           {YPart::Kind::univariate, 1, 1, std::make_shared<OscillatoryProfile>(series, truncation)}});
  }
  // Mean action Hessian 2 A0 must satisfy the nondegeneracy bound.
  double inv_norm = 0.0;
  H.mean_hessian_inverse(8, &inv_norm);
  if (inv_norm > M) throw NondegeneracyError("matrix field violates the nondegeneracy bound", inv_norm);
  return H;
}

}  // namespace kamforge
