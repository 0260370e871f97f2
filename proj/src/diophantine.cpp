#include "kamforge/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kamforge/errors.hpp"
#include "kamforge/parallel.hpp"

namespace kamforge {
namespace {

struct Candidate {
  long double value = std::numeric_limits<long double>::infinity();
  std::vector<long> k;
};

// Error-free product and sum accumulation (Neumaier) in long double.
struct CompensatedSum {
  long double sum = 0.0L;
  long double carry = 0.0L;
  void add(long double x) {
    const long double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  void add_product(long double a, long double b) {
    const long double p = a * b;
    add(p);
    carry += std::fmal(a, b, -p);
  }
  long double value() const { return sum + carry; }
};

std::vector<long double> weight_table(long K, double tau) {
  std::vector<long double> w(static_cast<std::size_t>(K) + 1);
  for (long m = 0; m <= K; ++m) w[m] = std::pow(static_cast<long double>(m), static_cast<long double>(tau));
  return w;
}

void enumerate_tail(const std::vector<long double>& omega, const std::vector<long double>& weight,
                    std::vector<long>& k, std::size_t pos, long used, bool leading_zero,
                    Candidate& best) {
  const std::size_t n = omega.size();
  const long K = static_cast<long>(weight.size()) - 1;
  if (pos == n) {
    if (used == 0) return;
    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) acc.add_product(static_cast<long double>(k[i]), omega[i]);
    const long double v = std::fabs(acc.value()) * weight[used];
    if (v < best.value) {
      best.value = v;
      best.k = k;
    }
    return;
  }
  const long budget = K - used;
  // While every earlier component is zero, the current one must be nonnegative.
  const long lo = leading_zero ? 0 : -budget;
  for (long c = lo; c <= budget; ++c) {
    k[pos] = c;
    enumerate_tail(omega, weight, k, pos + 1, used + std::labs(c), leading_zero && c == 0, best);
  }
  k[pos] = 0;
}

}  // namespace

std::vector<double> FrequencyVector::as_double() const {
  std::vector<double> out(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) out[i] = static_cast<double>(omega[i]);
  return out;
}

long double lattice_pairing(const std::vector<long>& k, const std::vector<long double>& omega) {
  if (k.size() != omega.size()) throw DomainError("lattice vector and frequency differ in dimension");
  CompensatedSum acc;
  for (std::size_t i = 0; i < k.size(); ++i) acc.add_product(static_cast<long double>(k[i]), omega[i]);
  return acc.value();
}

MarginResult diophantine_margin(const std::vector<long double>& omega, double tau, long K) {
  if (K < 1) throw DomainError("diophantine_margin requires K >= 1");
  if (omega.size() < 2) throw DomainError("diophantine_margin requires dimension >= 2");
  for (long double w : omega) {
    if (!std::isfinite(w)) throw DomainError("frequency components must be finite");
  }
  if (!(tau >= 0.0)) throw DomainError("tau must be nonnegative");
  const auto weight = weight_table(K, tau);
  const std::size_t n = omega.size();
  std::vector<Candidate> per_lead(static_cast<std::size_t>(K) + 1);

  if (n == 2) {
    const long double w1 = omega[0], w2 = omega[1];
    const long double bound = std::min(std::fabs(w1), std::fabs(w2)) * (1.0L + 1e-12L);
    parallel_for(per_lead.size(), [&](std::size_t idx) {
      const long k1 = static_cast<long>(idx);
      const long budget = K - k1;
      const long lo = (k1 == 0) ? 1 : -budget;
      Candidate best;
      const long double p1 = static_cast<long double>(k1) * w1;
      const long double e1 = std::fmal(static_cast<long double>(k1), w1, -p1);
      long k2_lo = lo, k2_hi = budget;
      if (w2 != 0.0L) {
        // Weights are >= 1, so only |<k, omega>| <= bound can beat a unit vector.
        const long double a = (-p1 - bound) / w2, b = (-p1 + bound) / w2;
        k2_lo = std::max<long>(lo, static_cast<long>(std::floor(std::min(a, b))) - 1);
        k2_hi = std::min<long>(budget, static_cast<long>(std::ceil(std::max(a, b))) + 1);
      }
      for (long k2 = k2_lo; k2 <= k2_hi; ++k2) {
        CompensatedSum acc;
        acc.add(p1);
        acc.carry += e1;
        acc.add_product(static_cast<long double>(k2), w2);
        const long double v = std::fabs(acc.value()) * weight[k1 + std::labs(k2)];
        if (v < best.value) {
          best.value = v;
          best.k = {k1, k2};
        }
      }
      per_lead[idx] = std::move(best);
    });
  } else {
    parallel_for(per_lead.size(), [&](std::size_t idx) {
      const long k1 = static_cast<long>(idx);
      std::vector<long> k(n, 0);
      k[0] = k1;
      Candidate best;
      enumerate_tail(omega, weight, k, 1, k1, k1 == 0, best);
      per_lead[idx] = std::move(best);
    });
  }

  MarginResult out;
  out.K = K;
  out.tau = tau;
  out.margin = std::numeric_limits<long double>::infinity();
  for (auto& c : per_lead) {
    if (!c.k.empty() && c.value < out.margin) {
      out.margin = c.value;
      out.argmin = c.k;
    }
  }
  return out;
}

double estimate_alpha_star(const std::vector<long double>& omega, double tau, long K) {
  return static_cast<double>(diophantine_margin(omega, tau, K).margin);
}

FrequencyVector standard_frequency(const std::string& name) {
  FrequencyVector f;
  if (name == "golden2") {
    f.omega = {1.0L, (1.0L + std::sqrt(5.0L)) / 2.0L};
    f.tau = 2.0;
  } else if (name == "sqrt2_2") {
    f.omega = {1.0L, std::sqrt(2.0L)};
    f.tau = 2.0;
  } else if (name == "cubic3") {
    long double t = 1.3L;
    for (int i = 0; i < 50; ++i) t -= (t * t * t - t - 1.0L) / (3.0L * t * t - 1.0L);
    f.omega = {1.0L, t, t * t};
    f.tau = 3.0;
  } else {
    throw ConfigError("unknown standard frequency '" + name + "'");
  }
  return f;
}

}  // namespace kamforge
