#include "kamforge/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kamforge/errors.hpp"
#include "kamforge/log_quadrature.hpp"
#include "kamforge/parallel.hpp"

namespace kamforge {
namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit out;
  const std::size_t n = xs.size();
  if (n < 2) return out;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (out.intercept + out.slope * xs[i]);
    ss += e * e;
  }
  out.rms = std::sqrt(ss / n);
  return out;
}

std::string format_tag(const char* family, double exponent) {
  std::ostringstream os;
  os.precision(3);
  os << family << ":" << exponent;
  return os.str();
}

}  // namespace

PhiProfile PhiProfile::from_hypothesis(const ModulusSpec& base, int k, double tau, int i) {
  if (i != 1 && i != 2) throw DomainError("profile index must be 1 or 2");
  PhiProfile p;
  p.base = base;
  p.power = k - (3 - i) * tau - 1.0;
  return p;
}

double PhiProfile::eval(double x) const { return std::pow(x, power) * eval_modulus(base, x); }

double PhiProfile::log_eval(double L) const { return log_eval_modulus(base, L) - power * L; }

CriticalExponent critical_exponent(const PhiProfile& phi, int cap) {
  if (cap < 1) throw DomainError("critical exponent cap must be positive");
  CriticalExponent out;
  for (int m = 0; m <= cap + 1; ++m) {
    out.probes.push_back(power_weighted_integral(phi.base, m + 1.0 - phi.power));
    if (!out.probes.back().finite) {
      if (m == 0) throw DomainError("phi is too singular: the integral of phi / x diverges");
      out.k_star = m - 1;
      return out;
    }
  }
  out.k_star = cap;
  out.unbounded = true;
  return out;
}

double RemainingModulus::interpolate(double gamma) const {
  if (rows.empty()) throw DomainError("empty remaining-modulus table");
  if (gamma <= 0.0) return 0.0;
  if (gamma <= rows.front().gamma) return rows.front().value * gamma / rows.front().gamma;
  if (gamma >= rows.back().gamma) return rows.back().value;
  const auto it = std::lower_bound(rows.begin(), rows.end(), gamma,
                                   [](const RemainingRow& r, double g) { return r.gamma < g; });
  const RemainingRow& hi = *it;
  const RemainingRow& lo = *(it - 1);
  const double t = (gamma - lo.gamma) / (hi.gamma - lo.gamma);
  return lo.value + t * (hi.value - lo.value);
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw DomainError("invalid geometric grid");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) g[i] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

RemainingModulus remaining_modulus(const PhiProfile& phi, int k_star, double epsilon,
                                   const std::vector<double>& gammas) {
  if (!(epsilon > 0.0) || epsilon > std::min(phi.base.delta, 1.0)) {
    throw DomainError("epsilon must lie in (0, min(delta, 1)]");
  }
  RemainingModulus out;
  out.k_star = k_star;
  out.epsilon = epsilon;
  std::vector<double> sorted = gammas;
  std::sort(sorted.begin(), sorted.end());
  for (double g : sorted) {
    if (!(g > 0.0 && g < epsilon)) throw DomainError("gamma grid must lie in (0, epsilon)");
  }
  const double Leps = std::log(1.0 / epsilon);
  // In s = ln(1/t): outer integrand phi t^-(k+1), inner integrand phi t^-k.
  auto log_outer = [&](double gamma, double ell) {
    const double e = k_star + 1.0 - phi.power;
    return std::log(gamma) +
           logquad::log_integral([&](double s) { return log_eval_modulus(phi.base, s) + e * s; }, Leps, ell);
  };
  auto log_inner = [&](double ell) {
    const double e = k_star - phi.power;
    const auto t = logquad::tail_integral([&](double s) { return log_eval_modulus(phi.base, s) + e * s; }, ell);
    if (!t.finite) throw DomainError("inner integral diverges; k_star exceeds the critical exponent");
    return t.log_value;
  };

  out.rows.resize(sorted.size());
  parallel_for(sorted.size(), [&](std::size_t i) {
    const double gamma = sorted[i];
    const double ell0 = std::log(1.0 / gamma);
    auto gap = [&](double ell, double* lo_out, double* li_out) {
      const double lo = log_outer(gamma, ell);
      const double li = log_inner(ell);
      if (lo_out) *lo_out = lo;
      if (li_out) *li_out = li;
      return lo - li;
    };
    double a = ell0;
    double fa = gap(a, nullptr, nullptr);
    double b = a;
    double fb = fa;
    if (fa < 0.0) {
      double step = 1.0;
      while (fb < 0.0) {
        a = b;
        b = ell0 + step;
        fb = gap(b, nullptr, nullptr);
        step *= 2.0;
        if (step > 1e6) throw DomainError("balance unattainable: outer integral never reaches the inner one");
      }
      for (int it = 0; it < 200 && b - a > 1e-12 * b; ++it) {
        const double mid = 0.5 * (a + b);
        if (gap(mid, nullptr, nullptr) < 0.0) a = mid; else b = mid;
      }
    } else if (fa > std::log(2.0)) {
      std::ostringstream os;
      os << "balance unattainable at gamma = " << gamma << ": outer exceeds inner by factor " << std::exp(fa)
         << " already at L = gamma";
      throw DomainError(os.str());
    }
    double lo = 0.0, li = 0.0;
    gap(b, &lo, &li);
    RemainingRow& row = out.rows[i];
    row.gamma = gamma;
    row.L = std::exp(-b);
    row.outer = std::exp(lo);
    row.inner = std::exp(li);
    row.value = row.inner;
  });

  std::vector<double> lg, lv, llg;
  for (const auto& r : out.rows) {
    if (r.value > 0.0) {
      lg.push_back(std::log(r.gamma));
      llg.push_back(std::log(std::log(1.0 / r.gamma)));
      lv.push_back(std::log(r.value));
    }
  }
  if (lg.size() >= 3) {
    const LineFit power = fit_line(lg, lv);
    const LineFit logf = fit_line(llg, lv);
    out.family_tag = power.rms <= logf.rms ? format_tag("holder", power.slope) : format_tag("log_holder", -logf.slope);
  }
  return out;
}

RegularityReport empirical_modulus(const std::vector<double>& samples, double spacing,
                                   const std::vector<double>& scales) {
  if (!(spacing > 0.0)) throw DomainError("grid spacing must be positive");
  if (samples.size() < 2) throw DomainError("need at least two samples");
  RegularityReport out;
  std::vector<double> sorted = scales;
  std::sort(sorted.begin(), sorted.end());
  for (double h : sorted) {
    const double s = h / spacing;
    const double si = std::round(s);
    if (si < 1.0 || std::abs(s - si) > 1e-6 * si) throw DomainError("scale below or off the grid spacing");
    const std::size_t step = static_cast<std::size_t>(si);
    if (step >= samples.size()) throw DomainError("scale exceeds the sampled range");
    double m = 0.0;
    for (std::size_t i = 0; i + step < samples.size(); ++i) m = std::max(m, std::abs(samples[i + step] - samples[i]));
    out.rows.push_back({h, m});
  }
  std::vector<double> lh, lm, llh, llm;
  for (const auto& r : out.rows) {
    if (r.modulus <= 0.0) continue;
    lh.push_back(std::log(r.h));
    lm.push_back(std::log(r.modulus));
    if (r.h < 0.5) {
      llh.push_back(std::log(std::log(1.0 / r.h)));
      llm.push_back(std::log(r.modulus));
    }
  }
  const LineFit holder = fit_line(lh, lm);
  const LineFit logf = fit_line(llh, llm);
  out.holder_exponent = holder.slope;
  out.holder_residual = holder.rms;
  out.log_exponent = -logf.slope;
  out.log_residual = logf.rms;
  return out;
}

IterateCheck iterate_regularity_check(const std::vector<std::pair<double, double>>& sequence, const PhiProfile& phi,
                                      double jump_factor) {
  if (!(jump_factor > 1.0)) throw DomainError("jump factor must exceed 1");
  IterateCheck out;
  double running = 0.0;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto [r, inc] = sequence[i];
    const double p = phi.eval(r);
    if (!(p > 0.0)) throw DomainError("phi must be positive at every radius");
    const double ratio = inc / p;
    out.ratios.push_back(ratio);
    if (i > 0 && running > 0.0) {
      const double jump = ratio / running;
      out.worst_jump = std::max(out.worst_jump, jump);
      if (jump > jump_factor && out.pass) {
        out.pass = false;
        out.failed_index = static_cast<int>(i);
      }
    }
    running = std::max(running, ratio);
  }
  out.fitted_constant = running;
  return out;
}

double iterated_log_integral_ratio(int rho, double lambda, double M, double X) {
  if (rho < 1 || !(lambda > 1.0) || !(M > 1.0) || !(X > M)) throw DomainError("invalid lemma oracle parameters");
  // ln of 1 / (l1 ... l_rho^lambda) at z = e^s.
  auto log_weight = [&](double s) {
    double l = s, acc = 0.0;
    for (int i = 1; i <= rho; ++i) {
      if (!(l > 0.0)) throw DomainError("iterated logarithm is not positive on the range; raise M");
      acc -= (i == rho ? lambda : 1.0) * std::log(l);
      l = std::log(l);
    }
    return acc;
  };
  const double sM = std::log(M), sX = std::log(X);
  const double li = logquad::log_integral([&](double s) { return s + log_weight(s); }, sM, sX);
  return std::exp(li - (sX + log_weight(sX)));
}

double power_log_integral_ratio(double sigma, double lambda, double M, double X) {
  if (!(sigma > 0.0 && sigma < 1.0) || !(M > 1.0) || !(X > M)) throw DomainError("invalid lemma oracle parameters");
  const double sM = std::log(M), sX = std::log(X);
  const double li =
      logquad::log_integral([&](double s) { return (1.0 - sigma) * s - lambda * std::log(s); }, sM, sX);
  return std::exp(li - ((1.0 - sigma) * sX - lambda * std::log(sX)));
}

double power_log_tail_ratio(double sigma, double lambda, double X) {
  if (!(sigma > 0.0 && sigma < 1.0) || !(X > 1.0)) throw DomainError("invalid lemma oracle parameters");
  const double sX = std::log(X);
  const auto t = logquad::tail_integral([&](double s) { return -sigma * s - lambda * std::log(s); }, sX);
  if (!t.finite) throw IndeterminateError("tail integral did not converge", t.panel_starts, t.panel_sums);
  return std::exp(t.log_value - (-sigma * sX - lambda * std::log(sX)));
}

}  // namespace kamforge
