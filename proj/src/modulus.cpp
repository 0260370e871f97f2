#include "kamforge/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kamforge/errors.hpp"
#include "kamforge/log_quadrature.hpp"

namespace kamforge {

std::string family_name(ModulusFamily family) {
  switch (family) {
    case ModulusFamily::holder: return "holder";
    case ModulusFamily::log_holder: return "logholder";
    case ModulusFamily::gen_log_holder: return "genlogholder";
    case ModulusFamily::lipschitz: return "lipschitz";
    case ModulusFamily::power_log: return "powerlog";
    case ModulusFamily::tabulated: return "tabulated";
  }
  return "unknown";
}

ModulusFamily parse_family(const std::string& name) {
  if (name == "holder") return ModulusFamily::holder;
  if (name == "logholder") return ModulusFamily::log_holder;
  if (name == "genlogholder") return ModulusFamily::gen_log_holder;
  if (name == "lipschitz") return ModulusFamily::lipschitz;
  if (name == "powerlog") return ModulusFamily::power_log;
  if (name == "tabulated") return ModulusFamily::tabulated;
  throw ConfigError("unknown modulus family '" + name + "'");
}

double default_gen_log_delta(int rho) {
  if (rho <= 1) return 0.5;
  // Iterated exponential of 1: ln(...ln(1/delta)) = 1 after rho logs.
  double level = 1.0;
  for (int i = 0; i < rho; ++i) level = std::exp(level);
  return 1.0 / level;
}

ModulusSpec ModulusSpec::holder(double alpha, double delta) {
  ModulusSpec s;
  s.family = ModulusFamily::holder;
  s.alpha = alpha;
  s.delta = delta;
  s.validate();
  return s;
}

ModulusSpec ModulusSpec::log_holder(double lambda, double delta) {
  ModulusSpec s;
  s.family = ModulusFamily::log_holder;
  s.lambda = lambda;
  s.delta = delta;
  s.validate();
  return s;
}

ModulusSpec ModulusSpec::gen_log_holder(int rho, double lambda, double delta) {
  ModulusSpec s;
  s.family = ModulusFamily::gen_log_holder;
  s.rho = rho;
  s.lambda = lambda;
  s.delta = delta > 0.0 ? delta : default_gen_log_delta(rho);
  s.validate();
  return s;
}

ModulusSpec ModulusSpec::lipschitz(double delta) {
  ModulusSpec s;
  s.family = ModulusFamily::lipschitz;
  s.delta = delta;
  s.validate();
  return s;
}

ModulusSpec ModulusSpec::power_log(double beta, double lambda, double delta) {
  ModulusSpec s;
  s.family = ModulusFamily::power_log;
  s.beta = beta;
  s.lambda = lambda;
  s.delta = delta;
  s.validate();
  return s;
}

ModulusSpec ModulusSpec::tabulated(std::vector<std::pair<double, double>> table, double delta) {
  ModulusSpec s;
  s.family = ModulusFamily::tabulated;
  s.table = std::move(table);
  s.delta = delta > 0.0 ? delta : (s.table.empty() ? 0.0 : s.table.back().first);
  s.validate();
  return s;
}

void ModulusSpec::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("modulus delta must lie in (0, 1]");
  switch (family) {
    case ModulusFamily::holder:
      if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("holder alpha must lie in (0, 1]");
      break;
    case ModulusFamily::log_holder:
      if (!(lambda > 0.0)) throw ConfigError("logholder lambda must be positive");
      if (!(delta < 1.0)) throw ConfigError("logholder delta must be below 1");
      break;
    case ModulusFamily::gen_log_holder: {
      if (rho < 1) throw ConfigError("genlogholder rho must be a positive integer");
      if (!(lambda > 0.0)) throw ConfigError("genlogholder lambda must be positive");
      // Every iterated log must stay >= 1 on (0, delta] for the product to be monotone.
      double level = std::log(1.0 / delta);
      for (int i = 1; i < rho; ++i) {
        if (!(level > 1.0)) throw ConfigError("genlogholder delta too large for the iterated logs");
        level = std::log(level);
      }
      if (!(level > 0.0) || (rho > 1 && level < 1.0 - 1e-12)) {
        throw ConfigError("genlogholder delta too large for the iterated logs");
      }
      break;
    }
    case ModulusFamily::lipschitz: break;
    case ModulusFamily::power_log:
      if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("powerlog beta must lie in [0, 1]");
      if (!(lambda > 0.0)) throw ConfigError("powerlog lambda must be positive");
      if (!(delta < 1.0)) throw ConfigError("powerlog delta must be below 1");
      break;
    case ModulusFamily::tabulated: {
      if (table.size() < 2) throw ConfigError("tabulated modulus needs at least two nodes");
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (!(table[i].first > 0.0) || !(table[i].second >= 0.0)) {
          throw ConfigError("tabulated nodes must have x > 0 and value >= 0");
        }
        if (i > 0 && !(table[i].first > table[i - 1].first)) {
          throw ConfigError("tabulated x values must be strictly ascending");
        }
        if (i > 0 && table[i].second < table[i - 1].second) {
          throw ConfigError("tabulated values must be nondecreasing");
        }
      }
      if (delta > table.back().first * (1.0 + 1e-12)) {
        throw ConfigError("tabulated delta exceeds the last node");
      }
      break;
    }
  }
}

double ModulusSpec::min_scale() const { return -std::log(delta); }

namespace {

double tabulated_value(const ModulusSpec& spec, double x) {
  const auto& t = spec.table;
  if (x <= t.front().first) return t.front().second * (x / t.front().first);
  auto it = std::lower_bound(t.begin(), t.end(), x,
                             [](const std::pair<double, double>& node, double v) { return node.first < v; });
  if (it == t.end()) return t.back().second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (x - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

void check_scale(const ModulusSpec& spec, double L) {
  const double Lmin = spec.min_scale();
  if (!(L >= Lmin - 1e-12 * std::max(1.0, std::abs(Lmin)))) {
    throw DomainError("modulus evaluated outside (0, delta]");
  }
}

}  // namespace

double log_eval_modulus(const ModulusSpec& spec, double L) {
  check_scale(spec, L);
  switch (spec.family) {
    case ModulusFamily::holder: return -spec.alpha * L;
    case ModulusFamily::log_holder: return -spec.lambda * std::log(L);
    case ModulusFamily::gen_log_holder: {
      double level = L;
      double acc = 0.0;
      for (int i = 1; i < spec.rho; ++i) {
        acc -= std::log(level);
        level = std::log(level);
      }
      return acc - spec.lambda * std::log(level);
    }
    case ModulusFamily::lipschitz: return -L;
    case ModulusFamily::power_log: return -spec.beta * L - spec.lambda * std::log(L);
    case ModulusFamily::tabulated: {
      const double x0 = spec.table.front().first;
      const double y0 = spec.table.front().second;
      if (L >= -std::log(x0)) {
        if (y0 <= 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(y0 / x0) - L;
      }
      const double v = tabulated_value(spec, std::exp(-L));
      return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
    }
  }
  return 0.0;
}

double eval_modulus(const ModulusSpec& spec, double x) {
  if (!(x > 0.0) || x > spec.delta * (1.0 + 1e-12)) {
    throw DomainError("modulus argument outside (0, delta]");
  }
  switch (spec.family) {
    case ModulusFamily::holder: return std::pow(x, spec.alpha);
    case ModulusFamily::lipschitz: return x;
    case ModulusFamily::tabulated: return tabulated_value(spec, x);
    default: return std::exp(log_eval_modulus(spec, -std::log(x)));
  }
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::weaker: return "weaker";
    case Verdict::strictly_weaker: return "strictly_weaker";
    case Verdict::not_weaker: return "not_weaker";
  }
  return "unknown";
}

std::vector<double> dyadic_scale_grid(double delta, int count) {
  std::vector<double> L(count);
  const double L0 = -std::log(delta);
  for (int j = 0; j < count; ++j) L[j] = L0 + j * std::log(2.0);
  return L;
}

std::vector<double> geometric_scale_grid(double L_min, double L_max, int count) {
  if (count < 2 || !(L_min > 0.0) || !(L_max > L_min)) {
    throw ConfigError("geometric scale grid needs count >= 2 and 0 < L_min < L_max");
  }
  std::vector<double> L(count);
  const double q = std::log(L_max / L_min) / (count - 1);
  for (int j = 0; j < count; ++j) L[j] = L_min * std::exp(q * j);
  return L;
}

ComparisonVerdict compare_moduli(const ModulusSpec& w1, const ModulusSpec& w2,
                                 const std::vector<double>& scales, const CompareOptions& options) {
  if (scales.size() < 8) throw ConfigError("compare_moduli needs a grid of at least 8 points");
  if (options.tail_points < 3 || options.tail_points > static_cast<int>(scales.size())) {
    throw ConfigError("compare_moduli tail_points out of range");
  }
  ComparisonVerdict out;
  for (double L : scales) {
    const double lr = log_eval_modulus(w2, L) - log_eval_modulus(w1, L);
    out.ratio_trace.push_back({L, std::exp(-L), std::exp(lr)});
  }
  const int m = options.tail_points;
  const int n = static_cast<int>(scales.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool monotone_down = true;
  for (int i = n - m; i < n; ++i) {
    const double x = std::log(out.ratio_trace[i].scale);
    const double y = std::log(out.ratio_trace[i].ratio);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    if (i > n - m && out.ratio_trace[i].ratio > out.ratio_trace[i - 1].ratio * (1.0 + 1e-12)) {
      monotone_down = false;
    }
  }
  out.tail_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double last = out.ratio_trace.back().ratio;
  if (last < options.tolerance || (out.tail_slope < -options.slope_threshold && monotone_down)) {
    out.verdict = Verdict::strictly_weaker;
  } else if (out.tail_slope > options.slope_threshold) {
    out.verdict = Verdict::not_weaker;
  } else {
    out.verdict = Verdict::weaker;
  }
  return out;
}

SeparabilityProfile semi_separability_profile(const ModulusSpec& spec,
                                              const std::vector<double>& x_values) {
  if (x_values.empty()) throw ConfigError("semi_separability_profile needs x values");
  SeparabilityProfile out;
  const double L0 = spec.min_scale();
  const double ln2 = std::log(2.0);
  for (std::size_t i = 0; i < x_values.size(); ++i) {
    const double x = x_values[i];
    if (!(x >= 1.0)) throw DomainError("semi_separability_profile requires x >= 1");
    if (i > 0 && !(x > x_values[i - 1])) throw DomainError("x values must be ascending");
    const double lx = std::log(x);
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 120; ++j) {
      const double Lr = L0 + j * ln2;
      const double Lrx = Lr - lx;
      if (Lrx < L0 - 1e-12) continue;
      best = std::max(best, log_eval_modulus(spec, std::max(Lrx, L0)) - log_eval_modulus(spec, Lr));
    }
    if (!std::isfinite(best)) throw DomainError("no feasible r for the requested x");
    out.points.push_back({x, std::exp(best)});
  }
  const std::size_t head = std::max<std::size_t>(1, out.points.size() / 2);
  for (std::size_t i = 0; i < head; ++i) {
    out.fitted_constant = std::max(out.fitted_constant, out.points[i].psi / out.points[i].x);
  }
  out.linear_bound = true;
  for (std::size_t i = head; i < out.points.size(); ++i) {
    if (out.points[i].psi / out.points[i].x > 2.0 * out.fitted_constant) out.linear_bound = false;
  }
  return out;
}

double weak_homogeneity_ratio(const ModulusSpec& spec, double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("weak homogeneity needs 0 < a < 1");
  const double L0 = spec.min_scale();
  const double la = -std::log(a);
  double best = 0.0;
  for (int j = 30; j < 60; ++j) {
    const double L = L0 + j * std::log(2.0);
    best = std::max(best, std::exp(log_eval_modulus(spec, L) - log_eval_modulus(spec, L + la)));
  }
  return best;
}

InvariantReport check_invariants(const ModulusSpec& spec) {
  InvariantReport r;
  const auto grid = dyadic_scale_grid(spec.delta, 61);
  r.monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (double L : grid) {
    const double lw = log_eval_modulus(spec, L);
    if (lw > prev + 1e-12) r.monotone = false;
    prev = lw;
    r.limsup_x_over_w = std::max(r.limsup_x_over_w, std::exp(-L - lw));
  }
  // Decay of the sampled values along scales far beyond the dyadic range.
  r.vanishing = true;
  double last = log_eval_modulus(spec, grid.front());
  for (double L = std::max(1.0, grid.front()) * 10.0; L < 1e300; L *= 1e10) {
    const double lw = log_eval_modulus(spec, L);
    if (!(lw < last)) r.vanishing = false;
    last = lw;
  }
  return r;
}

DiniResult power_weighted_integral(const ModulusSpec& spec, double p, double upper) {
  double L0 = std::max(spec.min_scale(), 0.0);
  if (upper > 0.0) L0 = std::max(L0, std::log(1.0 / upper));
  auto integrand = [&](double L) { return log_eval_modulus(spec, L) + (p - 1.0) * L; };
  const auto tail = logquad::tail_integral(integrand, L0);
  DiniResult out;
  out.finite = tail.finite;
  out.value = tail.finite ? tail.value : std::numeric_limits<double>::infinity();
  out.power = p;
  out.signature = tail.signature;
  out.panel_starts = tail.panel_starts;
  out.panel_sums = tail.panel_sums;
  return out;
}

DiniResult dini_integral(const ModulusSpec& spec, int k, double tau) {
  if (static_cast<double>(k) < 2.0 * tau + 2.0 - 1e-12) {
    throw DomainError("dini_integral requires k >= 2 tau + 2");
  }
  return power_weighted_integral(spec, 2.0 * tau + 3.0 - k);
}

}  // namespace kamforge
