#include "kamforge/log_quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "kamforge/errors.hpp"

namespace kamforge::logquad {
namespace {

constexpr double kOverflowLog = 700.0;

double panel_quadrature(const LogIntegrand& f, double a, double b, double scale) {
  auto g = [&](double L) {
    const double v = f(L) - scale;
    if (std::isnan(v)) return 0.0;
    return std::exp(v);
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 15, 1e-13, &err);
}

double next_panel_end(double start) { return std::max(2.0 * start, start + 1.0); }

// Maximum of f over a probe set; used only to choose a scaling exponent.
double probe_max(const LogIntegrand& f, double a, double b) {
  double m = -std::numeric_limits<double>::infinity();
  const int probes = 64;
  for (int i = 0; i <= probes; ++i) {
    const double L = a + (b - a) * i / probes;
    const double v = f(L);
    if (!std::isnan(v)) m = std::max(m, v);
  }
  return m;
}

}  // namespace

double log_integral(const LogIntegrand& f, double a, double b) {
  if (!(b > a)) return -std::numeric_limits<double>::infinity();
  const double scale = probe_max(f, a, b);
  if (!std::isfinite(scale)) {
    if (scale < 0) return -std::numeric_limits<double>::infinity();
    throw DomainError("log_integral: integrand is not finite on the interval");
  }
  double total = 0.0;
  double lo = a;
  while (lo < b) {
    const double hi = std::min(b, next_panel_end(lo));
    total += panel_quadrature(f, lo, hi, scale);
    lo = hi;
  }
  if (total <= 0.0) return -std::numeric_limits<double>::infinity();
  return scale + std::log(total);
}

TailResult tail_integral(const LogIntegrand& f, double L0, const TailOptions& options) {
  TailResult out;
  double scale = f(L0);
  if (!std::isfinite(scale)) scale = probe_max(f, L0, next_panel_end(L0));
  if (!std::isfinite(scale)) {
    throw DomainError("tail_integral: integrand is not finite at the lower limit");
  }
  out.scale = scale;

  double lo = L0;
  double total = 0.0;
  int negligible_run = 0;
  for (int j = 0; j < options.max_panels; ++j) {
    const double hi = next_panel_end(lo);
    // Exponential growth relative to the start is unbounded and cannot be summable.
    const double probe = std::max({f(lo), f(0.5 * (lo + hi)), f(hi)});
    if (probe - scale > kOverflowLog) {
      out.panel_starts.push_back(lo);
      out.panel_sums.push_back(std::numeric_limits<double>::infinity());
      out.finite = false;
      out.signature = "overflow";
      return out;
    }
    const double s = panel_quadrature(f, lo, hi, scale);
    out.panel_starts.push_back(lo);
    out.panel_sums.push_back(s);
    total += s;
    if (!std::isfinite(total)) {
      out.finite = false;
      out.signature = "overflow";
      return out;
    }
    if (total > 0.0 && s <= 1e-18 * total) {
      if (++negligible_run >= 2) {
        out.finite = true;
        out.signature = "exhausted";
        out.value = std::exp(scale) * total;
        out.log_value = scale + std::log(total);
        return out;
      }
    } else {
      negligible_run = 0;
    }
    lo = hi;
  }

  const auto& sums = out.panel_sums;
  const int count = static_cast<int>(sums.size());
  const int window = std::min(options.decision_panels, count - 1);
  bool flat = true;
  for (int j = count - window; j < count; ++j) {
    if (!(sums[j] >= options.flat_ratio * sums[j - 1])) {
      flat = false;
      break;
    }
  }
  if (flat) {
    out.finite = false;
    out.signature = sums.back() > sums[count - window - 1] * 1.5 ? "growth" : "flat";
    return out;
  }

  const double last_ratio = sums[count - 1] / sums[count - 2];
  const double prev_ratio = sums[count - 2] / sums[count - 3];
  if (last_ratio <= options.geometric_ratio && prev_ratio <= options.geometric_ratio + 0.05) {
    out.finite = true;
    out.signature = "geometric";
    out.tail_estimate = sums.back() * last_ratio / (1.0 - last_ratio);
  } else {
    // Slowly decaying panels: model s_j = C (G(u_j) - G(u_j + ln 2)) with G(u) = u^(1-e)/(e-1)
    // and u_j = ln a_j, a_j the panel start, so the remaining tail telescopes to C G(u_{J+1}).
    std::vector<double> us, ys;
    for (int j = count - window; j < count; ++j) {
      if (!(sums[j] > 0.0) || !(out.panel_starts[j] > 1.0)) {
        throw IndeterminateError("tail_integral: nonpositive panel in decision window",
                                 out.panel_starts, out.panel_sums);
      }
      us.push_back(std::log(out.panel_starts[j]));
      ys.push_back(std::log(sums[j]));
    }
    const double h = std::log(2.0);
    auto model = [h](double u, double e) {
      if (std::abs(e - 1.0) < 1e-9) return std::log((u + h) / u);
      return (std::pow(u, 1.0 - e) - std::pow(u + h, 1.0 - e)) / (e - 1.0);
    };
    struct Fit {
      double log_c, residual;
    };
    auto fit = [&](double e) {
      double acc = 0.0;
      for (std::size_t i = 0; i < us.size(); ++i) acc += ys[i] - std::log(model(us[i], e));
      const double log_c = acc / static_cast<double>(us.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < us.size(); ++i) {
        worst = std::max(worst, std::abs(ys[i] - log_c - std::log(model(us[i], e))));
      }
      return Fit{log_c, worst};
    };
    double lo_e = 0.1, hi_e = 12.0;
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double e1 = hi_e - golden * (hi_e - lo_e), e2 = lo_e + golden * (hi_e - lo_e);
    double f1 = fit(e1).residual, f2 = fit(e2).residual;
    for (int it = 0; it < 100; ++it) {
      if (f1 < f2) {
        hi_e = e2;
        e2 = e1;
        f2 = f1;
        e1 = hi_e - golden * (hi_e - lo_e);
        f1 = fit(e1).residual;
      } else {
        lo_e = e1;
        e1 = e2;
        f1 = f2;
        e2 = lo_e + golden * (hi_e - lo_e);
        f2 = fit(e2).residual;
      }
    }
    const double e = 0.5 * (lo_e + hi_e);
    const Fit best = fit(e);
    out.fitted_exponent = e;
    if (best.residual > options.fit_residual) {
      throw IndeterminateError("tail_integral: panel sums follow neither a geometric nor a power law",
                               out.panel_starts, out.panel_sums);
    }
    if (e <= options.min_power_exponent) {
      out.finite = false;
      out.signature = "flat";
      return out;
    }
    out.finite = true;
    out.signature = "power";
    const double u_next = us.back() + h;
    out.tail_estimate = std::exp(best.log_c) * std::pow(u_next, 1.0 - e) / (e - 1.0);
  }
  const double scaled = total + out.tail_estimate;
  out.value = std::exp(scale) * scaled;
  out.log_value = scale + std::log(scaled);
  return out;
}

}  // namespace kamforge::logquad
