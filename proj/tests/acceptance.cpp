// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kamforge/diophantine.hpp"
#include "kamforge/errors.hpp"
#include "kamforge/homological.hpp"
#include "kamforge/kam.hpp"
#include "kamforge/modulus.hpp"
#include "kamforge/regularity.hpp"
#include "kamforge/smoothing.hpp"
#include "kamforge/systems.hpp"

using namespace kamforge;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

const std::vector<double> kGolden = {1.0, 1.6180339887498949};

Outcome kernel_moments() {
  const SmoothingKernel k = build_kernel(0.5);
  double worst = 0.0;
  int unresolved = 0;
  std::string worst_at;
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; b <= 3; ++b) {
      const double expected = a == b ? std::pow(-1.0, a) * std::tgamma(a + 1.0) : 0.0;
      try {
        const double e = std::abs(kernel_moment(k, {a}, {b}, 4096, 64.0) - expected);
        if (e > worst) {
          worst = e;
          worst_at = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
        }
      } catch (const ResolutionError&) {
        ++unresolved;
      }
    }
  }
  return {worst <= 1e-6 && unresolved == 0,
          fmt("max abs error %.3g", worst) + " at " + worst_at + ", unresolved entries " + std::to_string(unresolved)};
}

Outcome plateau() {
  const SmoothingKernel k = build_kernel(0.5);
  const double r = 0.5 / (16.0 * M_PI);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int degree = 0; degree <= 8; ++degree) {
    for (int dims = 1; dims <= 2; ++dims) {
      std::vector<std::array<double, 4>> modes;
      for (int a = -degree; a <= degree; ++a) {
        for (int b = (dims == 1 ? 0 : -degree); b <= (dims == 1 ? 0 : degree); ++b) {
          if (std::abs(a) + std::abs(b) <= degree) modes.push_back({double(a), double(b), u(rng), u(rng)});
        }
      }
      const auto f = PeriodicField::from_function(dims, 32, [&](const double* x) {
        double s = 0.0;
        for (const auto& m : modes) {
          const double ph = 2 * M_PI * (m[0] * x[0] + (dims == 2 ? m[1] * x[1] : 0.0));
          s += m[2] * std::cos(ph) + m[3] * std::sin(ph);
        }
        return s;
      });
      worst = std::max(worst, (smooth_periodic(f, r, k) - f).sup_norm());
    }
  }
  return {worst <= 1e-12, fmt("max sup|S_r f - f| = %.3g over degrees 0..8 in 1-D and 2-D", worst)};
}

Outcome jackson() {
  const auto f = PeriodicField::from_function(
      1, 1 << 14, [](const double* x) { return std::pow(std::abs(std::sin(M_PI * x[0])), 6.5); });
  std::vector<double> rs;
  for (int j = 3; j <= 10; ++j) rs.push_back(std::ldexp(1.0, -j));
  const JacksonReport rep = jackson_error_report(f, 6, ModulusSpec::holder(0.5), rs);
  return {std::abs(rep.slope - 6.5) <= 0.2, fmt("slope %.4f over r = 2^-3..2^-10", rep.slope)};
}

Outcome homological() {
  const int N = 256, cutoff = 64;
  const double tau = 2.0;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<cplx> spec(static_cast<std::size_t>(N) * N, cplx(0.0, 0.0));
  for (int a = -cutoff; a <= cutoff; ++a) {
    for (int b = -cutoff; b <= cutoff; ++b) {
      if ((a == 0 && b == 0) || std::abs(a) + std::abs(b) > cutoff) continue;
      spec[static_cast<std::size_t>((a + N) % N) * N + (b + N) % N] = cplx(n(rng), n(rng));
    }
  }
  const auto g = PeriodicField::from_spectrum(2, N, std::move(spec));
  const auto sol = solve_homological(g, kGolden);
  const double alpha = estimate_alpha_star({1.0L, 1.6180339887498948482L}, tau, cutoff);
  const double bound = small_divisor_amplification(tau, alpha, cutoff);
  return {sol.residual <= 1e-10 && sol.mode_amplification <= bound,
          fmt("residual %.3g, amplification %.4g <= bound %.4g (alpha_* %.4g)", sol.residual, sol.mode_amplification,
              bound, alpha)};
}

Outcome diophantine() {
  // Exhaustive-scan reference from tests/oracles/oracles.py: margin 1 at k = (1, 0).
  const MarginResult m = diophantine_margin(standard_frequency("golden2").omega, 1.0, 10000);
  const bool ok = static_cast<double>(m.margin) == 1.0 && m.argmin == std::vector<long>{1, 0};
  return {ok, fmt("margin %.17g at k = (%g, %g)", static_cast<double>(m.margin), double(m.argmin[0]),
                  double(m.argmin[1]))};
}

Outcome dini() {
  const auto lh = dini_integral(ModulusSpec::log_holder(2.0), 6, 2.0);
  const auto h = dini_integral(ModulusSpec::holder(0.5), 6, 2.0);
  const auto div = dini_integral(ModulusSpec::log_holder(1.0), 6, 2.0);
  const bool ok = lh.finite && std::abs(lh.value - 1.0 / std::log(2.0)) <= 1e-6 && h.finite &&
                  std::abs(h.value - 2.0) <= 1e-8 && !div.finite;
  return {ok, fmt("LH(2) %.12f, Holder(0.5) %.12f, ", lh.value, h.value) +
                  "LH(1) " + (div.finite ? "finite" : "divergent")};
}

Outcome critical() {
  struct Case {
    const char* name;
    ModulusSpec w;
    int k1, k2;
  };
  const Case cases[] = {{"Holder(0.5)", ModulusSpec::holder(0.5), 1, 3},
                        {"LogHolder(2)", ModulusSpec::log_holder(2.0), 1, 3},
                        {"GenLogHolder(2,2)", ModulusSpec::gen_log_holder(2, 2.0), 1, 3}};
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : cases) {
    const int k1 = critical_exponent(PhiProfile::from_hypothesis(c.w, 6, 2.0, 1)).k_star;
    const int k2 = critical_exponent(PhiProfile::from_hypothesis(c.w, 6, 2.0, 2)).k_star;
    ok = ok && k1 == c.k1 && k2 == c.k2;
    os << c.name << " (" << k1 << "," << k2 << ") ";
  }
  return {ok, os.str()};
}

Outcome remaining() {
  const auto grid = geometric_grid(1e-10, 1e-3, 15);
  double lo = 1e300, hi = 0.0;
  const auto lh = remaining_modulus(PhiProfile::from_hypothesis(ModulusSpec::log_holder(2.0), 6, 2.0, 1), 1, 0.1, grid);
  for (const auto& r : lh.rows) {
    const double t = r.value * std::log(1.0 / r.gamma);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  double glo = 1e300, ghi = 0.0;
  const auto glh =
      remaining_modulus(PhiProfile::from_hypothesis(ModulusSpec::gen_log_holder(2, 2.0), 6, 2.0, 1), 1, 0.05, grid);
  for (const auto& r : glh.rows) {
    const double t = r.value * std::log(std::log(1.0 / r.gamma));
    glo = std::min(glo, t);
    ghi = std::max(ghi, t);
  }
  const bool ok = lo >= 0.2 && hi <= 5.0 && glo >= 0.2 && ghi <= 5.0;
  return {ok, fmt("log-Holder ratios [%.3f, %.3f], iterated-log ratios [%.3f, %.3f]", lo, hi, glo, ghi)};
}

Outcome kam_end_to_end() {
  const auto H = hamiltonian_hh(1e-4, 10.0, kGolden, 2.0);
  KamConfig cfg;
  cfg.N = 64;
  cfg.nu_max = 5;
  cfg.tau = 2.0;
  KamResult res;
  try {
    res = run_kam(H, kGolden, cfg);
  } catch (const KamAbort& e) {
    return {false, std::string("aborted: ") + e.what()};
  }
  const auto& recs = res.trace.records;
  // Post-step frequency residuals below this level are at the double-precision floor of the grid.
  const double roundoff_floor = 1e-12;
  bool contraction = recs.size() == 6;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const double prev = recs[i - 1].eta_defect, cur = recs[i].eta_defect;
    contraction = contraction && (cur <= prev / 4.0 || cur <= roundoff_floor);
  }
  double sym = 0.0;
  for (const auto& r : recs) sym = std::max(sym, r.symplecticity);
  const InvarianceResidual inv = invariance_residual(H, res.torus, kGolden);
  const auto& t = res.trace;
  struct Bound {
    double KamRecord::*value;
    double KamRecord::*shape;
    double c;
  };
  const Bound bounds[] = {{&KamRecord::step_displacement, &KamRecord::shape_displacement, t.c_displacement},
                          {&KamRecord::step_jacobian, &KamRecord::shape_jacobian, t.c_jacobian},
                          {&KamRecord::hessian_drift, &KamRecord::shape_drift, t.c_drift},
                          {&KamRecord::gradient_U, &KamRecord::shape_gradient, t.c_gradient},
                          {&KamRecord::increment_u, &KamRecord::shape_increment_u, t.c_increment_u},
                          {&KamRecord::increment_v, &KamRecord::shape_increment_v, t.c_increment_v}};
  bool shapes = true;
  for (const auto& b : bounds) {
    shapes = shapes && std::isfinite(b.c);
    for (const auto& r : recs) shapes = shapes && r.*(b.value) <= b.c * (r.*(b.shape)) * (1.0 + 1e-12);
  }
  const bool summable = std::isfinite(t.summability_integral) && t.summability_sum <= t.summability_constant *
                                                                     t.summability_integral * (1.0 + 1e-12);
  const bool ok = contraction && inv.res_u <= 1e-6 && inv.res_v <= 1e-6 && sym <= 1e-8 && shapes && summable;
  std::ostringstream os;
  os << "eta defects";
  for (const auto& r : recs) os << fmt(" %.2e", r.eta_defect);
  os << fmt("; invariance %.2e / %.2e; symplecticity %.2e", inv.res_u, inv.res_v, sym);
  os << fmt("; c_disp %.3g c_jac %.3g c_drift %.3g c_grad %.3g", t.c_displacement, t.c_jacobian, t.c_drift,
            t.c_gradient);
  os << fmt(" c_du %.3g c_dv %.3g", t.c_increment_u, t.c_increment_v);
  return {ok, os.str()};
}

Outcome witnesses() {
  const auto s = qn_sequence(0.3, 1.5, 8);
  bool ok = true;
  std::ostringstream os;
  for (int m = 1; m <= 3; ++m) {
    const auto w = nowhere_holder_witness(s, 0.37, m, 0.5);
    ok = ok && w.ratio >= w.lower_bound && w.bracket >= 0.5L && w.bracket <= 1.0L;
    os << fmt("m=%g ratio %.4g >= bound %.4g, bracket %.3g; ", m, static_cast<double>(w.ratio),
              static_cast<double>(w.lower_bound), static_cast<double>(w.bracket));
  }
  return {ok, os.str()};
}

Outcome log_holder_bound() {
  const auto s = qn_sequence(0.3, 1.5, 8);
  std::vector<double> hs, xs;
  for (int j = 5; j <= 30; ++j) hs.push_back(std::ldexp(1.0, -j));
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) xs.push_back(u(rng));
  const auto c = log_holder_bound_check(s, hs, xs);
  const bool ok = c.fitted_C <= 10.0 && std::isfinite(c.fitted_C_prime) && c.split_index_valid;
  return {ok, fmt("C = %.4g, C' = %.4g", c.fitted_C, c.fitted_C_prime)};
}

Outcome corner_consistency() {
  const double lambda = 2.0;
  double worst = 0.0;
  for (int i = 0; i <= 60; ++i) {
    const double r = std::pow(10.0, -3.0 + 3.0 * i / 60.0), h = 1e-2 * r;
    auto p5 = [&](double t) { return corner_potential_extended(t, lambda, 5); };
    const double fd = (-p5(r + 2 * h) + 8 * p5(r + h) - 8 * p5(r - h) + p5(r - 2 * h)) / (12 * h);
    worst = std::max(worst, std::abs(fd / corner_weight(r, lambda) - 1.0));
  }
  std::vector<double> samples;
  const double spacing = std::ldexp(1.0, -30);
  for (int i = -4096; i <= 4096; ++i) samples.push_back(corner_potential(i * spacing, lambda, 6));
  std::vector<double> scales;
  for (int j = 0; j <= 11; ++j) scales.push_back(std::ldexp(1.0, -30 + j));
  const auto rep = empirical_modulus(samples, spacing, scales);
  const bool ok = worst <= 1e-4 && std::abs(rep.log_exponent - lambda) <= 0.3;
  return {ok, fmt("finite-difference rel error %.3g, log exponent %.4f", worst, rep.log_exponent)};
}

Outcome lemma_ratios() {
  double lo = 1e300, hi = 0.0;
  for (double X : {1e6, 1e8, 1e10, 1e12}) {
    for (double v : {iterated_log_integral_ratio(1, 2.0, 100.0, X), iterated_log_integral_ratio(2, 2.0, 100.0, X),
                     power_log_integral_ratio(0.5, 2.0, 100.0, X), power_log_tail_ratio(0.5, 2.0, X)}) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo >= 1.0 / 3.0 && hi <= 3.0, fmt("ratios in [%.4f, %.4f]", lo, hi)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "kernel moment identities", 10.0, kernel_moments},
      {2, "plateau exactness", 1.0, plateau},
      {3, "Jackson scaling", 30.0, jackson},
      {4, "homological solver", 5.0, homological},
      {5, "Diophantine margin", 60.0, diophantine},
      {6, "Dini golden values", 60.0, dini},
      {7, "critical exponents", 60.0, critical},
      {8, "remaining-modulus asymptotics", 60.0, remaining},
      {9, "end-to-end KAM on the corner-potential system", 300.0, kam_end_to_end},
      {10, "nowhere-Holder witnesses", 30.0, witnesses},
      {11, "log-Holder upper bound", 30.0, log_holder_bound},
      {12, "corner potential consistency", 60.0, corner_consistency},
      {13, "asymptotic integral ratios", 10.0, lemma_ratios},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool within = secs <= c.budget_s;
    const bool pass = o.pass && within;
    if (!pass) ++failures;
    std::printf("%s criterion %2d: %s | %s | %.2f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, within ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
