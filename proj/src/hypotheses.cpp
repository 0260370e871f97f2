#include "kamforge/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kamforge/diophantine.hpp"
#include "kamforge/errors.hpp"
#include "kamforge/parallel.hpp"
#include "kamforge/regularity.hpp"

namespace kamforge {
namespace {

void multi_indices(int dims, int max_order, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == dims) {
    out.push_back(current);
    return;
  }
  int used = 0;
  for (int v : current) used += v;
  for (int a = 0; used + a <= max_order; ++a) {
    current.push_back(a);
    multi_indices(dims, max_order, current, out);
    current.pop_back();
  }
}

struct DerivativeSamples {
  int order = 0;
  std::vector<double> samples;
};

std::vector<DerivativeSamples> all_derivatives(const PeriodicField& f, int max_order) {
  std::vector<std::vector<int>> alphas;
  std::vector<int> cur;
  multi_indices(f.dims(), max_order, cur, alphas);
  std::vector<DerivativeSamples> out;
  for (const auto& alpha : alphas) {
    PeriodicField g = f;
    int order = 0;
    for (int d = 0; d < f.dims(); ++d) {
      if (alpha[d] > 0) g = g.derivative(d, alpha[d]);
      order += alpha[d];
    }
    out.push_back({order, g.samples()});
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double HypothesisVerdict::value(const std::string& key) const {
  for (const auto& [k, v] : measured) {
    if (k == key) return v;
  }
  throw DomainError("verdict " + id + " has no measurement '" + key + "'");
}

bool HypothesisReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const HypothesisVerdict& v) { return v.pass; });
}

const HypothesisVerdict& HypothesisReport::get(const std::string& id) const {
  for (const auto& v : verdicts) {
    if (v.id == id) return v;
  }
  throw DomainError("no verdict " + id);
}

HypothesisVerdict check_dini(const HamiltonianModel& H, double tau) {
  HypothesisVerdict v;
  v.id = "H1";
  v.measured = {{"k", static_cast<double>(H.k)}, {"tau", tau}, {"power", 2.0 * tau + 3.0 - H.k}};
  if (H.k < 2.0 * tau + 2.0) {
    v.summary = "k < 2 tau + 2";
    return v;
  }
  try {
    const DiniResult d = dini_integral(H.modulus, H.k, tau);
    v.pass = d.finite;
    v.measured.push_back({"integral", d.value});
    v.summary = d.finite ? "finite (" + d.signature + "), value " + fmt(d.value) : "divergent (" + d.signature + ")";
  } catch (const IndeterminateError& e) {
    v.summary = std::string("indeterminate: ") + e.what();
  }
  return v;
}

HypothesisVerdict check_boundedness(const HamiltonianModel& H, const HypothesisOptions& options) {
  HypothesisVerdict v;
  v.id = "H2";
  const int n = H.n;
  double inverse_norm = 0.0;
  bool singular = false;
  try {
    H.mean_hessian_inverse(options.grid, &inverse_norm);
  } catch (const NondegeneracyError&) {
    singular = true;
    inverse_norm = std::numeric_limits<double>::infinity();
  }
  // Grid over x times action samples; sup of every entry of the 2-jet.
  const int ys = std::max(2, options.action_samples);
  std::size_t xcount = 1, ycount = 1;
  for (int d = 0; d < n; ++d) {
    xcount *= options.bound_grid;
    ycount *= ys;
  }
  std::vector<double> slot(xcount, 0.0);
  parallel_for(xcount, [&](std::size_t ix) {
    std::vector<double> x(n), y(n);
    std::size_t rem = ix;
    for (int d = n - 1; d >= 0; --d) {
      x[d] = static_cast<double>(rem % options.bound_grid) / options.bound_grid;
      rem /= options.bound_grid;
    }
    double local = 0.0;
    for (std::size_t iy = 0; iy < ycount; ++iy) {
      std::size_t r2 = iy;
      for (int d = n - 1; d >= 0; --d) {
        y[d] = H.rho * (-1.0 + 2.0 * static_cast<double>(r2 % ys) / (ys - 1));
        r2 /= ys;
      }
      const HamiltonianJet J = H.jet(x.data(), y.data());
      local = std::max({local, std::abs(J.value), J.hx.cwiseAbs().maxCoeff(), J.hy.cwiseAbs().maxCoeff(),
                        J.hxx.cwiseAbs().maxCoeff(), J.hxy.cwiseAbs().maxCoeff(), J.hyy.cwiseAbs().maxCoeff()});
    }
    slot[ix] = local;
  });
  const double sup_jet = *std::max_element(slot.begin(), slot.end());
  v.measured = {{"inverse_norm", inverse_norm}, {"sup_jet", sup_jet}, {"M", H.M}};
  v.pass = !singular && inverse_norm <= H.M && sup_jet <= H.M;
  v.summary = singular ? "mean twist is singular"
                       : "|mean H_yy^-1| = " + fmt(inverse_norm) + ", sampled 2-jet sup = " + fmt(sup_jet) +
                             ", M = " + fmt(H.M);
  return v;
}

HypothesisVerdict check_diophantine(const std::vector<long double>& omega, const HypothesisOptions& options) {
  HypothesisVerdict v;
  v.id = "H3";
  const MarginResult m = diophantine_margin(omega, options.tau, options.lattice_cutoff);
  v.argmin = m.argmin;
  v.pass = !m.resonant();
  v.measured = {{"margin", static_cast<double>(m.margin)},
                {"tau", options.tau},
                {"cutoff", static_cast<double>(options.lattice_cutoff)}};
  std::ostringstream os;
  os << (v.pass ? "margin " : "resonant, margin ") << fmt(static_cast<double>(m.margin)) << " at k = (";
  for (std::size_t i = 0; i < m.argmin.size(); ++i) os << (i ? ", " : "") << m.argmin[i];
  os << ")";
  v.summary = os.str();
  return v;
}

HypothesisVerdict check_smallness(const HamiltonianModel& H, const std::vector<double>& omega,
                                  const HypothesisOptions& options) {
  HypothesisVerdict v;
  v.id = "H4";
  if (static_cast<int>(omega.size()) != H.n) throw DomainError("frequency dimension mismatch");
  const PeriodicField energy = H.energy_field(options.grid);
  const auto energy_derivs = all_derivatives(energy.plus_constant(-energy.mean()), H.k);
  const auto freq = H.frequency_field(options.grid);
  std::vector<std::vector<DerivativeSamples>> freq_derivs;
  for (int a = 0; a < H.n; ++a) freq_derivs.push_back(all_derivatives(freq[a].plus_constant(-omega[a]), H.k - 1));
  const std::size_t G = energy.size();

  auto lhs = [&](double eps) {
    double worst = 0.0;
    for (std::size_t i = 0; i < G; ++i) {
      double s = 0.0;
      for (const auto& d : energy_derivs) s += std::abs(d.samples[i]) * std::pow(eps, d.order);
      for (std::size_t m = 0; m < freq_derivs[0].size(); ++m) {
        double comp = 0.0;
        for (int a = 0; a < H.n; ++a) comp = std::max(comp, std::abs(freq_derivs[a][m].samples[i]));
        s += comp * std::pow(eps, freq_derivs[0][m].order + options.tau + 1.0);
      }
      worst = std::max(worst, s);
    }
    return worst;
  };
  const double top = std::min(H.modulus.delta, 1.0);
  const auto grid = geometric_grid(options.smallness_floor, top, std::max(2, options.smallness_steps));
  double best_ratio = std::numeric_limits<double>::infinity();
  double best_eps = top, best_lhs = 0.0, best_rhs = 0.0;
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    const double eps = *it;
    const double l = lhs(eps);
    const double r = H.M * std::pow(eps, H.k) * eval_modulus(H.modulus, eps);
    const double ratio = r > 0.0 ? l / r : std::numeric_limits<double>::infinity();
    if (l <= r) {
      v.pass = true;
      best_eps = eps;
      best_lhs = l;
      best_rhs = r;
      break;
    }
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best_eps = eps;
      best_lhs = l;
      best_rhs = r;
    }
  }
  v.measured = {{"epsilon", best_eps}, {"lhs", best_lhs}, {"rhs", best_rhs}};
  v.summary = (v.pass ? "holds at eps = " : "fails; closest at eps = ") + fmt(best_eps) + " (" + fmt(best_lhs) +
              " vs " + fmt(best_rhs) + ")";
  return v;
}

HypothesisVerdict check_criticality(const HamiltonianModel& H, double tau) {
  HypothesisVerdict v;
  v.id = "H5";
  v.pass = true;
  std::ostringstream os;
  for (int i = 1; i <= 2; ++i) {
    const PhiProfile phi = PhiProfile::from_hypothesis(H.modulus, H.k, tau, i);
    try {
      const CriticalExponent c = critical_exponent(phi);
      v.measured.push_back({"k" + std::to_string(i) + "_star", static_cast<double>(c.k_star)});
      const bool ok = !c.unbounded && c.k_star >= 1;
      v.pass = v.pass && ok;
      os << (i > 1 ? ", " : "") << "k" << i << "* = " << c.k_star << (c.unbounded ? " (unbounded)" : "");
    } catch (const Error& e) {
      v.pass = false;
      os << (i > 1 ? ", " : "") << "k" << i << "*: " << e.what();
    }
  }
  v.summary = os.str();
  return v;
}

HypothesisReport check_hypotheses(const HamiltonianModel& H, const std::vector<long double>& omega,
                                  const HypothesisOptions& options) {
  std::vector<double> om(omega.begin(), omega.end());
  HypothesisReport r;
  r.verdicts.push_back(check_dini(H, options.tau));
  r.verdicts.push_back(check_boundedness(H, options));
  r.verdicts.push_back(check_diophantine(omega, options));
  r.verdicts.push_back(check_smallness(H, om, options));
  r.verdicts.push_back(check_criticality(H, options.tau));
  return r;
}

}  // namespace kamforge
