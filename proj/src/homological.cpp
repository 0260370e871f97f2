#include "kamforge/homological.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kamforge/errors.hpp"

namespace kamforge {
namespace {

constexpr double kResonanceFloor = 1e-13;
constexpr double kActiveFloor = 1e-14;

void require_dimension(const PeriodicField& f, const std::vector<double>& omega) {
  if (static_cast<int>(omega.size()) != f.dims()) {
    throw DomainError("frequency dimension does not match the field");
  }
}

}  // namespace

PeriodicField frequency_derivative(const PeriodicField& f, const std::vector<double>& omega) {
  require_dimension(f, omega);
  const int dims = f.dims();
  const int half = f.resolution() / 2;
  return f.map_spectrum([&](const int* k, cplx c) {
    double pairing = 0.0;
    for (int d = 0; d < dims; ++d) {
      if (k[d] == -half) return cplx(0.0, 0.0);
      pairing += k[d] * omega[d];
    }
    return c * cplx(0.0, 2.0 * M_PI * pairing);
  });
}

HomologicalSolution solve_homological(const PeriodicField& g, const std::vector<double>& omega, double tolerance) {
  require_dimension(g, omega);
  const double g_sup = g.sup_norm();
  if (tolerance < 0.0) tolerance = 1e-12 * g_sup;
  if (std::abs(g.mean()) > tolerance) {
    throw SolvabilityError("homological equation needs a mean-zero right-hand side", g.mean());
  }
  const int dims = g.dims();
  const auto& spec = g.spectrum();
  std::vector<cplx> out(spec.size(), cplx(0.0, 0.0));
  HomologicalSolution sol;
  sol.min_divisor = std::numeric_limits<double>::infinity();
  double largest = 0.0;
  for (std::size_t i = 1; i < spec.size(); ++i) largest = std::max(largest, std::abs(spec[i]));
  const double floor = kActiveFloor * largest;
  int k[8];
  for (std::size_t i = 1; i < spec.size(); ++i) {
    if (!(std::abs(spec[i]) > floor) || g.is_nyquist(i)) continue;
    g.mode(i, k);
    double pairing = 0.0;
    for (int d = 0; d < dims; ++d) pairing += k[d] * omega[d];
    if (std::abs(pairing) < kResonanceFloor) {
      throw ResonanceError("resonant mode in homological equation", std::vector<int>(k, k + dims), pairing);
    }
    out[i] = spec[i] / cplx(0.0, 2.0 * M_PI * pairing);
    ++sol.active_modes;
    sol.min_divisor = std::min(sol.min_divisor, std::abs(pairing));
    sol.mode_amplification = std::max(sol.mode_amplification, 1.0 / (2.0 * M_PI * std::abs(pairing)));
  }
  if (sol.active_modes == 0) sol.min_divisor = 0.0;
  sol.u = PeriodicField::from_spectrum(dims, g.resolution(), std::move(out));
  sol.amplification = g_sup > 0.0 ? sol.u.sup_norm() / g_sup : 0.0;
  const PeriodicField check = frequency_derivative(sol.u, omega) - g.plus_constant(-g.mean());
  sol.residual = check.sup_norm();
  return sol;
}

HomologicalSolution solve_homological(const PeriodicField& g, const FrequencyVector& omega, double tolerance) {
  return solve_homological(g, omega.as_double(), tolerance);
}

double small_divisor_amplification(double tau, double alpha_star, double mode_cutoff) {
  if (!(alpha_star > 0.0)) throw DomainError("alpha_star must be positive");
  return std::pow(mode_cutoff, tau) / alpha_star;
}

}  // namespace kamforge
