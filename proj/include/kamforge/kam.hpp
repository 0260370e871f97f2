#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "kamforge/errors.hpp"
#include "kamforge/hamiltonian.hpp"
#include "kamforge/periodic_field.hpp"

namespace kamforge {

struct KamConfig {
  double epsilon = 1.0 / 16.0;  // strip scale: r_nu = 2^-nu epsilon
  double theta = 1.0 / std::sqrt(2.0);
  int nu_max = 5;
  int N = 64;
  double tau = 2.0;
  double increment_tol = 0.0;  // stop once both increments are <= this
  std::optional<double> delta_star_cap;
  unsigned long long seed = 1;
  int symplectic_samples = 100;
  ApproximantOptions approximant{};

  void validate() const;
  double radius(int nu) const { return std::ldexp(epsilon, -nu); }
};

// Embedding xi -> (u(xi), v(xi)) with u(xi) = xi + displacement(xi); all components period-1.
struct TorusState {
  int n = 0;
  int N = 0;
  std::vector<PeriodicField> displacement;
  std::vector<PeriodicField> action;

  static TorusState identity(int n, int N);
  // Grid samples of u and v, [component][grid index].
  std::vector<std::vector<double>> u_samples() const;
};

// K(xi, 0), K_xi(xi, 0), K_eta(xi, 0) and K_etaeta(xi, 0) of the pulled-back Hamiltonian
// K(xi, eta) = H(u(xi), v(xi) + u_xi(xi)^-T eta), on the grid.
struct PullbackData {
  PeriodicField energy;
  std::vector<PeriodicField> k_xi;
  std::vector<PeriodicField> k_eta;
  std::vector<Eigen::MatrixXd> k_etaeta;  // per grid point
};

PullbackData pull_back(const HamiltonianModel& H, const TorusState& state);

struct FrequencyResidual {
  double xi_defect = 0.0;   // sup |K_xi(xi, 0)|
  double eta_defect = 0.0;  // sup |K_eta(xi, 0) - omega|
};
FrequencyResidual frequency_residual(const PullbackData& data, const std::vector<double>& omega);

// Generating function S(x, eta) = <x, eta> + U(x) + <W(x), eta> + <lambda, x> of one step.
struct SymplecticStepTransform {
  PeriodicField U;
  std::vector<PeriodicField> W;
  Eigen::VectorXd lambda;
  double radius = 0.0;
  double inner_radius = 0.0;  // theta * radius

  // Jacobian of (xi, eta) -> (x, y) at the point parametrized by (x, eta).
  Eigen::MatrixXd jacobian(const double* x, const double* eta) const;
  // max |J^T Omega J - Omega| over seeded random points with |eta| <= radius.
  double symplecticity_residual(int samples, unsigned long long seed) const;
};

struct StepDiagnostics {
  double energy_defect = 0.0;     // sup |h - mean h| / r^(2 tau + 2)
  double frequency_defect = 0.0;  // sup |K_eta - omega| / r^(tau + 1)
  double twist_defect = 0.0;      // 2 M sup |K_etaeta - Q|
  double min_divisor = 0.0;
  double inverse_norm = 0.0;      // |mean(K_etaeta)^-1|
  double displacement = 0.0;      // sup |psi - id| at eta = 0
  double jacobian_defect = 0.0;   // sup |psi_zeta - I| at eta = 0
  double gradient_U = 0.0;        // sup |U_x|
  int inversion_iterations = 0;
};

struct StepResult {
  SymplecticStepTransform transform;
  TorusState state;
  StepDiagnostics diagnostics;
};

// One Newton step on the pulled-back data; composes the new transform with the current embedding.
StepResult kam_step(const HamiltonianModel& H, const TorusState& state, const PullbackData& data,
                    const std::vector<double>& omega, const KamConfig& config, double radius,
                    const std::vector<Eigen::MatrixXd>* reference_twist = nullptr);

struct KamRecord {
  int nu = 0;
  double r = 0.0;
  double pre_eta_defect = 0.0;
  double pre_xi_defect = 0.0;
  double step_displacement = 0.0;
  double step_jacobian = 0.0;
  double hessian_drift = 0.0;
  double gradient_U = 0.0;
  double eta_defect = 0.0;         // after the step
  double xi_defect = 0.0;
  double energy_defect = 0.0;      // sup |K(xi, 0) - mean| after the step
  double increment_u = 0.0;
  double increment_v = 0.0;
  double symplecticity = 0.0;
  double delta_star = 0.0;
  double inverse_norm = 0.0;
  double min_divisor = 0.0;
  double shape_displacement = 0.0, shape_jacobian = 0.0, shape_drift = 0.0, shape_gradient = 0.0;
  double shape_increment_u = 0.0, shape_increment_v = 0.0, shape_frequency = 0.0;
};

struct KamTrace {
  std::vector<KamRecord> records;
  double c_displacement = 0.0, c_jacobian = 0.0, c_drift = 0.0, c_gradient = 0.0, c_increment_u = 0.0, c_increment_v = 0.0, c_frequency = 0.0;
  double summability_sum = 0.0;       // sum of step_jacobian
  double summability_integral = 0.0;  // integral over (0, 2 epsilon] of w(x) / x^(2 tau + 3 - k)
  double summability_constant = 0.0;
  bool converged = false;
  std::string stop_reason;

  void fit_constants();
};

struct KamResult {
  TorusState torus;
  KamTrace trace;
};

// A failed step inside run_kam; carries the records completed before the failure.
struct KamAbort : Error {
  KamAbort(const std::string& what, KamTrace trace) : Error(what), trace(std::move(trace)) {}
  KamTrace trace;
};

// Newton steps for nu = 0..nu_max. On a step error the partial trace is attached to KamAbort.
KamResult run_kam(const HamiltonianModel& H, const std::vector<double>& omega, const KamConfig& config);

struct InvarianceResidual {
  double res_u = 0.0;  // sup |D u - H_y(u, v)|
  double res_v = 0.0;  // sup |D v + H_x(u, v)|
};
InvarianceResidual invariance_residual(const HamiltonianModel& H, const TorusState& state,
                                       const std::vector<double>& omega);

// v o u^-1 sampled on the x-grid.
std::vector<std::vector<double>> graph_on_grid(const TorusState& state);

// max over axes of |f(xi + e_j) - f(xi)| for every displacement and action component, at seeded points.
double periodicity_defect(const TorusState& state, int samples = 32, unsigned long long seed = 3);

}  // namespace kamforge
