#include "kamforge/kam.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kamforge/errors.hpp"
#include "kamforge/homological.hpp"
#include "kamforge/parallel.hpp"

namespace kamforge {
namespace {

std::size_t grid_size(int n, int N) {
  std::size_t g = 1;
  for (int d = 0; d < n; ++d) g *= static_cast<std::size_t>(N);
  return g;
}

std::vector<double> grid_points(int n, int N) {
  const std::size_t G = grid_size(n, N);
  std::vector<double> pts(G * n);
  for (std::size_t i = 0; i < G; ++i) {
    std::size_t rem = i;
    for (int d = n - 1; d >= 0; --d) {
      pts[i * n + d] = static_cast<double>(rem % N) / N;
      rem /= N;
    }
  }
  return pts;
}

// [a][b] = d field_a / d x_b
std::vector<std::vector<PeriodicField>> jacobian_fields(const std::vector<PeriodicField>& f) {
  std::vector<std::vector<PeriodicField>> out(f.size());
  for (std::size_t a = 0; a < f.size(); ++a) {
    for (int b = 0; b < f[a].dims(); ++b) out[a].push_back(f[a].derivative(b));
  }
  return out;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Eigen::MatrixXd step_jacobian(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  const Eigen::MatrixXd P = A.inverse();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topLeftCorner(n, n) = P;
  J.bottomLeftCorner(n, n) = B * P;
  J.bottomRightCorner(n, n) = A.transpose();
  return J;
}

Eigen::MatrixXd symplectic_form(int n) {
  Eigen::MatrixXd O = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  O.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  O.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return O;
}

// Solves xi + shift(xi) = x for xi at every target point by fixed-point iteration.
std::vector<double> invert_shift(const std::vector<PeriodicField>& shift, const std::vector<double>& targets,
                                 double sign, int max_iterations, int* iterations_used) {
  const int n = static_cast<int>(shift.size());
  std::vector<const PeriodicField*> ptrs;
  for (const auto& f : shift) ptrs.push_back(&f);
  std::vector<double> x = targets;
  for (int it = 1; it <= max_iterations; ++it) {
    const auto s = evaluate_fields(ptrs, x);
    double change = 0.0;
    for (std::size_t p = 0; p < targets.size() / n; ++p) {
      for (int d = 0; d < n; ++d) {
        const double next = targets[p * n + d] + sign * s[d][p];
        change = std::max(change, std::abs(next - x[p * n + d]));
        x[p * n + d] = next;
      }
    }
    if (change <= 4e-16) {
      if (iterations_used) *iterations_used = it;
      return x;
    }
  }
  throw ContractionError("fixed-point inversion did not converge within the iteration cap");
}

double modulus_at(const ModulusSpec& w, double r) { return eval_modulus(w, std::min(r, w.delta)); }

}  // namespace

void KamConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("kam.epsilon must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("kam.theta must lie in (0, 1)");
  if (nu_max < 0) throw ConfigError("kam.nu_max must be nonnegative");
  if (N < 8 || (N & (N - 1)) != 0) throw ConfigError("kam.grid must be a power of two >= 8");
  if (!(tau > 0.0)) throw ConfigError("kam.tau must be positive");
  if (!(increment_tol >= 0.0)) throw ConfigError("kam.increment_tol must be nonnegative");
  if (symplectic_samples < 1) throw ConfigError("kam.symplectic_samples must be positive");
}

TorusState TorusState::identity(int n, int N) {
  TorusState s;
  s.n = n;
  s.N = N;
  for (int d = 0; d < n; ++d) {
    s.displacement.push_back(PeriodicField::constant(n, N, 0.0));
    s.action.push_back(PeriodicField::constant(n, N, 0.0));
  }
  return s;
}

std::vector<std::vector<double>> TorusState::u_samples() const {
  const auto pts = grid_points(n, N);
  std::vector<std::vector<double>> out(n);
  for (int a = 0; a < n; ++a) {
    out[a] = displacement[a].samples();
    for (std::size_t i = 0; i < out[a].size(); ++i) out[a][i] += pts[i * n + a];
  }
  return out;
}

PullbackData pull_back(const HamiltonianModel& H, const TorusState& state) {
  const int n = state.n, N = state.N;
  if (H.n != n) throw DomainError("Hamiltonian and torus differ in dimension");
  const std::size_t G = grid_size(n, N);
  const auto u = state.u_samples();
  const auto du = jacobian_fields(state.displacement);
  const auto dv = jacobian_fields(state.action);
  std::vector<double> energy(G);
  std::vector<std::vector<double>> kxi(n, std::vector<double>(G)), keta(n, std::vector<double>(G));
  PullbackData out;
  out.k_etaeta.resize(G);
  for (std::size_t i = 0; i < G; ++i) {
    for (int a = 0; a < n; ++a) {
      if (!(std::abs(state.action[a].samples()[i]) <= H.rho)) {
        throw RangeEscapeError("torus action left the domain |y| <= rho");
      }
    }
  }
  parallel_for(G, [&](std::size_t i) {
    std::vector<double> x(n), y(n);
    Eigen::MatrixXd U = Eigen::MatrixXd::Identity(n, n), V(n, n);
    for (int a = 0; a < n; ++a) {
      x[a] = u[a][i];
      y[a] = state.action[a].samples()[i];
      for (int b = 0; b < n; ++b) {
        U(a, b) += du[a][b].samples()[i];
        V(a, b) = dv[a][b].samples()[i];
      }
    }
    const HamiltonianJet J = H.jet(x.data(), y.data());
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(U);
    const Eigen::VectorXd ke = lu.solve(J.hy);
    const Eigen::VectorXd kx = U.transpose() * J.hx + V.transpose() * J.hy;
    const Eigen::MatrixXd Uinv = lu.inverse();
    energy[i] = J.value;
    for (int a = 0; a < n; ++a) {
      kxi[a][i] = kx(a);
      keta[a][i] = ke(a);
    }
    out.k_etaeta[i] = Uinv * J.hyy * Uinv.transpose();
  });
  out.energy = PeriodicField::from_samples(n, N, std::move(energy));
  for (int a = 0; a < n; ++a) {
    out.k_xi.push_back(PeriodicField::from_samples(n, N, std::move(kxi[a])));
    out.k_eta.push_back(PeriodicField::from_samples(n, N, std::move(keta[a])));
  }
  return out;
}

FrequencyResidual frequency_residual(const PullbackData& data, const std::vector<double>& omega) {
  FrequencyResidual r;
  for (std::size_t a = 0; a < data.k_xi.size(); ++a) {
    r.xi_defect = std::max(r.xi_defect, data.k_xi[a].sup_norm());
    for (double v : data.k_eta[a].samples()) r.eta_defect = std::max(r.eta_defect, std::abs(v - omega[a]));
  }
  return r;
}

namespace {

// Jacobians at (x_p, eta_p) for all points, derived fields built once.
std::vector<Eigen::MatrixXd> transform_jacobians(const SymplecticStepTransform& T, const std::vector<double>& x,
                                                 const std::vector<double>& eta) {
  const int n = static_cast<int>(T.W.size());
  std::vector<PeriodicField> fields;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) fields.push_back(T.W[a].derivative(b));
  }
  for (int a = 0; a < n; ++a) {
    const PeriodicField Ua = T.U.derivative(a);
    for (int b = 0; b < n; ++b) fields.push_back(Ua.derivative(b));
  }
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < n; ++a) {
      const PeriodicField Wia = T.W[i].derivative(a);
      for (int b = 0; b < n; ++b) fields.push_back(Wia.derivative(b));
    }
  }
  std::vector<const PeriodicField*> ptrs;
  for (const auto& f : fields) ptrs.push_back(&f);
  const auto v = evaluate_fields(ptrs, x);
  const std::size_t P = x.size() / n;
  std::vector<Eigen::MatrixXd> out(P);
  for (std::size_t p = 0; p < P; ++p) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n), B(n, n);
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) A(a, b) += v[idx++][p];
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) B(a, b) = v[idx++][p];
    }
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) B(a, b) += eta[p * n + i] * v[idx++][p];
      }
    }
    out[p] = step_jacobian(A, B);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd SymplecticStepTransform::jacobian(const double* x, const double* eta) const {
  const int n = static_cast<int>(W.size());
  return transform_jacobians(*this, std::vector<double>(x, x + n), std::vector<double>(eta, eta + n))[0];
}

double SymplecticStepTransform::symplecticity_residual(int samples, unsigned long long seed) const {
  const int n = static_cast<int>(W.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ue(-radius, radius);
  std::vector<double> x(samples * n), eta(samples * n);
  for (int s = 0; s < samples; ++s) {
    for (int d = 0; d < n; ++d) {
      x[s * n + d] = ux(rng);
      eta[s * n + d] = ue(rng);
    }
  }
  const Eigen::MatrixXd O = symplectic_form(n);
  double worst = 0.0;
  for (const auto& J : transform_jacobians(*this, x, eta)) {
    worst = std::max(worst, (J.transpose() * O * J - O).cwiseAbs().maxCoeff());
  }
  return worst;
}

StepResult kam_step(const HamiltonianModel& H, const TorusState& state, const PullbackData& data,
                    const std::vector<double>& omega, const KamConfig& config, double radius,
                    const std::vector<Eigen::MatrixXd>* reference_twist) {
  const int n = state.n, N = state.N;
  const std::size_t G = grid_size(n, N);
  if (static_cast<int>(omega.size()) != n) throw DomainError("frequency dimension mismatch");
  StepResult res;
  StepDiagnostics& diag = res.diagnostics;

  const double hbar = data.energy.mean();
  const PeriodicField h = data.energy.plus_constant(-hbar);
  std::vector<std::vector<double>> f(n, std::vector<double>(G));
  double fsup = 0.0;
  for (int a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < G; ++i) {
      f[a][i] = data.k_eta[a].samples()[i] - omega[a];
      fsup = std::max(fsup, std::abs(f[a][i]));
    }
  }
  diag.energy_defect = h.sup_norm() / std::pow(radius, 2.0 * config.tau + 2.0);
  diag.frequency_defect = fsup / std::pow(radius, config.tau + 1.0);
  if (reference_twist) {
    double drift = 0.0;
    for (std::size_t i = 0; i < G; ++i) {
      drift = std::max(drift, (data.k_etaeta[i] - (*reference_twist)[i]).cwiseAbs().maxCoeff());
    }
    diag.twist_defect = 2.0 * H.M * drift;
  }
  if (config.delta_star_cap &&
      std::max({diag.energy_defect, diag.frequency_defect, diag.twist_defect}) > *config.delta_star_cap) {
    throw PreconditionError("step smallness inputs exceed the configured cap", diag.energy_defect,
                            diag.frequency_defect, diag.twist_defect);
  }

  // (a) D U = -(h - mean h)
  const HomologicalSolution su = solve_homological(h.scaled(-1.0), omega, 1e-12 * std::max(1.0, h.sup_norm()));
  diag.min_divisor = su.active_modes ? su.min_divisor : 0.0;
  const PeriodicField& U = su.u;
  std::vector<PeriodicField> gradU;
  for (int a = 0; a < n; ++a) gradU.push_back(U.derivative(a));

  // g = f + Q grad U, mean correction through the nondegeneracy inverse.
  std::vector<std::vector<double>> g(n, std::vector<double>(G));
  Eigen::MatrixXd Qbar = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd gbar = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < G; ++i) {
    const Eigen::MatrixXd& Q = data.k_etaeta[i];
    Qbar += Q;
    for (int a = 0; a < n; ++a) {
      double v = f[a][i];
      for (int b = 0; b < n; ++b) v += Q(a, b) * gradU[b].samples()[i];
      g[a][i] = v;
      gbar(a) += v;
    }
  }
  Qbar /= static_cast<double>(G);
  gbar /= static_cast<double>(G);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(Qbar);
  if (!lu.isInvertible()) {
    throw NondegeneracyError("mean twist is singular", std::numeric_limits<double>::infinity());
  }
  const Eigen::MatrixXd Qinv = lu.inverse();
  diag.inverse_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(Qinv).singularValues()(0);
  if (diag.inverse_norm > H.M) throw NondegeneracyError("mean twist inverse exceeds M", diag.inverse_norm);
  const Eigen::VectorXd lambda = -Qinv * gbar;

  // (b) D W = -(g + Q lambda)
  std::vector<PeriodicField> W;
  for (int a = 0; a < n; ++a) {
    std::vector<double> rhs(G);
    double scale = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < G; ++i) {
      double v = g[a][i];
      for (int b = 0; b < n; ++b) v += data.k_etaeta[i](a, b) * lambda(b);
      rhs[i] = -v;
      mean += rhs[i];
      scale = std::max(scale, std::abs(g[a][i]) + std::abs(v - g[a][i]));
    }
    mean /= static_cast<double>(G);
    if (std::abs(mean) > 1e-9 * std::max(scale, 1e-300)) {
      throw SolvabilityError("shift equation right-hand side has a nonzero mean", mean);
    }
    for (double& v : rhs) v -= mean;
    const auto sw = solve_homological(PeriodicField::from_samples(n, N, std::move(rhs)), omega,
                                      std::numeric_limits<double>::max());
    if (sw.active_modes) diag.min_divisor = diag.min_divisor > 0.0 ? std::min(diag.min_divisor, sw.min_divisor) : sw.min_divisor;
    W.push_back(sw.u);
  }

  const auto DW = jacobian_fields(W);
  std::vector<std::vector<PeriodicField>> HU(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) HU[a].push_back(gradU[a].derivative(b));
  }
  // Contraction guard and step diagnostics on the x-grid.
  for (std::size_t i = 0; i < G; ++i) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n), B(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        A(a, b) += DW[a][b].samples()[i];
        B(a, b) = HU[a][b].samples()[i];
      }
    }
    const double shift_norm = (A - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().rowwise().sum().maxCoeff();
    if (shift_norm > 1.0 - config.theta) {
      throw ContractionError("shift Jacobian exceeds the contraction guard 1 - theta");
    }
    const Eigen::MatrixXd J = step_jacobian(A, B);
    diag.jacobian_defect =
        std::max(diag.jacobian_defect, (J - Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff());
    for (int a = 0; a < n; ++a) {
      diag.displacement = std::max({diag.displacement, std::abs(W[a].samples()[i]),
                                    std::abs(gradU[a].samples()[i] + lambda(a))});
      diag.gradient_U = std::max(diag.gradient_U, std::abs(gradU[a].samples()[i]));
    }
  }

  // x = u~(xi) solves x + W(x) = xi.
  const auto xi = grid_points(n, N);
  const auto x = invert_shift(W, xi, -1.0, 50, &diag.inversion_iterations);

  const auto dU = jacobian_fields(state.displacement);
  std::vector<const PeriodicField*> ptrs;
  for (int a = 0; a < n; ++a) ptrs.push_back(&state.displacement[a]);
  for (int a = 0; a < n; ++a) ptrs.push_back(&state.action[a]);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) ptrs.push_back(&dU[a][b]);
  }
  for (int a = 0; a < n; ++a) ptrs.push_back(&gradU[a]);
  const auto vals = evaluate_fields(ptrs, x);

  std::vector<std::vector<double>> disp(n, std::vector<double>(G)), act(n, std::vector<double>(G));
  for (std::size_t i = 0; i < G; ++i) {
    Eigen::MatrixXd ux = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd vt(n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) ux(a, b) += vals[2 * n + a * n + b][i];
      vt(a) = vals[2 * n + n * n + a][i] + lambda(a);
    }
    const Eigen::VectorXd lifted = ux.transpose().partialPivLu().solve(vt);
    for (int a = 0; a < n; ++a) {
      disp[a][i] = x[i * n + a] - xi[i * n + a] + vals[a][i];
      act[a][i] = vals[n + a][i] + lifted(a);
      if (!(std::abs(act[a][i]) <= H.rho)) throw RangeEscapeError("composed torus left the domain |y| <= rho");
    }
  }
  res.state.n = n;
  res.state.N = N;
  for (int a = 0; a < n; ++a) {
    res.state.displacement.push_back(PeriodicField::from_samples(n, N, std::move(disp[a])));
    res.state.action.push_back(PeriodicField::from_samples(n, N, std::move(act[a])));
  }
  res.transform.U = U;
  res.transform.W = std::move(W);
  res.transform.lambda = lambda;
  res.transform.radius = radius;
  res.transform.inner_radius = config.theta * radius;
  return res;
}

std::vector<std::vector<double>> graph_on_grid(const TorusState& state) {
  const int n = state.n;
  const auto pts = grid_points(n, state.N);
  const auto xi = invert_shift(state.displacement, pts, -1.0, 60, nullptr);
  std::vector<const PeriodicField*> ptrs;
  for (const auto& v : state.action) ptrs.push_back(&v);
  return evaluate_fields(ptrs, xi);
}

double periodicity_defect(const TorusState& state, int samples, unsigned long long seed) {
  const int n = state.n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::vector<double> base(samples * n);
  for (auto& v : base) v = ux(rng);
  std::vector<const PeriodicField*> ptrs;
  for (const auto& f : state.displacement) ptrs.push_back(&f);
  for (const auto& f : state.action) ptrs.push_back(&f);
  const auto v0 = evaluate_fields(ptrs, base);
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    std::vector<double> shifted = base;
    for (int s = 0; s < samples; ++s) shifted[s * n + j] += 1.0;
    const auto v1 = evaluate_fields(ptrs, shifted);
    for (std::size_t f = 0; f < ptrs.size(); ++f) {
      for (int s = 0; s < samples; ++s) worst = std::max(worst, std::abs(v1[f][s] - v0[f][s]));
    }
  }
  return worst;
}

InvarianceResidual invariance_residual(const HamiltonianModel& H, const TorusState& state,
                                       const std::vector<double>& omega) {
  const int n = state.n;
  const std::size_t G = grid_size(n, state.N);
  const auto u = state.u_samples();
  std::vector<std::vector<double>> Du(n), Dv(n);
  for (int a = 0; a < n; ++a) {
    Du[a] = frequency_derivative(state.displacement[a], omega).samples();
    for (double& v : Du[a]) v += omega[a];
    Dv[a] = frequency_derivative(state.action[a], omega).samples();
  }
  std::vector<double> ru(G), rv(G);
  parallel_for(G, [&](std::size_t i) {
    std::vector<double> x(n), y(n);
    for (int a = 0; a < n; ++a) {
      x[a] = u[a][i];
      y[a] = state.action[a].samples()[i];
    }
    const HamiltonianJet J = H.jet(x.data(), y.data());
    double wu = 0.0, wv = 0.0;
    for (int a = 0; a < n; ++a) {
      wu = std::max(wu, std::abs(Du[a][i] - J.hy(a)));
      wv = std::max(wv, std::abs(Dv[a][i] + J.hx(a)));
    }
    ru[i] = wu;
    rv[i] = wv;
  });
  return {sup_abs(ru), sup_abs(rv)};
}

void KamTrace::fit_constants() {
  auto fit = [&](double KamRecord::*value, double KamRecord::*shape) {
    double c = 0.0;
    for (const auto& r : records) {
      if (r.*shape > 0.0) c = std::max(c, r.*value / (r.*shape));
    }
    return c;
  };
  c_displacement = fit(&KamRecord::step_displacement, &KamRecord::shape_displacement);
  c_jacobian = fit(&KamRecord::step_jacobian, &KamRecord::shape_jacobian);
  c_drift = fit(&KamRecord::hessian_drift, &KamRecord::shape_drift);
  c_gradient = fit(&KamRecord::gradient_U, &KamRecord::shape_gradient);
  c_increment_u = fit(&KamRecord::increment_u, &KamRecord::shape_increment_u);
  c_increment_v = fit(&KamRecord::increment_v, &KamRecord::shape_increment_v);
  c_frequency = fit(&KamRecord::eta_defect, &KamRecord::shape_frequency);
  summability_sum = 0.0;
  for (const auto& r : records) summability_sum += r.step_jacobian;
  summability_constant = summability_integral > 0.0 ? summability_sum / summability_integral : 0.0;
}

KamResult run_kam(const HamiltonianModel& H, const std::vector<double>& omega, const KamConfig& config) {
  config.validate();
  if (static_cast<int>(omega.size()) != H.n) throw ConfigError("frequency dimension does not match the Hamiltonian");
  const double k = H.k, tau = config.tau;
  KamResult result;
  KamTrace& trace = result.trace;
  {
    const auto dini = power_weighted_integral(H.modulus, 2.0 * tau + 3.0 - k, 2.0 * config.epsilon);
    trace.summability_integral = dini.finite ? dini.value : std::numeric_limits<double>::infinity();
  }
  TorusState state = TorusState::identity(H.n, config.N);
  std::vector<std::vector<double>> graph = graph_on_grid(state);
  std::vector<Eigen::MatrixXd> twist;
  try {
    for (int nu = 0; nu <= config.nu_max; ++nu) {
      const double r = config.radius(nu);
      const HamiltonianModel Hnu = build_approximant(H, r, config.approximant);
      const PullbackData pre = pull_back(Hnu, state);
      const FrequencyResidual fpre = frequency_residual(pre, omega);
      const StepResult step = kam_step(Hnu, state, pre, omega, config, r, nu > 0 ? &twist : nullptr);
      const PullbackData post = pull_back(Hnu, step.state);
      const FrequencyResidual fpost = frequency_residual(post, omega);

      KamRecord rec;
      rec.nu = nu;
      rec.r = r;
      rec.pre_eta_defect = fpre.eta_defect;
      rec.pre_xi_defect = fpre.xi_defect;
      rec.step_displacement = step.diagnostics.displacement;
      rec.step_jacobian = step.diagnostics.jacobian_defect;
      rec.gradient_U = step.diagnostics.gradient_U;
      for (std::size_t i = 0; i < post.k_etaeta.size(); ++i) {
        rec.hessian_drift = std::max(rec.hessian_drift, (post.k_etaeta[i] - pre.k_etaeta[i]).cwiseAbs().maxCoeff());
      }
      rec.eta_defect = fpost.eta_defect;
      rec.xi_defect = fpost.xi_defect;
      rec.energy_defect = post.energy.plus_constant(-post.energy.mean()).sup_norm();
      for (int a = 0; a < H.n; ++a) {
        rec.increment_u = std::max(rec.increment_u, (step.state.displacement[a] - state.displacement[a]).sup_norm());
      }
      auto next_graph = graph_on_grid(step.state);
      for (int a = 0; a < H.n; ++a) {
        for (std::size_t i = 0; i < graph[a].size(); ++i) {
          rec.increment_v = std::max(rec.increment_v, std::abs(next_graph[a][i] - graph[a][i]));
        }
      }
      rec.symplecticity = step.transform.symplecticity_residual(config.symplectic_samples, config.seed + nu);
      rec.delta_star = std::max(step.diagnostics.energy_defect, step.diagnostics.frequency_defect);
      rec.inverse_norm = step.diagnostics.inverse_norm;
      rec.min_divisor = step.diagnostics.min_divisor;
      const double w = modulus_at(H.modulus, r);
      rec.shape_displacement = (1.0 - config.theta) * std::pow(r, k - 2 * tau - 1) * w;
      rec.shape_jacobian = std::pow(r, k - 2 * tau - 2) * w;
      rec.shape_drift = rec.shape_jacobian / (2.0 * H.M);
      rec.shape_gradient = std::pow(r, k - tau - 1) * w;
      rec.shape_increment_u = std::pow(r, k - 2 * tau - 1) * w;
      rec.shape_increment_v = std::pow(r, k - tau - 1) * w;
      rec.shape_frequency = std::pow(r, k - 1) * w;
      trace.records.push_back(rec);

      state = step.state;
      graph = std::move(next_graph);
      twist = post.k_etaeta;
      if (rec.increment_u <= config.increment_tol && rec.increment_v <= config.increment_tol) {
        trace.converged = true;
        trace.stop_reason = "increments below tolerance";
        break;
      }
    }
  } catch (const Error& e) {
    trace.stop_reason = std::string("aborted: ") + e.what();
    trace.fit_constants();
    throw KamAbort(e.what(), trace);
  }
  if (!trace.converged) trace.stop_reason = "iteration limit reached";
  trace.fit_constants();
  result.torus = std::move(state);
  return result;
}

}  // namespace kamforge
