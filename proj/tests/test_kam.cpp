#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "kamforge/errors.hpp"
#include "kamforge/kam.hpp"
#include "kamforge/systems.hpp"

using namespace kamforge;

namespace {

const std::vector<double> kOmega = {1.0, 1.6180339887498949};

HamiltonianModel normalized_cosine(double eps) {
  HamiltonianModel H;
  H.n = 2;
  for (int i = 0; i < 2; ++i) {
    H.add({kOmega[i], std::nullopt, {YPart::Kind::linear, i, i, nullptr}});
    H.add({0.5, std::nullopt, {YPart::Kind::quadratic, i, i, nullptr}});
  }
  if (eps != 0.0) H.add({eps, SparseTrig::cosine(2, 0, 1.0), {YPart::Kind::constant, 0, 0, nullptr}});
  return H;
}

KamConfig small_config() {
  KamConfig c;
  c.N = 32;
  c.nu_max = 1;
  return c;
}

struct StepOutcome {
  StepResult step;
  double post_eta = 0.0;
};

StepOutcome one_step(double eps) {
  const auto H = normalized_cosine(eps);
  const auto cfg = small_config();
  const TorusState s = TorusState::identity(2, cfg.N);
  const PullbackData d = pull_back(H, s);
  StepOutcome out{kam_step(H, s, d, kOmega, cfg, cfg.radius(0)), 0.0};
  out.post_eta = frequency_residual(pull_back(H, out.step.state), kOmega).eta_defect;
  return out;
}

}  // namespace

TEST_CASE("configuration validation") {
  KamConfig c;
  CHECK_NOTHROW(c.validate());
  c.epsilon = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = KamConfig{};
  c.N = 48;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = KamConfig{};
  c.theta = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(KamConfig{}.radius(3) == doctest::Approx(1.0 / 128.0));
}

TEST_CASE("an already normalized Hamiltonian is a fixed point") {
  const auto H = normalized_cosine(0.0);
  const TorusState s = TorusState::identity(2, 16);
  const PullbackData d = pull_back(H, s);
  const FrequencyResidual f = frequency_residual(d, kOmega);
  CHECK(f.xi_defect == 0.0);
  CHECK(f.eta_defect < 1e-15);
  KamConfig cfg;
  cfg.N = 16;
  const StepResult r = kam_step(H, s, d, kOmega, cfg, cfg.radius(0));
  CHECK(r.transform.U.sup_norm() < 1e-15);
  CHECK(r.diagnostics.displacement < 1e-15);
  const InvarianceResidual inv = invariance_residual(H, r.state, kOmega);
  CHECK(inv.res_u < 1e-12);
  CHECK(inv.res_v < 1e-12);
}

TEST_CASE("one step on a cosine perturbation") {
  const double eps = 1e-3;
  const StepOutcome a = one_step(eps);
  const auto U = PeriodicField::from_function(
      2, 32, [&](const double* x) { return -eps * std::sin(2 * M_PI * x[0]) / (2 * M_PI); });
  CHECK((a.step.transform.U - U).sup_norm() < 1e-12 * eps + 1e-18);
  CHECK(a.step.transform.symplecticity_residual(100, 1) <= 1e-8);
  CHECK(periodicity_defect(a.step.state) <= 1e-10);
  // Quadratic contraction: halving eps divides the post-step frequency residual by about four.
  const StepOutcome b = one_step(eps / 2.0);
  const double ratio = a.post_eta / b.post_eta;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
  CHECK(a.post_eta < 10.0 * eps * eps);
}

TEST_CASE("smallness precondition carries the measured triple") {
  const auto H = normalized_cosine(0.5);
  KamConfig cfg = small_config();
  cfg.delta_star_cap = 1e-6;
  const TorusState s = TorusState::identity(2, cfg.N);
  try {
    kam_step(H, s, pull_back(H, s), kOmega, cfg, cfg.radius(0));
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(std::max({e.energy_defect, e.frequency_defect, e.twist_defect}) > 1e-6);
  }
}

TEST_CASE("unperturbed run keeps the identity embedding") {
  const auto H = hamiltonian_hh(0.0, 10.0, kOmega, 2.0);
  KamConfig cfg = small_config();
  const KamResult r = run_kam(H, kOmega, cfg);
  CHECK(r.trace.records.size() == 1);
  CHECK(r.trace.converged);
  for (const auto& f : r.torus.displacement) CHECK(f.sup_norm() <= 1e-12);
  for (const auto& f : r.torus.action) CHECK(f.sup_norm() <= 1e-12);
  const InvarianceResidual inv = invariance_residual(H, r.torus, kOmega);
  CHECK(inv.res_u <= 1e-12);
  CHECK(inv.res_v <= 1e-12);
}

TEST_CASE("short corner-potential run") {
  const auto H = hamiltonian_hh(1e-4, 10.0, kOmega, 2.0);
  KamConfig cfg = small_config();
  cfg.nu_max = 2;
  const KamResult r = run_kam(H, kOmega, cfg);
  REQUIRE(r.trace.records.size() == 3);
  CHECK(r.trace.records[1].eta_defect < r.trace.records[0].eta_defect);
  for (const auto& rec : r.trace.records) CHECK(rec.symplecticity <= 1e-8);
  const InvarianceResidual inv = invariance_residual(H, r.torus, kOmega);
  CHECK(inv.res_u <= 1e-6);
  CHECK(inv.res_v <= 1e-6);
  // A deliberately displaced embedding raises the residual in proportion.
  TorusState bumped = r.torus;
  bumped.action[0] = bumped.action[0] + PeriodicField::from_function(2, cfg.N, [](const double* x) {
                       return 1e-5 * std::cos(2 * M_PI * x[1]);
                     });
  const InvarianceResidual worse = invariance_residual(H, bumped, kOmega);
  CHECK(worse.res_u > 1e-6);
  CHECK(worse.res_u < 1e-4);
}

TEST_CASE("a failing step aborts with the partial trace") {
  const auto H = hamiltonian_hh(1e-4, 10.0, kOmega, 2.0);
  KamConfig cfg = small_config();
  cfg.nu_max = 2;
  cfg.delta_star_cap = 1e-30;
  try {
    run_kam(H, kOmega, cfg);
    FAIL("expected an abort");
  } catch (const KamAbort& e) {
    CHECK(e.trace.stop_reason.rfind("aborted", 0) == 0);
    CHECK(e.trace.records.empty());
  }
}
