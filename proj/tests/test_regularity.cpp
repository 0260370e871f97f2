#include <cmath>
#include <string>

#include "doctest.h"
#include "kamforge/errors.hpp"
#include "kamforge/regularity.hpp"
#include "kamforge/systems.hpp"

using namespace kamforge;

TEST_CASE("critical exponents") {
  CHECK(critical_exponent({ModulusSpec::holder(0.5), 2.0}).k_star == 2);
  for (const auto& w : {ModulusSpec::holder(0.5), ModulusSpec::log_holder(2.0), ModulusSpec::gen_log_holder(2, 2.0)}) {
    CHECK(critical_exponent(PhiProfile::from_hypothesis(w, 6, 2.0, 1)).k_star == 1);
    CHECK(critical_exponent(PhiProfile::from_hypothesis(w, 6, 2.0, 2)).k_star == 3);
  }
  const auto both = critical_exponent(PhiProfile::from_hypothesis(ModulusSpec::log_holder(2.0), 6, 2.0, 2));
  REQUIRE(both.probes.size() == 5);
  CHECK(both.probes[3].finite);
  CHECK_FALSE(both.probes[4].finite);
  CHECK_THROWS_AS(critical_exponent({ModulusSpec::holder(0.5), -1.0}), DomainError);
  CHECK(critical_exponent({ModulusSpec::holder(0.5), 30.0}, 5).unbounded);
}

TEST_CASE("remaining modulus for a pure power matches the closed-form balance") {
  // Reference rows from tests/oracles/oracles.py (phi = t^2.5, k* = 2, eps = 0.1).
  const PhiProfile phi{ModulusSpec::holder(0.5), 2.0};
  const auto rm = remaining_modulus(phi, 2, 0.1, {1e-10, 1e-6, 1e-3});
  REQUIRE(rm.rows.size() == 3);
  const double L[3] = {9.999683777233944e-11, 9.9684271838698697e-7, 0.0009048750780274961};
  const double v[3] = {1.9999683774733984e-5, 0.0019968402223382691, 0.060162283135781877};
  for (int i = 0; i < 3; ++i) {
    CHECK(rm.rows[i].L == doctest::Approx(L[i]).epsilon(1e-6));
    CHECK(rm.rows[i].value == doctest::Approx(v[i]).epsilon(1e-6));
  }
  REQUIRE(rm.family_tag.rfind("holder:", 0) == 0);
  CHECK(std::stod(rm.family_tag.substr(7)) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("remaining modulus for log moduli stays in the target bracket") {
  const auto grid = geometric_grid(1e-10, 1e-3, 8);
  const auto lh = remaining_modulus(PhiProfile::from_hypothesis(ModulusSpec::log_holder(2.0), 6, 2.0, 1), 1, 0.1, grid);
  double prev = 0.0;
  for (const auto& r : lh.rows) {
    const double ratio = r.value * std::log(1.0 / r.gamma);
    CHECK(ratio >= 0.2);
    CHECK(ratio <= 5.0);
    CHECK(r.value >= prev);
    CHECK(r.L < r.gamma);
    CHECK(r.outer / r.inner <= 2.0);
    CHECK(r.inner / r.outer <= 2.0);
    prev = r.value;
  }
  const auto glh =
      remaining_modulus(PhiProfile::from_hypothesis(ModulusSpec::gen_log_holder(2, 2.0), 6, 2.0, 1), 1, 0.05, grid);
  for (const auto& r : glh.rows) {
    const double ratio = r.value * std::log(std::log(1.0 / r.gamma));
    CHECK(ratio >= 0.2);
    CHECK(ratio <= 5.0);
  }
  CHECK(lh.interpolate(0.0) == 0.0);
  CHECK(lh.interpolate(1.0) == lh.rows.back().value);
  CHECK_THROWS_AS(remaining_modulus(PhiProfile::from_hypothesis(ModulusSpec::log_holder(2.0), 6, 2.0, 1), 1, 0.1, {0.2}),
                  DomainError);
}

TEST_CASE("empirical modulus of reference functions") {
  std::vector<double> root, affine;
  for (int i = 0; i <= 100000; ++i) {
    root.push_back(std::sqrt(i * 1e-5));
    affine.push_back(3.0 * i * 1e-5 + 1.0);
  }
  const auto r = empirical_modulus(root, 1e-5, geometric_grid(1e-5, 1e-1, 5));
  CHECK(r.holder_exponent == doctest::Approx(0.5).epsilon(0.1));
  const auto a = empirical_modulus(affine, 1e-5, geometric_grid(1e-5, 1e-1, 5));
  CHECK(a.holder_exponent == doctest::Approx(1.0).epsilon(1e-6));
  for (const auto& row : a.rows) CHECK(row.modulus == doctest::Approx(3.0 * row.h).epsilon(1e-6));
  CHECK_THROWS_AS(empirical_modulus(root, 1e-5, {1e-6}), DomainError);
}

TEST_CASE("log exponent of the corner potential sixth derivative") {
  std::vector<double> s;
  const double sp = std::ldexp(1.0, -30);
  for (int i = -4096; i <= 4096; ++i) s.push_back(corner_potential(i * sp, 2.0, 6));
  std::vector<double> sc;
  for (int j = 0; j <= 11; ++j) sc.push_back(std::ldexp(1.0, -30 + j));
  CHECK(empirical_modulus(s, sp, sc).log_exponent == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("iterate regularity check") {
  const PhiProfile phi = PhiProfile::from_hypothesis(ModulusSpec::log_holder(2.0), 6, 2.0, 1);
  std::vector<std::pair<double, double>> exact, spike;
  for (int nu = 0; nu < 6; ++nu) {
    const double r = std::ldexp(1.0 / 16.0, -nu);
    exact.push_back({r, phi.eval(r)});
    spike.push_back({r, (nu == 3 ? 1e3 : 1.0) * phi.eval(r)});
  }
  const auto ok = iterate_regularity_check(exact, phi);
  CHECK(ok.pass);
  CHECK(ok.fitted_constant == doctest::Approx(1.0));
  const auto bad = iterate_regularity_check(spike, phi);
  CHECK_FALSE(bad.pass);
  CHECK(bad.failed_index == 3);
}

TEST_CASE("asymptotic lemma ratios") {
  // References from tests/oracles/oracles.py (M = 100, lambda = 2, sigma = 0.5).
  CHECK(iterated_log_integral_ratio(1, 2.0, 100.0, 1e6) == doctest::Approx(1.1903931243336484).epsilon(1e-8));
  CHECK(iterated_log_integral_ratio(2, 2.0, 100.0, 1e12) == doctest::Approx(1.0646650198213312).epsilon(1e-8));
  CHECK(power_log_integral_ratio(0.5, 2.0, 100.0, 1e6) == doctest::Approx(2.9605754940281311).epsilon(1e-8));
  CHECK(power_log_tail_ratio(0.5, 2.0, 1e12) == doctest::Approx(1.7597976547830743).epsilon(1e-8));
  CHECK_THROWS_AS(power_log_tail_ratio(1.5, 2.0, 1e6), DomainError);
}
