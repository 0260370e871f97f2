#include <cmath>

#include "doctest.h"
#include "kamforge/errors.hpp"
#include "kamforge/modulus.hpp"

using namespace kamforge;

TEST_CASE("closed-form values of the built-in families") {
  CHECK(eval_modulus(ModulusSpec::holder(0.5), 0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_modulus(ModulusSpec::log_holder(2.0), std::exp(-10.0)) == doctest::Approx(0.01).epsilon(1e-14));
  // Reference: 1 / (e^4 4^1.5) from tests/oracles/oracles.py.
  const double x = std::exp(-std::exp(4.0));
  CHECK(eval_modulus(ModulusSpec::gen_log_holder(2, 1.5), x) ==
        doctest::Approx(0.0022894548610917725).epsilon(1e-12));
  CHECK(eval_modulus(ModulusSpec::lipschitz(), 0.3) == doctest::Approx(0.3));
  CHECK(eval_modulus(ModulusSpec::power_log(0.5, 1.0), 0.01) ==
        doctest::Approx(0.1 / std::log(100.0)).epsilon(1e-14));
  const auto tab = ModulusSpec::tabulated({{0.1, 0.2}, {0.5, 0.4}, {1.0, 0.5}});
  CHECK(eval_modulus(tab, 0.3) == doctest::Approx(0.3));
  CHECK(eval_modulus(tab, 0.05) == doctest::Approx(0.1));
}

TEST_CASE("log-space evaluation agrees with direct evaluation and survives underflow") {
  const auto w = ModulusSpec::gen_log_holder(2, 1.5);
  CHECK(log_eval_modulus(w, 30.0) == doctest::Approx(std::log(eval_modulus(w, std::exp(-30.0)))).epsilon(1e-12));
  const double far = log_eval_modulus(ModulusSpec::log_holder(2.0), 1e6);
  CHECK(far == doctest::Approx(-2.0 * std::log(1e6)).epsilon(1e-14));
}

TEST_CASE("evaluation outside the domain is rejected") {
  CHECK_THROWS_AS(eval_modulus(ModulusSpec::log_holder(2.0), 0.7), DomainError);
  CHECK_THROWS_AS(eval_modulus(ModulusSpec::holder(0.5), 0.0), DomainError);
  CHECK_THROWS_AS(ModulusSpec::holder(1.5).validate(), ConfigError);
  CHECK_THROWS_AS(parse_family("cubic"), ConfigError);
}

TEST_CASE("family names round trip") {
  for (auto f : {ModulusFamily::holder, ModulusFamily::log_holder, ModulusFamily::gen_log_holder,
                 ModulusFamily::lipschitz, ModulusFamily::power_log, ModulusFamily::tabulated}) {
    CHECK(parse_family(family_name(f)) == f);
  }
}

TEST_CASE("monotone on ascending grids for every family") {
  const std::vector<ModulusSpec> specs = {ModulusSpec::holder(0.3), ModulusSpec::log_holder(1.5),
                                          ModulusSpec::gen_log_holder(3, 2.0), ModulusSpec::lipschitz(),
                                          ModulusSpec::power_log(0.4, 2.0)};
  for (const auto& s : specs) {
    double prev = 0.0;
    for (int j = 80; j >= 0; --j) {
      const double v = eval_modulus(s, s.delta * std::ldexp(1.0, -j));
      CHECK(v >= prev);
      prev = v;
    }
    const InvariantReport r = check_invariants(s);
    CHECK(r.monotone);
    CHECK(r.vanishing);
    CHECK(std::isfinite(r.limsup_x_over_w));
  }
}

TEST_CASE("comparison verdicts along the inclusion chain") {
  auto run = [](const ModulusSpec& a, const ModulusSpec& b) {
    return compare_moduli(a, b, dyadic_scale_grid(std::min(a.delta, b.delta), 60)).verdict;
  };
  CHECK(run(ModulusSpec::log_holder(2.0), ModulusSpec::holder(0.5)) == Verdict::strictly_weaker);
  CHECK(run(ModulusSpec::holder(0.3), ModulusSpec::holder(0.3)) == Verdict::weaker);
  CHECK(run(ModulusSpec::gen_log_holder(2, 2.0), ModulusSpec::log_holder(2.0)) == Verdict::strictly_weaker);
  CHECK(run(ModulusSpec::holder(0.5), ModulusSpec::log_holder(2.0)) == Verdict::not_weaker);
  CHECK_THROWS_AS(compare_moduli(ModulusSpec::holder(0.5), ModulusSpec::holder(0.5), {1.0, 2.0, 3.0}), ConfigError);
}

TEST_CASE("semi-separability profiles") {
  std::vector<double> xs;
  for (int j = 0; j <= 20; ++j) xs.push_back(std::ldexp(1.0, j));
  const auto h = semi_separability_profile(ModulusSpec::holder(0.5), xs);
  REQUIRE(h.points.size() == xs.size());
  for (const auto& p : h.points) CHECK(p.psi == doctest::Approx(std::sqrt(p.x)).epsilon(1e-12));
  CHECK(h.linear_bound);
  const auto lip = semi_separability_profile(ModulusSpec::lipschitz(), xs);
  for (const auto& p : lip.points) CHECK(p.psi <= p.x * (1.0 + 1e-12));
  CHECK(lip.linear_bound);
  CHECK(semi_separability_profile(ModulusSpec::log_holder(2.0), xs).linear_bound);
}

TEST_CASE("weak homogeneity ratios") {
  for (double a : {0.25, 0.5, 0.75}) {
    CHECK(weak_homogeneity_ratio(ModulusSpec::holder(0.5), a) == doctest::Approx(std::pow(a, -0.5)).epsilon(1e-12));
    const double lh = weak_homogeneity_ratio(ModulusSpec::log_holder(2.0), a);
    CHECK(lh >= 1.0);
    CHECK(lh < 1.2);
  }
  const auto convex = ModulusSpec::tabulated({{0.1, 0.01}, {0.5, 0.1}, {1.0, 0.4}});
  CHECK(weak_homogeneity_ratio(convex, 0.5) <= 2.0 + 1e-12);
}

TEST_CASE("Dini integrals against antiderivatives") {
  const auto h = dini_integral(ModulusSpec::holder(0.5), 6, 2.0);
  CHECK(h.finite);
  CHECK(h.value == doctest::Approx(2.0).epsilon(1e-8));
  const auto lip = dini_integral(ModulusSpec::lipschitz(), 7, 2.0);
  CHECK(lip.finite);
  CHECK(lip.value == doctest::Approx(0.5).epsilon(1e-8));
  // Reference: 1 / ln 2 from tests/oracles/oracles.py.
  const auto lh = dini_integral(ModulusSpec::log_holder(2.0), 6, 2.0);
  CHECK(lh.finite);
  CHECK(lh.value == doctest::Approx(1.4426950408889634).epsilon(1e-6));
  CHECK_FALSE(dini_integral(ModulusSpec::log_holder(1.0), 6, 2.0).finite);
  // E1(ln 2 / 2) from tests/oracles/oracles.py.
  const auto pl = dini_integral(ModulusSpec::power_log(0.5, 1.0), 6, 2.0);
  CHECK(pl.finite);
  CHECK(pl.value == doctest::Approx(0.801160049816731).epsilon(1e-6));
}
