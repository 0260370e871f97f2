#include <cmath>

#include "doctest.h"
#include "kamforge/diophantine.hpp"
#include "kamforge/errors.hpp"

using namespace kamforge;

// Reference margins come from the exhaustive scans in tests/oracles/oracles.py.

TEST_CASE("golden pair margins") {
  const auto w = standard_frequency("golden2").omega;
  const MarginResult m1 = diophantine_margin(w, 1.0, 10000);
  CHECK(static_cast<double>(m1.margin) == 1.0);
  CHECK(m1.argmin == std::vector<long>{1, 0});
  const MarginResult q = diophantine_margin(w, 0.25, 100);
  CHECK(static_cast<double>(q.margin) == doctest::Approx(0.040407198342042667).epsilon(1e-13));
  CHECK(q.argmin == std::vector<long>{55, -34});
  CHECK(diophantine_margin(w, 2.0, 10000).margin >= m1.margin);
}

TEST_CASE("three-dimensional cubic vector") {
  const auto f = standard_frequency("cubic3");
  REQUIRE(f.dim() == 3);
  CHECK(static_cast<double>(f.omega[1]) == doctest::Approx(1.3247179572447460).epsilon(1e-15));
  const MarginResult m = diophantine_margin(f.omega, 0.5, 40);
  CHECK(static_cast<double>(m.margin) == doctest::Approx(0.010489900245604385).epsilon(1e-12));
  CHECK(m.argmin == std::vector<long>{15, -10, -1});
}

TEST_CASE("sqrt 2 pair") {
  const auto w = standard_frequency("sqrt2_2").omega;
  CHECK(static_cast<double>(w[1]) == doctest::Approx(std::sqrt(2.0)));
  const double a = estimate_alpha_star(w, 2.0, 1000);
  CHECK(a == 1.0);
}

TEST_CASE("exact resonances give a zero margin") {
  const MarginResult r = diophantine_margin({1.0L, 0.5L}, 2.0, 3);
  CHECK(r.resonant());
  CHECK(r.argmin == std::vector<long>{1, -2});
  CHECK(diophantine_margin({1.0L, 1.0L}, 2.0, 100).argmin == std::vector<long>{1, -1});
  CHECK(estimate_alpha_star({1.0L, 0.5L}, 1.0, 10) == 0.0);
}

TEST_CASE("margin is nonincreasing in the cutoff") {
  const auto w = standard_frequency("golden2").omega;
  long double prev = diophantine_margin(w, 0.25, 5).margin;
  for (long K : {10L, 50L, 100L, 500L}) {
    const long double m = diophantine_margin(w, 0.25, K).margin;
    CHECK(m <= prev);
    prev = m;
  }
  CHECK(estimate_alpha_star(w, 2.0, 10000) <= estimate_alpha_star(w, 2.0, 100));
}

TEST_CASE("compensated pairing") {
  const auto w = standard_frequency("golden2").omega;
  const long double p = lattice_pairing({-6765, 4181}, w);
  CHECK(std::abs(static_cast<double>(p) - (-6765.0 + 4181.0 * 1.6180339887498949)) < 1e-9);
  CHECK_THROWS(standard_frequency("silver"));
}
