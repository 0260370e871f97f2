#include <cmath>

#include "doctest.h"
#include "kamforge/diophantine.hpp"
#include "kamforge/hypotheses.hpp"
#include "kamforge/systems.hpp"

using namespace kamforge;

namespace {
const std::vector<double> kOmega = {1.0, 1.6180339887498949};
}

TEST_CASE("corner-potential system passes every check") {
  const auto H = hamiltonian_hh(1e-4, 10.0, kOmega, 2.0);
  const HypothesisReport r = check_hypotheses(H, standard_frequency("golden2").omega);
  CHECK(r.all_pass());
  REQUIRE(r.verdicts.size() == 5);
  CHECK(r.get("H1").value("integral") == doctest::Approx(1.4426950408889634).epsilon(1e-6));
  CHECK(r.get("H2").value("inverse_norm") == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(r.get("H2").value("sup_jet") <= 10.0);
  CHECK(r.get("H3").value("margin") == 1.0);
  CHECK(r.get("H4").value("lhs") <= r.get("H4").value("rhs"));
  CHECK(r.get("H5").value("k1_star") == 1.0);
  CHECK(r.get("H5").value("k2_star") == 3.0);
}

TEST_CASE("resonant frequency fails the Diophantine check with its lattice vector") {
  HypothesisOptions o;
  const auto v = check_diophantine({1.0L, 1.0L}, o);
  CHECK_FALSE(v.pass);
  CHECK(v.argmin == std::vector<long>{1, -1});
}

TEST_CASE("a borderline log modulus fails Dini integrability") {
  auto H = hamiltonian_hh(1e-4, 10.0, kOmega, 2.0);
  H.modulus = ModulusSpec::log_holder(1.0);
  const auto v = check_dini(H, 2.0);
  CHECK_FALSE(v.pass);
  CHECK(v.summary.find("divergent") != std::string::npos);
  CHECK_FALSE(check_criticality(H, 2.0).pass);
}

TEST_CASE("a large perturbation breaks the bounds") {
  const auto H = hamiltonian_hh(50.0, 10.0, kOmega, 2.0);
  HypothesisOptions o;
  CHECK_FALSE(check_boundedness(H, o).pass);
  CHECK_FALSE(check_smallness(H, kOmega, o).pass);
}

TEST_CASE("oscillatory system passes every check") {
  const auto s = qn_sequence(0.3, 1.5, 8);
  MatrixField A;
  const auto H = hamiltonian_hhh(1e-4, s, A, kOmega, 10.0);
  CHECK(check_hypotheses(H, standard_frequency("golden2").omega).all_pass());
}
