#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kamforge/hamiltonian.hpp"

namespace kamforge {

struct HypothesisVerdict {
  std::string id;  // "H1" .. "H5"
  bool pass = false;
  std::string summary;
  std::vector<std::pair<std::string, double>> measured;
  std::vector<long> argmin;  // H3 only: minimizing lattice vector

  double value(const std::string& key) const;  // DomainError when absent
};

struct HypothesisOptions {
  double tau = 2.0;
  long lattice_cutoff = 100;     // |k|_1 bound of the H3 scan
  int grid = 32;                 // x-grid per axis for H4 and the mean twist
  int bound_grid = 16;           // x-grid per axis for the sampled 2-jet bound
  int action_samples = 5;        // y-samples per axis in [-rho, rho] for the 2-jet bound
  double smallness_floor = 1e-8; // smallest strip scale tried by H4
  int smallness_steps = 60;      // geometric steps from delta down to the floor
};

struct HypothesisReport {
  std::vector<HypothesisVerdict> verdicts;
  bool all_pass() const;
  const HypothesisVerdict& get(const std::string& id) const;
};

// Dini integrability of w(x) / x^(2 tau + 3 - k).
HypothesisVerdict check_dini(const HamiltonianModel& H, double tau);
// Mean twist inverse <= M and sampled |d^a H| <= M for |a| <= 2 on the grid times the action samples.
HypothesisVerdict check_boundedness(const HamiltonianModel& H, const HypothesisOptions& options);
// Positive truncated lattice margin.
HypothesisVerdict check_diophantine(const std::vector<long double>& omega, const HypothesisOptions& options);
// Two-sum smallness display against M eps^k w(eps), searching eps geometrically downward from delta.
HypothesisVerdict check_smallness(const HamiltonianModel& H, const std::vector<double>& omega,
                                  const HypothesisOptions& options);
// Critical exponents k_1*, k_2* >= 1 exist.
HypothesisVerdict check_criticality(const HamiltonianModel& H, double tau);

HypothesisReport check_hypotheses(const HamiltonianModel& H, const std::vector<long double>& omega,
                                  const HypothesisOptions& options = {});

}  // namespace kamforge
