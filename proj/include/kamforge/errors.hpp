#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kamforge {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Quadrature that neither converged nor showed a clean divergence signature.
struct IndeterminateError : Error {
  IndeterminateError(const std::string& what, std::vector<double> panel_starts,
                     std::vector<double> panel_sums)
      : Error(what), panel_starts(std::move(panel_starts)), panel_sums(std::move(panel_sums)) {}
  std::vector<double> panel_starts;
  std::vector<double> panel_sums;
};

struct ResolutionError : Error {
  using Error::Error;
};

struct ResonanceError : Error {
  ResonanceError(const std::string& what, std::vector<int> mode, double divisor)
      : Error(what), mode(std::move(mode)), divisor(divisor) {}
  std::vector<int> mode;
  double divisor;
};

struct SolvabilityError : Error {
  SolvabilityError(const std::string& what, double mean) : Error(what), mean(mean) {}
  double mean;
};

struct PreconditionError : Error {
  PreconditionError(const std::string& what, double energy_defect, double frequency_defect,
                    double twist_defect)
      : Error(what),
        energy_defect(energy_defect),
        frequency_defect(frequency_defect),
        twist_defect(twist_defect) {}
  double energy_defect;
  double frequency_defect;
  double twist_defect;
};

struct NondegeneracyError : Error {
  NondegeneracyError(const std::string& what, double inverse_norm)
      : Error(what), inverse_norm(inverse_norm) {}
  double inverse_norm;
};

struct ContractionError : Error {
  using Error::Error;
};

struct RangeEscapeError : Error {
  using Error::Error;
};

struct PrecisionError : Error {
  PrecisionError(const std::string& what, int required_digits)
      : Error(what), required_digits(required_digits) {}
  int required_digits;
};

}  // namespace kamforge
