#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kamforge/modulus.hpp"
#include "kamforge/periodic_field.hpp"
#include "kamforge/smoothing.hpp"

namespace kamforge {

// Real trigonometric polynomial sum_k c_k exp(2 pi i <k, x>) with sparse, possibly very large modes.
// Conjugate-symmetric coefficient pairs must both be present.
struct SparseTrig {
  struct Mode {
    std::vector<double> k;  // integer wavenumbers stored exactly in doubles
    cplx c;
  };
  int dims = 0;
  std::vector<Mode> modes;

  static SparseTrig sine(int dims, int axis, double wavenumber, double amplitude = 1.0);
  static SparseTrig cosine(int dims, int axis, double wavenumber, double amplitude = 1.0);
  SparseTrig& append(const SparseTrig& other);

  double value(const double* x) const;
  // Value, gradient and Hessian at x.
  void jet(const double* x, double& value, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const;
  double mean() const;
};

// A smooth even-or-odd scalar profile b(y) with derivatives up to max_order().
class UnivariateProfile {
 public:
  virtual ~UnivariateProfile() = default;
  virtual double derivative(double y, int order) const = 0;
  virtual int max_order() const = 0;
  virtual std::string describe() const = 0;
};

struct YPart {
  enum class Kind { constant, linear, quadratic, univariate };
  Kind kind = Kind::constant;
  int i = 0;
  int j = 0;
  std::shared_ptr<const UnivariateProfile> profile;
};

// coefficient * x_factor(x) * y_part(y); a univariate y-part requires no x-factor.
struct HamiltonianTerm {
  double coefficient = 1.0;
  std::optional<SparseTrig> x_factor;
  YPart y;
};

struct HamiltonianJet {
  double value = 0.0;
  Eigen::VectorXd hx, hy;
  Eigen::MatrixXd hxx, hxy, hyy;  // hxy(i, j) = d^2 H / dx_i dy_j
};

class HamiltonianModel {
 public:
  int n = 2;
  std::vector<HamiltonianTerm> terms;
  int k = 6;  // declared differentiability order
  ModulusSpec modulus = ModulusSpec::lipschitz();
  double M = 10.0;
  double rho = 1.0;  // H is defined on |y|_inf <= rho
  std::string name;

  void add(const HamiltonianTerm& term);
  // Throws DomainError when |y|_inf > rho.
  HamiltonianJet jet(const double* x, const double* y) const;
  double value(const double* x, const double* y) const;

  // Inverse of the torus mean of H_yy(., 0) sampled on an N^n grid, and its operator 2-norm.
  Eigen::MatrixXd mean_hessian_inverse(int N, double* inverse_norm = nullptr) const;
  // max |H(x + e_j, y) - H(x, y)| over sample pairs.
  double periodicity_defect(int samples = 64, unsigned seed = 7) const;
  // Samples of H(x, 0) and H_y(x, 0) on the N^n grid.
  PeriodicField energy_field(int N) const;
  std::vector<PeriodicField> frequency_field(int N) const;
};

struct ApproximantOptions {
  int window_samples = 1 << 14;  // periodized y-window resolution
  SmoothingKernel kernel{};
};

// Analytic approximant at radius r: x-factors multiplied by K-hat(2 pi r k), univariate profiles
// windowed to |y| <= rho, periodized with period 2 rho and multiplied by K-hat(r eta).
// Polynomial y-parts are reproduced exactly by the product kernel.
HamiltonianModel build_approximant(const HamiltonianModel& H, double r, const ApproximantOptions& options = {});

struct ApproximantError {
  double r = 0.0;
  double sup_error = 0.0;  // sampled sup |H^r - H|
  double bound_shape = 0.0;  // r^k w(r)
  double ratio = 0.0;
};

// Sampled sup |H^r - H| on an x-grid times a y-grid inside |y| <= rho/2.
ApproximantError approximant_error(const HamiltonianModel& H, const HamiltonianModel& approx, double r,
                                   int x_points = 16, int y_points = 33);

}  // namespace kamforge
