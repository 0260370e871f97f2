#include <cmath>
#include <random>

#include "doctest.h"
#include "kamforge/errors.hpp"
#include "kamforge/smoothing.hpp"

using namespace kamforge;

namespace {

// Independent glue transcription used as the multiplier reference.
double reference_profile(double t, double rho0) {
  auto g = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  if (t <= rho0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = g((1.0 - t) / (1.0 - rho0)), b = g((t - rho0) / (1.0 - rho0));
  return a / (a + b);
}

PeriodicField trig_poly(int dims, int N, int degree, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(degree + 1), b(degree + 1);
  for (int m = 0; m <= degree; ++m) {
    a[m] = u(rng);
    b[m] = u(rng);
  }
  return PeriodicField::from_function(dims, N, [&](const double* x) {
    double s = 0.0;
    for (int m = 0; m <= degree; ++m) {
      const double phase = 2.0 * M_PI * m * (dims == 1 ? x[0] : x[0] + x[1]);
      s += a[m] * std::cos(phase) + b[m] * std::sin(phase);
    }
    return s;
  });
}

}  // namespace

TEST_CASE("kernel plateau, support and symmetry") {
  const SmoothingKernel k = build_kernel(0.5);
  CHECK(k.profile(0.3) == 1.0);
  CHECK(k.profile(1.1) == 0.0);
  for (double t = 0.0; t <= 1.2; t += 0.01) {
    CHECK(k.profile(t) == doctest::Approx(reference_profile(t, 0.5)).epsilon(1e-14));
    CHECK(k.profile(-t) == k.profile(t));
    CHECK(k.profile(t) >= 0.0);
    CHECK(k.profile(t) <= 1.0);
  }
  CHECK_THROWS(build_kernel(1.0));
  CHECK_THROWS(build_kernel(0.0));
}

TEST_CASE("real-space kernel has unit mass and vanishing low moments") {
  const SmoothingKernel k = build_kernel(0.5);
  CHECK(kernel_moment(k, {0}, {0}, 4096, 64.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(kernel_moment(k, {1}, {0}, 4096, 64.0)) < 1e-6);
  CHECK(std::abs(kernel_moment(k, {0}, {2}, 4096, 64.0)) < 1e-6);
  CHECK(std::abs(kernel_moment(k, {0, 1}, {0, 0}, 256, 32.0)) < 1e-6);
  CHECK_THROWS_AS(kernel_moment(k, {5}, {0}, 4096, 64.0), DomainError);
}

TEST_CASE("kernel decay constant is finite") {
  const KernelDecayReport d = kernel_decay(build_kernel(0.5));
  CHECK(std::isfinite(d.fitted_constant));
  CHECK(d.fitted_constant > 0.0);
  for (double w : d.weighted) CHECK(w <= d.fitted_constant);
}

TEST_CASE("plateau exactness on trigonometric polynomials") {
  const SmoothingKernel k = build_kernel(0.5);
  const double r = 0.5 / (16.0 * M_PI);
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto f = trig_poly(1, 64, 8, seed);
    CHECK((smooth_periodic(f, r, k) - f).sup_norm() <= 1e-12);
  }
  const auto f2 = trig_poly(2, 32, 4, 9);
  CHECK((smooth_periodic(f2, 0.5 / (2.0 * M_PI * 8.0), k) - f2).sup_norm() <= 1e-12);
  const auto c = PeriodicField::constant(2, 16, 3.5);
  CHECK((smooth_periodic(c, 1.0, k) - c).sup_norm() <= 1e-14);
}

TEST_CASE("multiplier identity, linearity and mean preservation") {
  const SmoothingKernel k = build_kernel(0.5);
  std::mt19937 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> sa(256), sb(256);
  for (auto& v : sa) v = n(rng);
  for (auto& v : sb) v = n(rng);
  const auto f = PeriodicField::from_samples(1, 256, sa);
  const auto g = PeriodicField::from_samples(1, 256, sb);
  const double r = 0.01;
  const auto sf = smooth_periodic(f, r, k);
  for (std::size_t i = 0; i < f.size(); ++i) {
    int m = 0;
    f.mode(i, &m);
    const double xi = 2.0 * M_PI * r * m;
    const cplx expected = f.spectrum()[i] * reference_profile(std::abs(xi), 0.5);
    CHECK(std::abs(sf.spectrum()[i] - expected) < 1e-12);
  }
  CHECK(sf.mean() == doctest::Approx(f.mean()).epsilon(1e-13));
  const auto lhs = smooth_periodic(f.scaled(2.0) + g.scaled(-3.0), r, k);
  const auto rhs = sf.scaled(2.0) + smooth_periodic(g, r, k).scaled(-3.0);
  CHECK((lhs - rhs).sup_norm() < 1e-12);
  const auto d1 = smooth_periodic(f, r, k).derivative(0);
  const auto d2 = smooth_periodic(f.derivative(0), r, k);
  CHECK((d1 - d2).sup_norm() < 1e-9 * std::max(1.0, d1.sup_norm()));
}

TEST_CASE("strip evaluation of the continued cosine") {
  const SmoothingKernel k = build_kernel(0.5);
  const auto f = PeriodicField::from_function(1, 32, [](const double* x) { return std::cos(2.0 * M_PI * x[0]); });
  for (double r : {0.05, 0.1}) {
    const double a = 0.23;
    const cplx v = smooth_eval_strip(f, r, {cplx(a, r)}, k);
    const double mult = reference_profile(2.0 * M_PI * r, 0.5);
    const cplx expected = mult * cplx(std::cos(2 * M_PI * a) * std::cosh(2 * M_PI * r),
                                      -std::sin(2 * M_PI * a) * std::sinh(2 * M_PI * r));
    CHECK(std::abs(v - expected) < 1e-12);
    const cplx real_pt = smooth_eval_strip(f, r, {cplx(a, 0.0)}, k);
    CHECK(std::abs(real_pt.imag()) < 1e-14);
    const double interp = smooth_periodic(f, r, k).eval_real(&a);
    CHECK(std::abs(real_pt.real() - interp) < 1e-10);
  }
  CHECK_THROWS(smooth_eval_strip(f, 0.05, {cplx(0.1, 0.2)}, k));
}

TEST_CASE("Jackson error scaling for a C6 plus Holder one half profile") {
  const auto f = PeriodicField::from_function(
      1, 4096, [](const double* x) { return std::pow(std::abs(std::sin(M_PI * x[0])), 6.5); });
  std::vector<double> rs;
  for (int j = 6; j <= 10; ++j) rs.push_back(std::ldexp(1.0, -j));
  const JacksonReport rep = jackson_error_report(f, 6, ModulusSpec::holder(0.5), rs);
  CHECK(rep.slope == doctest::Approx(6.5).epsilon(0.05));
  const auto low = trig_poly(1, 64, 3, 4);
  const auto flat = jackson_error_report(low, 6, ModulusSpec::holder(0.5), {1e-3, 1e-2});
  for (const auto& row : flat.rows) CHECK(row.error <= 1e-13);
}
