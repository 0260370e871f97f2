#include "kamforge/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "kamforge/errors.hpp"

namespace kamforge {
namespace {

double glue(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

cplx i_power(double xi, int order) { return std::pow(cplx(0.0, xi), order); }

// Trapezoid weights on the closed box [-box, box] sampled at N periodic points plus the right end.
double trapezoid_weight(int j, int N) { return (j == 0 || j == N) ? 0.5 : 1.0; }

double moment_at(const SmoothingKernel& kernel, const std::vector<int>& alpha, const std::vector<int>& beta,
                 int N, double box) {
  const int dims = static_cast<int>(alpha.size());
  const double step = 2.0 * box / N;
  if (M_PI * N / (2.0 * box) <= kernel.support_radius) {
    throw ResolutionError("kernel_moment: grid does not resolve the kernel band");
  }
  if (dims == 1) {
    std::vector<cplx> data(N);
    for (int j = 0; j < N; ++j) {
      const int m = signed_wavenumber(j, N);
      const double xi = M_PI * m / box;
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      data[j] = kernel.profile(std::abs(xi)) * i_power(xi, beta[0]) * sign / (2.0 * box);
    }
    dft_inverse(data, 1, N);
    double acc = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double x = -box + j * step;
      acc += trapezoid_weight(j, N) * std::pow(x, alpha[0]) * data[j % N].real();
    }
    return acc * step;
  }
  std::vector<cplx> data(static_cast<std::size_t>(N) * N);
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) {
      const int m1 = signed_wavenumber(a, N), m2 = signed_wavenumber(b, N);
      const double xi[2] = {M_PI * m1 / box, M_PI * m2 / box};
      const double sign = ((m1 + m2) % 2 == 0) ? 1.0 : -1.0;
      data[static_cast<std::size_t>(a) * N + b] = kernel.multiplier(xi, 2) * i_power(xi[0], beta[0]) *
                                                  i_power(xi[1], beta[1]) * sign / (4.0 * box * box);
    }
  }
  dft_inverse(data, 2, N);
  double acc = 0.0;
  for (int a = 0; a <= N; ++a) {
    const double x1 = -box + a * step;
    for (int b = 0; b <= N; ++b) {
      const double x2 = -box + b * step;
      acc += trapezoid_weight(a, N) * trapezoid_weight(b, N) * std::pow(x1, alpha[0]) * std::pow(x2, alpha[1]) *
             data[static_cast<std::size_t>(a % N) * N + (b % N)].real();
    }
  }
  return acc * step * step;
}

}  // namespace

double SmoothingKernel::profile(double t) const {
  t = std::abs(t);
  if (t <= plateau_rho0) return 1.0;
  if (t >= support_radius) return 0.0;
  const double w = support_radius - plateau_rho0;
  const double a = glue((support_radius - t) / w);
  const double b = glue((t - plateau_rho0) / w);
  return a / (a + b);
}

double SmoothingKernel::profile_derivative(double t) const {
  const double sign = t < 0.0 ? -1.0 : 1.0;
  t = std::abs(t);
  if (t <= plateau_rho0 || t >= support_radius) return 0.0;
  const double w = support_radius - plateau_rho0;
  const double s1 = (support_radius - t) / w, s2 = (t - plateau_rho0) / w;
  const double a = glue(s1), b = glue(s2);
  const double denom = (a + b) * (a + b);
  if (denom == 0.0) return 0.0;
  return -sign * a * b / (w * denom) * (1.0 / (s1 * s1) + 1.0 / (s2 * s2));
}

double SmoothingKernel::multiplier(const double* xi, int dims) const {
  double norm2 = 0.0;
  for (int d = 0; d < dims; ++d) norm2 += xi[d] * xi[d];
  return profile(std::sqrt(norm2));
}

SmoothingKernel build_kernel(double rho0) {
  if (!(rho0 > 0.0 && rho0 < 1.0)) throw DomainError("kernel plateau radius must lie in (0, 1)");
  SmoothingKernel k;
  k.plateau_rho0 = rho0;
  return k;
}

PeriodicField smooth_periodic(const PeriodicField& f, double r, const SmoothingKernel& kernel) {
  if (!(r > 0.0)) throw DomainError("smoothing radius must be positive");
  const int dims = f.dims();
  const double scale = 2.0 * M_PI * r;
  return f.map_spectrum([&](const int* k, cplx c) {
    double xi[8];
    for (int d = 0; d < dims; ++d) xi[d] = scale * k[d];
    return c * kernel.multiplier(xi, dims);
  });
}

cplx smooth_eval_strip(const PeriodicField& f, double r, const std::vector<cplx>& x, const SmoothingKernel& kernel) {
  if (static_cast<int>(x.size()) != f.dims()) throw DomainError("strip point has the wrong dimension");
  for (const cplx& z : x) {
    if (std::abs(z.imag()) > r * (1.0 + 1e-15)) throw DomainError("point lies outside the strip |Im x| <= r");
  }
  return smooth_periodic(f, r, kernel).eval(x.data());
}

KernelSamples real_space_kernel(const SmoothingKernel& kernel, int N, double box, int derivative) {
  if (N < 4 || N % 2 != 0) throw DomainError("kernel resolution must be even and at least 4");
  if (!(box > 0.0)) throw DomainError("kernel box must be positive");
  if (M_PI * N / (2.0 * box) <= kernel.support_radius) {
    throw ResolutionError("real_space_kernel: grid does not resolve the kernel band");
  }
  std::vector<cplx> data(N);
  for (int j = 0; j < N; ++j) {
    const int m = signed_wavenumber(j, N);
    const double xi = M_PI * m / box;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    data[j] = kernel.profile(std::abs(xi)) * i_power(xi, derivative) * sign / (2.0 * box);
  }
  dft_inverse(data, 1, N);
  KernelSamples out;
  out.spacing = 2.0 * box / N;
  out.x.resize(N);
  out.values.resize(N);
  for (int j = 0; j < N; ++j) {
    out.x[j] = -box + j * out.spacing;
    out.values[j] = data[j].real();
  }
  return out;
}

double kernel_moment(const SmoothingKernel& kernel, const std::vector<int>& alpha, const std::vector<int>& beta,
                     int N, double box) {
  if (alpha.size() != beta.size() || alpha.empty() || alpha.size() > 2) {
    throw DomainError("kernel_moment supports matching 1-D or 2-D multi-indices");
  }
  int order_a = 0, order_b = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] < 0 || beta[i] < 0) throw DomainError("multi-indices must be nonnegative");
    order_a += alpha[i];
    order_b += beta[i];
  }
  if (order_a > 4 || order_b > 4) throw DomainError("kernel_moment supports orders up to 4");
  if (N < 8 || N % 4 != 0) throw DomainError("kernel_moment resolution must be a multiple of 4");
  const double fine = moment_at(kernel, alpha, beta, N, box);
  const double coarse = moment_at(kernel, alpha, beta, N / 2, box);
  if (std::abs(fine - coarse) > 1e-6 * std::max(1.0, std::abs(fine))) {
    throw ResolutionError("kernel_moment: results at N and N/2 disagree");
  }
  return fine;
}

KernelDecayReport kernel_decay(const SmoothingKernel& kernel, double power, double box, int N) {
  KernelDecayReport rep;
  rep.power = power;
  rep.box = box;
  // A wider periodic box keeps aliased tails away from the sampled region.
  const auto samples = real_space_kernel(kernel, N, 4.0 * box, 0);
  for (std::size_t j = 0; j < samples.x.size(); ++j) {
    const double x = samples.x[j];
    if (std::abs(x) > box) continue;
    const double w = std::abs(samples.values[j]) * std::pow(1.0 + std::abs(x), power);
    rep.x.push_back(x);
    rep.weighted.push_back(w);
    rep.fitted_constant = std::max(rep.fitted_constant, w);
  }
  return rep;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) throw DomainError("slope fit needs at least two matching points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

JacksonReport jackson_error_report(const PeriodicField& f, int k, const ModulusSpec& modulus,
                                   const std::vector<double>& r_values, const SmoothingKernel& kernel) {
  JacksonReport rep;
  std::vector<double> ln_r, ln_err, lnln, ln_scaled;
  for (double r : r_values) {
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("smoothing radii must lie in (0, 1]");
    const PeriodicField s = smooth_periodic(f, r, kernel);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(s.samples()[i] - f.samples()[i]));
    JacksonRow row;
    row.r = r;
    row.error = err;
    row.bound_shape = std::pow(r, k) * eval_modulus(modulus, std::min(r, modulus.delta));
    row.ratio = err / row.bound_shape;
    rep.fitted_constant = std::max(rep.fitted_constant, row.ratio);
    rep.rows.push_back(row);
    if (err > 0.0) {
      ln_r.push_back(std::log(r));
      ln_err.push_back(std::log(err));
      if (r < 1.0) {
        lnln.push_back(std::log(std::log(1.0 / r)));
        ln_scaled.push_back(std::log(err) - k * std::log(r));
      }
    }
  }
  if (ln_r.size() >= 2) rep.slope = least_squares_slope(ln_r, ln_err);
  if (lnln.size() >= 2) rep.log_exponent = -least_squares_slope(lnln, ln_scaled);
  return rep;
}

}  // namespace kamforge
