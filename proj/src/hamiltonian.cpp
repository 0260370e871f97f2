#include "kamforge/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "kamforge/errors.hpp"
#include "kamforge/parallel.hpp"

namespace kamforge {
namespace {

// Phase 2 pi <k, x> reduced modulo 2 pi before the trigonometric call.
double reduced_phase(const std::vector<double>& k, const double* x) {
  double turns = 0.0;
  for (std::size_t d = 0; d < k.size(); ++d) {
    const double t = k[d] * x[d];
    turns += t - std::floor(t);
  }
  turns -= std::floor(turns);
  return 2.0 * M_PI * turns;
}

// Fourier series of a profile on the periodized window, period 2 rho: b(y) = sum c_m exp(i pi m y / rho).
class WindowSeries final : public UnivariateProfile {
 public:
  WindowSeries(double rho, std::vector<int> m, std::vector<cplx> c, std::string source)
      : rho_(rho), m_(std::move(m)), c_(std::move(c)), source_(std::move(source)) {}

  double derivative(double y, int order) const override {
    double out[8];
    derivatives(y, order + 1, out);
    return out[order];
  }

  void derivatives(double y, int count, double* out) const {
    for (int d = 0; d < count; ++d) out[d] = 0.0;
    const double w = M_PI / rho_;
    for (std::size_t i = 0; i < m_.size(); ++i) {
      cplx term = c_[i] * std::polar(1.0, w * m_[i] * y);
      const cplx step(0.0, w * m_[i]);
      for (int d = 0; d < count; ++d) {
        out[d] += term.real();
        term *= step;
      }
    }
  }

  int max_order() const override { return 6; }
  std::string describe() const override { return "smoothed(" + source_ + ")"; }
  std::size_t mode_count() const { return m_.size(); }

 private:
  double rho_;
  std::vector<int> m_;
  std::vector<cplx> c_;
  std::string source_;
};

struct WindowKey {
  const UnivariateProfile* profile;
  double rho;
  int samples;
  bool operator<(const WindowKey& o) const {
    if (profile != o.profile) return profile < o.profile;
    if (rho != o.rho) return rho < o.rho;
    return samples < o.samples;
  }
};

struct WindowEntry {
  std::shared_ptr<const UnivariateProfile> owner;  // keeps the keyed address alive
  std::vector<cplx> spectrum;                      // coefficients of exp(i pi m y / rho), signed m order
};

const std::vector<cplx>& window_spectrum(const std::shared_ptr<const UnivariateProfile>& profile, double rho,
                                         int samples) {
  static std::mutex mutex;
  static std::map<WindowKey, WindowEntry> cache;
  const WindowKey key{profile.get(), rho, samples};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.spectrum;
  }
  const SmoothingKernel window = build_kernel(0.5);
  std::vector<cplx> data(samples);
  const double step = 2.0 * rho / samples;
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t j) {
    const double y = -rho + static_cast<double>(j) * step;
    const double w = window.profile(std::abs(y) / rho);
    data[j] = (w == 0.0) ? 0.0 : w * profile->derivative(y, 0);
  });
  dft_forward(data, 1, samples);
  // Samples start at -rho, so shift the phase origin to y = 0.
  for (int j = 0; j < samples; ++j) {
    if (signed_wavenumber(j, samples) % 2 != 0) data[j] = -data[j];
  }
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.emplace(key, WindowEntry{profile, std::move(data)});
  (void)inserted;
  return it->second.spectrum;
}

}  // namespace

SparseTrig SparseTrig::sine(int dims, int axis, double wavenumber, double amplitude) {
  SparseTrig s;
  s.dims = dims;
  std::vector<double> k(dims, 0.0);
  k[axis] = wavenumber;
  s.modes.push_back({k, cplx(0.0, -0.5 * amplitude)});
  k[axis] = -wavenumber;
  s.modes.push_back({k, cplx(0.0, 0.5 * amplitude)});
  return s;
}

SparseTrig SparseTrig::cosine(int dims, int axis, double wavenumber, double amplitude) {
  SparseTrig s;
  s.dims = dims;
  std::vector<double> k(dims, 0.0);
  if (wavenumber == 0.0) {
    s.modes.push_back({k, cplx(amplitude, 0.0)});
    return s;
  }
  k[axis] = wavenumber;
  s.modes.push_back({k, cplx(0.5 * amplitude, 0.0)});
  k[axis] = -wavenumber;
  s.modes.push_back({k, cplx(0.5 * amplitude, 0.0)});
  return s;
}

SparseTrig& SparseTrig::append(const SparseTrig& other) {
  if (dims == 0) dims = other.dims;
  if (other.dims != dims) throw DomainError("trigonometric factors differ in dimension");
  modes.insert(modes.end(), other.modes.begin(), other.modes.end());
  return *this;
}

double SparseTrig::value(const double* x) const {
  double v = 0.0;
  for (const auto& m : modes) v += (m.c * std::polar(1.0, reduced_phase(m.k, x))).real();
  return v;
}

void SparseTrig::jet(const double* x, double& value, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
  value = 0.0;
  grad = Eigen::VectorXd::Zero(dims);
  hess = Eigen::MatrixXd::Zero(dims, dims);
  const double two_pi = 2.0 * M_PI;
  for (const auto& m : modes) {
    const cplx e = m.c * std::polar(1.0, reduced_phase(m.k, x));
    value += e.real();
    const double ie = -e.imag();  // Re(i e)
    for (int a = 0; a < dims; ++a) {
      grad(a) += two_pi * m.k[a] * ie;
      for (int b = 0; b < dims; ++b) hess(a, b) -= two_pi * two_pi * m.k[a] * m.k[b] * e.real();
    }
  }
}

double SparseTrig::mean() const {
  double v = 0.0;
  for (const auto& m : modes) {
    bool zero = true;
    for (double k : m.k) zero = zero && k == 0.0;
    if (zero) v += m.c.real();
  }
  return v;
}

void HamiltonianModel::add(const HamiltonianTerm& term) {
  if (term.y.kind == YPart::Kind::univariate) {
    if (!term.y.profile) throw ConfigError("univariate term without a profile");
    if (term.x_factor) throw ConfigError("univariate y-terms must not carry an x-factor");
  }
  if (term.y.i < 0 || term.y.i >= n || term.y.j < 0 || term.y.j >= n) {
    throw ConfigError("term index outside the action dimension");
  }
  if (term.x_factor && term.x_factor->dims != n) throw ConfigError("x-factor dimension mismatch");
  terms.push_back(term);
}

HamiltonianJet HamiltonianModel::jet(const double* x, const double* y) const {
  for (int d = 0; d < n; ++d) {
    if (!(std::abs(y[d]) <= rho)) throw DomainError("action variable outside the domain |y| <= rho");
  }
  HamiltonianJet J;
  J.hx = Eigen::VectorXd::Zero(n);
  J.hy = Eigen::VectorXd::Zero(n);
  J.hxx = Eigen::MatrixXd::Zero(n, n);
  J.hxy = Eigen::MatrixXd::Zero(n, n);
  J.hyy = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd g(n), py(n);
  Eigen::MatrixXd hs(n, n), pyy(n, n);
  for (const auto& t : terms) {
    double v = 1.0;
    if (t.x_factor) {
      t.x_factor->jet(x, v, g, hs);
    } else {
      g.setZero();
      hs.setZero();
    }
    double p = 1.0;
    py.setZero();
    pyy.setZero();
    switch (t.y.kind) {
      case YPart::Kind::constant:
        break;
      case YPart::Kind::linear:
        p = y[t.y.i];
        py(t.y.i) = 1.0;
        break;
      case YPart::Kind::quadratic:
        p = y[t.y.i] * y[t.y.j];
        py(t.y.i) += y[t.y.j];
        py(t.y.j) += y[t.y.i];
        pyy(t.y.i, t.y.j) += 1.0;
        pyy(t.y.j, t.y.i) += 1.0;
        break;
      case YPart::Kind::univariate: {
        const double s = y[t.y.j];
        if (auto* series = dynamic_cast<const WindowSeries*>(t.y.profile.get())) {
          double d[3];
          series->derivatives(s, 3, d);
          p = d[0];
          py(t.y.j) = d[1];
          pyy(t.y.j, t.y.j) = d[2];
        } else {
          p = t.y.profile->derivative(s, 0);
          py(t.y.j) = t.y.profile->derivative(s, 1);
          pyy(t.y.j, t.y.j) = t.y.profile->derivative(s, 2);
        }
        break;
      }
    }
    const double c = t.coefficient;
    J.value += c * v * p;
    J.hx += (c * p) * g;
    J.hy += (c * v) * py;
    J.hxx += (c * p) * hs;
    J.hxy += c * g * py.transpose();
    J.hyy += (c * v) * pyy;
  }
  return J;
}

double HamiltonianModel::value(const double* x, const double* y) const { return jet(x, y).value; }

Eigen::MatrixXd HamiltonianModel::mean_hessian_inverse(int N, double* inverse_norm) const {
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(N);
  std::vector<Eigen::MatrixXd> parts(total);
  const std::vector<double> zero(n, 0.0);
  const PeriodicField grid = PeriodicField::constant(n, N, 0.0);
  parallel_for(total, [&](std::size_t i) {
    std::vector<double> x(n);
    grid.grid_point(i, x.data());
    parts[i] = jet(x.data(), zero.data()).hyy;
  });
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
  for (const auto& p : parts) mean += p;
  mean /= static_cast<double>(total);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(mean);
  if (!lu.isInvertible()) {
    if (inverse_norm) *inverse_norm = std::numeric_limits<double>::infinity();
    throw NondegeneracyError("mean action Hessian is singular", std::numeric_limits<double>::infinity());
  }
  Eigen::MatrixXd inv = lu.inverse();
  if (inverse_norm) *inverse_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(inv).singularValues()(0);
  return inv;
}

double HamiltonianModel::periodicity_defect(int samples, unsigned seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(-0.5 * rho, 0.5 * rho);
  double worst = 0.0;
  std::vector<double> x(n), y(n), xs(n);
  for (int s = 0; s < samples; ++s) {
    for (int d = 0; d < n; ++d) {
      x[d] = ux(rng);
      y[d] = uy(rng);
    }
    const double base = value(x.data(), y.data());
    for (int j = 0; j < n; ++j) {
      xs = x;
      xs[j] += 1.0;
      worst = std::max(worst, std::abs(value(xs.data(), y.data()) - base));
    }
  }
  return worst;
}

PeriodicField HamiltonianModel::energy_field(int N) const {
  const std::vector<double> zero(n, 0.0);
  return PeriodicField::from_function(n, N, [&](const double* x) { return value(x, zero.data()); });
}

std::vector<PeriodicField> HamiltonianModel::frequency_field(int N) const {
  const std::vector<double> zero(n, 0.0);
  std::vector<PeriodicField> out;
  for (int a = 0; a < n; ++a) {
    out.push_back(PeriodicField::from_function(n, N, [&](const double* x) { return jet(x, zero.data()).hy(a); }));
  }
  return out;
}

HamiltonianModel build_approximant(const HamiltonianModel& H, double r, const ApproximantOptions& options) {
  if (!(r > 0.0)) throw DomainError("approximant radius must be positive");
  HamiltonianModel out = H;
  out.terms.clear();
  const int samples = options.window_samples;
  for (const auto& t : H.terms) {
    HamiltonianTerm s = t;
    if (t.x_factor) {
      SparseTrig f;
      f.dims = t.x_factor->dims;
      for (const auto& m : t.x_factor->modes) {
        double xi[8];
        for (int d = 0; d < f.dims; ++d) xi[d] = 2.0 * M_PI * r * m.k[d];
        const double w = options.kernel.multiplier(xi, f.dims);
        if (w != 0.0) f.modes.push_back({m.k, m.c * w});
      }
      if (f.modes.empty()) continue;
      s.x_factor = f;
    }
    if (t.y.kind == YPart::Kind::univariate) {
      if (r > H.rho / 16.0) throw DomainError("y-window too small for the requested radius");
      if (H.rho / (M_PI * r) >= samples / 2.0) {
        throw DomainError("y-window resolution too low for the requested radius");
      }
      const auto& spec = window_spectrum(t.y.profile, H.rho, samples);
      std::vector<int> ms;
      std::vector<cplx> cs;
      for (int j = 0; j < samples; ++j) {
        const int m = signed_wavenumber(j, samples);
        const double w = options.kernel.profile(r * M_PI * std::abs(m) / H.rho);
        if (w != 0.0 && spec[j] != cplx(0.0, 0.0)) {
          ms.push_back(m);
          cs.push_back(spec[j] * w);
        }
      }
      s.y.profile = std::make_shared<WindowSeries>(H.rho, std::move(ms), std::move(cs), t.y.profile->describe());
    }
    out.terms.push_back(std::move(s));
  }
  std::ostringstream name;
  name << H.name << "@r=" << r;
  out.name = name.str();
  return out;
}

ApproximantError approximant_error(const HamiltonianModel& H, const HamiltonianModel& approx, double r,
                                   int x_points, int y_points) {
  const int n = H.n;
  std::size_t nx = 1, ny = 1;
  for (int d = 0; d < n; ++d) {
    nx *= static_cast<std::size_t>(x_points);
    ny *= static_cast<std::size_t>(y_points);
  }
  std::vector<double> worst(nx * ny, 0.0);
  parallel_for(nx * ny, [&](std::size_t idx) {
    std::size_t ix = idx / ny, iy = idx % ny;
    std::vector<double> x(n), y(n);
    for (int d = n - 1; d >= 0; --d) {
      x[d] = static_cast<double>(ix % x_points) / x_points;
      ix /= x_points;
      y[d] = -0.5 * H.rho + H.rho * static_cast<double>(iy % y_points) / (y_points - 1);
      iy /= y_points;
    }
    worst[idx] = std::abs(approx.value(x.data(), y.data()) - H.value(x.data(), y.data()));
  });
  ApproximantError e;
  e.r = r;
  e.sup_error = *std::max_element(worst.begin(), worst.end());
  e.bound_shape = std::pow(r, H.k) * eval_modulus(H.modulus, std::min(r, H.modulus.delta));
  e.ratio = e.sup_error / e.bound_shape;
  return e;
}

}  // namespace kamforge
