#include "kamforge/periodic_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>

#include "kamforge/errors.hpp"
#include "kamforge/parallel.hpp"

namespace kamforge {
namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Plans are created once per (shape, direction) and executed with the new-array interface.
fftw_plan cached_plan(int dims, int N, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  const auto key = std::make_tuple(dims, N, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::size_t total = 1;
  std::vector<int> shape(dims, N);
  for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(N);
  fftw_complex* scratch = fftw_alloc_complex(total);
  fftw_plan plan = fftw_plan_dft(dims, shape.data(), scratch, scratch, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (plan == nullptr) throw Error("FFTW plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

void execute(std::vector<cplx>& data, int dims, int N, int sign) {
  if (dims < 1 || N < 1) throw DomainError("transform shape must be positive");
  std::size_t total = 1;
  for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(N);
  if (data.size() != total) throw DomainError("transform data size does not match the grid");
  fftw_plan plan = cached_plan(dims, N, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

std::size_t grid_total(int dims, int N) {
  if (dims < 1 || dims > 8) throw DomainError("field dimension must lie in [1, 8]");
  if (N < 2 || N % 2 != 0) throw DomainError("field resolution must be even and at least 2");
  std::size_t total = 1;
  for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(N);
  return total;
}

}  // namespace

void dft_forward(std::vector<cplx>& data, int dims, int N) {
  execute(data, dims, N, FFTW_FORWARD);
  double norm = 1.0;
  for (int d = 0; d < dims; ++d) norm /= N;
  for (auto& c : data) c *= norm;
}

void dft_inverse(std::vector<cplx>& data, int dims, int N) { execute(data, dims, N, FFTW_BACKWARD); }

void dft_forward_1d(std::vector<cplx>& data) {
  dft_forward(data, 1, static_cast<int>(data.size()));
}

void dft_inverse_1d(std::vector<cplx>& data) {
  dft_inverse(data, 1, static_cast<int>(data.size()));
}

PeriodicField::PeriodicField(int dims, int N, std::vector<double> samples, std::vector<cplx> spectrum)
    : dims_(dims), N_(N), samples_(std::move(samples)), spectrum_(std::move(spectrum)) {}

PeriodicField PeriodicField::from_samples(int dims, int N, std::vector<double> samples) {
  const std::size_t total = grid_total(dims, N);
  if (samples.size() != total) throw DomainError("sample count does not match the grid");
  for (double v : samples) {
    if (!std::isfinite(v)) throw DomainError("field samples must be finite");
  }
  std::vector<cplx> spec(samples.begin(), samples.end());
  dft_forward(spec, dims, N);
  return PeriodicField(dims, N, std::move(samples), std::move(spec));
}

PeriodicField PeriodicField::from_function(int dims, int N,
                                           const std::function<double(const double*)>& f) {
  const std::size_t total = grid_total(dims, N);
  std::vector<double> samples(total);
  parallel_for(total, [&](std::size_t i) {
    double x[8];
    std::size_t rem = i;
    for (int d = dims - 1; d >= 0; --d) {
      x[d] = static_cast<double>(rem % N) / N;
      rem /= N;
    }
    samples[i] = f(x);
  });
  return from_samples(dims, N, std::move(samples));
}

PeriodicField PeriodicField::from_spectrum(int dims, int N, std::vector<cplx> spectrum) {
  const std::size_t total = grid_total(dims, N);
  if (spectrum.size() != total) throw DomainError("spectrum size does not match the grid");
  dft_inverse(spectrum, dims, N);
  std::vector<double> samples(total);
  for (std::size_t i = 0; i < total; ++i) samples[i] = spectrum[i].real();
  return from_samples(dims, N, std::move(samples));
}

PeriodicField PeriodicField::constant(int dims, int N, double value) {
  const std::size_t total = grid_total(dims, N);
  std::vector<cplx> spec(total, cplx(0.0, 0.0));
  spec[0] = value;
  return PeriodicField(dims, N, std::vector<double>(total, value), std::move(spec));
}

void PeriodicField::mode(std::size_t index, int* k) const {
  for (int d = dims_ - 1; d >= 0; --d) {
    k[d] = signed_wavenumber(static_cast<int>(index % N_), N_);
    index /= N_;
  }
}

bool PeriodicField::is_nyquist(std::size_t index) const {
  for (int d = 0; d < dims_; ++d) {
    if (static_cast<int>(index % N_) == N_ / 2) return true;
    index /= N_;
  }
  return false;
}

std::size_t PeriodicField::flat_index(const int* k) const {
  std::size_t idx = 0;
  for (int d = 0; d < dims_; ++d) {
    if (k[d] < -N_ / 2 || k[d] >= N_ / 2) throw DomainError("wavenumber outside the grid band");
    idx = idx * N_ + static_cast<std::size_t>(k[d] < 0 ? k[d] + N_ : k[d]);
  }
  return idx;
}

void PeriodicField::grid_point(std::size_t index, double* x) const {
  for (int d = dims_ - 1; d >= 0; --d) {
    x[d] = static_cast<double>(index % N_) / N_;
    index /= N_;
  }
}

double PeriodicField::sup_norm() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

double PeriodicField::consistency_error() const {
  std::vector<cplx> back = spectrum_;
  dft_inverse(back, dims_, N_);
  double worst = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) worst = std::max(worst, std::abs(back[i] - samples_[i]));
  return worst / std::max(1.0, sup_norm());
}

PeriodicField PeriodicField::map_spectrum(const std::function<cplx(const int*, cplx)>& op) const {
  std::vector<cplx> spec(spectrum_.size());
  int k[8];
  for (std::size_t i = 0; i < spec.size(); ++i) {
    mode(i, k);
    spec[i] = op(k, spectrum_[i]);
  }
  return from_spectrum(dims_, N_, std::move(spec));
}

PeriodicField PeriodicField::derivative(int axis, int order) const {
  if (axis < 0 || axis >= dims_) throw DomainError("derivative axis out of range");
  if (order < 0) throw DomainError("derivative order must be nonnegative");
  if (order == 0) return *this;
  const double two_pi = 2.0 * M_PI;
  const int half = N_ / 2;
  return map_spectrum([&](const int* k, cplx c) {
    if (order % 2 == 1 && k[axis] == -half) return cplx(0.0, 0.0);
    const cplx factor = std::pow(cplx(0.0, two_pi * k[axis]), order);
    return c * factor;
  });
}

cplx PeriodicField::eval(const cplx* x) const {
  // Per-axis exponentials exp(2 pi i k x_d) for every signed k, with the Nyquist slot as a cosine.
  const cplx i2pi(0.0, 2.0 * M_PI);
  std::vector<std::vector<cplx>> basis(dims_, std::vector<cplx>(N_));
  for (int d = 0; d < dims_; ++d) {
    for (int j = 0; j < N_; ++j) {
      const int k = signed_wavenumber(j, N_);
      basis[d][j] = (j == N_ / 2) ? std::cos(M_PI * N_ * x[d]) : std::exp(i2pi * static_cast<double>(k) * x[d]);
    }
  }
  cplx acc = 0.0;
  for (std::size_t i = 0; i < spectrum_.size(); ++i) {
    const cplx c = spectrum_[i];
    if (c == cplx(0.0, 0.0)) continue;
    cplx term = c;
    std::size_t rem = i;
    for (int d = dims_ - 1; d >= 0; --d) {
      term *= basis[d][rem % N_];
      rem /= N_;
    }
    acc += term;
  }
  return acc;
}

double PeriodicField::eval_real(const double* x) const {
  cplx z[8];
  for (int d = 0; d < dims_; ++d) z[d] = x[d];
  return eval(z).real();
}

std::vector<double> PeriodicField::eval_many(const std::vector<double>& points) const {
  if (dims_ == 0 || points.size() % dims_ != 0) throw DomainError("point buffer size is not a multiple of the dimension");
  const std::size_t count = points.size() / dims_;
  std::vector<double> out(count);
  parallel_for(count, [&](std::size_t p) { out[p] = eval_real(points.data() + p * dims_); });
  return out;
}

namespace {
void require_same_grid(const PeriodicField& a, const PeriodicField& b) {
  if (a.dims() != b.dims() || a.resolution() != b.resolution()) {
    throw DomainError("fields live on different grids");
  }
}
}  // namespace

PeriodicField PeriodicField::operator+(const PeriodicField& other) const {
  require_same_grid(*this, other);
  std::vector<double> s(samples_);
  std::vector<cplx> c(spectrum_);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] += other.samples_[i];
    c[i] += other.spectrum_[i];
  }
  return PeriodicField(dims_, N_, std::move(s), std::move(c));
}

PeriodicField PeriodicField::operator-(const PeriodicField& other) const {
  return *this + other.scaled(-1.0);
}

PeriodicField PeriodicField::operator*(const PeriodicField& other) const {
  require_same_grid(*this, other);
  std::vector<double> s(samples_);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= other.samples_[i];
  return from_samples(dims_, N_, std::move(s));
}

PeriodicField PeriodicField::scaled(double factor) const {
  std::vector<double> s(samples_);
  std::vector<cplx> c(spectrum_);
  for (auto& v : s) v *= factor;
  for (auto& v : c) v *= factor;
  return PeriodicField(dims_, N_, std::move(s), std::move(c));
}

PeriodicField PeriodicField::plus_constant(double value) const {
  std::vector<double> s(samples_);
  std::vector<cplx> c(spectrum_);
  for (auto& v : s) v += value;
  c[0] += value;
  return PeriodicField(dims_, N_, std::move(s), std::move(c));
}

std::vector<std::vector<double>> evaluate_fields(const std::vector<const PeriodicField*>& fields,
                                                 const std::vector<double>& points) {
  std::vector<std::vector<double>> out(fields.size());
  if (fields.empty()) return out;
  const int dims = fields[0]->dims();
  const int N = fields[0]->resolution();
  for (const auto* f : fields) {
    if (f->dims() != dims || f->resolution() != N) throw DomainError("fields live on different grids");
  }
  if (points.size() % dims != 0) throw DomainError("point buffer size is not a multiple of the dimension");
  const std::size_t count = points.size() / dims;

  // Per field: retained coefficients with their per-axis basis offsets.
  struct Sparse {
    std::vector<std::uint32_t> offset;  // dims entries per coefficient
    std::vector<cplx> coeff;
  };
  std::vector<Sparse> sparse(fields.size());
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const auto& spec = fields[f]->spectrum();
    double l1 = 0.0;
    for (const auto& c : spec) l1 += std::abs(c);
    const double cut = 1e-17 * l1;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (std::abs(spec[i]) > cut) {
        std::size_t rem = i;
        const std::size_t base = sparse[f].offset.size();
        sparse[f].offset.resize(base + dims);
        for (int d = dims - 1; d >= 0; --d) {
          sparse[f].offset[base + d] = static_cast<std::uint32_t>(d * N + rem % N);
          rem /= N;
        }
        sparse[f].coeff.push_back(spec[i]);
      }
    }
    out[f].assign(count, 0.0);
  }

  parallel_for(count, [&](std::size_t p) {
    const double* x = points.data() + p * dims;
    std::vector<cplx> basis(static_cast<std::size_t>(dims) * N);
    for (int d = 0; d < dims; ++d) {
      for (int j = 0; j < N; ++j) {
        const int k = signed_wavenumber(j, N);
        basis[static_cast<std::size_t>(d) * N + j] =
            (j == N / 2) ? cplx(std::cos(M_PI * N * x[d]), 0.0) : std::polar(1.0, 2.0 * M_PI * k * x[d]);
      }
    }
    for (std::size_t f = 0; f < sparse.size(); ++f) {
      const auto& sp = sparse[f];
      double acc = 0.0;
      const std::uint32_t* off = sp.offset.data();
      for (std::size_t m = 0; m < sp.coeff.size(); ++m, off += dims) {
        cplx term = basis[off[0]];
        for (int d = 1; d < dims; ++d) term *= basis[off[d]];
        acc += sp.coeff[m].real() * term.real() - sp.coeff[m].imag() * term.imag();
      }
      out[f][p] = acc;
    }
  });
  return out;
}

}  // namespace kamforge
