#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace kamforge {

using cplx = std::complex<double>;

// Normalized discrete Fourier transforms on an n-dimensional N^n grid (row-major, axis 0 slowest).
// forward: c_k = N^-n sum_j f_j exp(-2 pi i k.x_j);  inverse: f_j = sum_k c_k exp(2 pi i k.x_j).
void dft_forward(std::vector<cplx>& data, int dims, int N);
void dft_inverse(std::vector<cplx>& data, int dims, int N);
// One-dimensional transforms of arbitrary length (used for the real-space kernel).
void dft_forward_1d(std::vector<cplx>& data);
void dft_inverse_1d(std::vector<cplx>& data);

inline int signed_wavenumber(int index, int N) { return index < N / 2 ? index : index - N; }

// A real period-1 function on T^n held as grid samples together with its discrete spectrum.
class PeriodicField {
 public:
  PeriodicField() = default;

  static PeriodicField from_samples(int dims, int N, std::vector<double> samples);
  static PeriodicField from_function(int dims, int N, const std::function<double(const double*)>& f);
  // The real part of the inverse transform is kept; the spectrum is recomputed from it.
  static PeriodicField from_spectrum(int dims, int N, std::vector<cplx> spectrum);
  static PeriodicField constant(int dims, int N, double value);

  int dims() const { return dims_; }
  int resolution() const { return N_; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }
  const std::vector<cplx>& spectrum() const { return spectrum_; }

  // Signed wavenumbers of a flat spectral index, written to k[0..dims).
  void mode(std::size_t index, int* k) const;
  bool is_nyquist(std::size_t index) const;
  std::size_t flat_index(const int* k) const;
  // Grid coordinates of a flat sample index, written to x[0..dims).
  void grid_point(std::size_t index, double* x) const;

  double mean() const { return spectrum_.empty() ? 0.0 : spectrum_[0].real(); }
  double sup_norm() const;
  // max |inverse(spectrum) - samples| / max(1, sup_norm)
  double consistency_error() const;

  // Spectral derivative along an axis; Nyquist coefficients are dropped for odd orders.
  PeriodicField derivative(int axis, int order = 1) const;
  PeriodicField map_spectrum(const std::function<cplx(const int* k, cplx c)>& op) const;

  // Trigonometric interpolant at a complex point (Nyquist terms taken as cosines).
  cplx eval(const cplx* x) const;
  double eval_real(const double* x) const;
  // Real interpolant at many points; points holds dims coordinates per point.
  std::vector<double> eval_many(const std::vector<double>& points) const;

  PeriodicField operator+(const PeriodicField& other) const;
  PeriodicField operator-(const PeriodicField& other) const;
  PeriodicField operator*(const PeriodicField& other) const;  // pointwise product
  PeriodicField scaled(double factor) const;
  PeriodicField plus_constant(double value) const;

 private:
  PeriodicField(int dims, int N, std::vector<double> samples, std::vector<cplx> spectrum);
  int dims_ = 0;
  int N_ = 0;
  std::vector<double> samples_;
  std::vector<cplx> spectrum_;
};

// Evaluates several fields on a common grid at many points, sharing the per-point basis.
// Coefficients below 1e-17 of a field's spectral l1 norm are skipped. Result is [field][point].
std::vector<std::vector<double>> evaluate_fields(const std::vector<const PeriodicField*>& fields,
                                                 const std::vector<double>& points);

}  // namespace kamforge
