#include "millenv/simd/kernels.hpp"

#include <cmath>

namespace millenv::simd {
namespace {

void butterfly(cplx* a, cplx* b, const cplx* w, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double tr = b[j].real() * w[j].real() - b[j].imag() * w[j].imag();
    const double ti = b[j].real() * w[j].imag() + b[j].imag() * w[j].real();
    const cplx t(tr, ti);
    b[j] = a[j] - t;
    a[j] += t;
  }
}

void complex_multiply(const cplx* x, const cplx* y, cplx* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double re = x[j].real() * y[j].real() - x[j].imag() * y[j].imag();
    const double im = x[j].real() * y[j].imag() + x[j].imag() * y[j].real();
    out[j] = cplx(re, im);
  }
}

void scale_by_real(cplx* x, const double* gain, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) x[j] *= gain[j];
}

void magnitude(const cplx* x, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = std::sqrt(x[j].real() * x[j].real() + x[j].imag() * x[j].imag());
  }
}

double sum_squares(const double* x, std::size_t n) {
  // Four partial sums, matching the lane layout of the vector variants.
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    for (std::size_t l = 0; l < 4; ++l) s[l] += x[j + l] * x[j + l];
  }
  double total = (s[0] + s[1]) + (s[2] + s[3]);
  for (; j < n; ++j) total += x[j] * x[j];
  return total;
}

void accumulate(double* acc, const double* x, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) acc[j] += x[j];
}

void cross_accumulate(const cplx* f, const cplx* x, cplx* sfx, double* sff, double* sxx,
                      std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double fr = f[j].real(), fi = f[j].imag();
    const double xr = x[j].real(), xi = x[j].imag();
    sfx[j] += cplx(fr * xr + fi * xi, fr * xi - fi * xr);
    sff[j] += fr * fr + fi * fi;
    sxx[j] += xr * xr + xi * xi;
  }
}

constexpr KernelTable kScalar{
    Isa::scalar,   "scalar",      &butterfly,  &complex_multiply, &scale_by_real,
    &magnitude,    &sum_squares,  &accumulate, &cross_accumulate,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace millenv::simd
