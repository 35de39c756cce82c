// Compiled with -mavx2 -mfma. Nothing here may run before dispatch.cpp has
// confirmed CPU support.
#include "millenv/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace millenv::simd {
namespace {

inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// (a0, a1) * (b0, b1) for two interleaved complex values.
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d br = _mm256_movedup_pd(b);
  const __m256d bi = _mm256_permute_pd(b, 0xF);
  const __m256d a_swap = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(a_swap, bi));
}

// |z|^2 of four complex values held in two registers, in order.
inline __m256d norm4(__m256d z01, __m256d z23) {
  const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(z01, z01), _mm256_mul_pd(z23, z23));
  return _mm256_permute4x64_pd(h, 0xD8);
}

void butterfly(cplx* a, cplx* b, const cplx* w, std::size_t n) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d va = load2(a + j);
    const __m256d t = cmul(load2(b + j), load2(w + j));
    store2(b + j, _mm256_sub_pd(va, t));
    store2(a + j, _mm256_add_pd(va, t));
  }
  for (; j < n; ++j) {
    const double tr = b[j].real() * w[j].real() - b[j].imag() * w[j].imag();
    const double ti = b[j].real() * w[j].imag() + b[j].imag() * w[j].real();
    const cplx t(tr, ti);
    b[j] = a[j] - t;
    a[j] += t;
  }
}

void complex_multiply(const cplx* x, const cplx* y, cplx* out, std::size_t n) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) store2(out + j, cmul(load2(x + j), load2(y + j)));
  for (; j < n; ++j) {
    const double re = x[j].real() * y[j].real() - x[j].imag() * y[j].imag();
    const double im = x[j].real() * y[j].imag() + x[j].imag() * y[j].real();
    out[j] = cplx(re, im);
  }
}

void scale_by_real(cplx* x, const double* gain, std::size_t n) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d g = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(gain + j)), 0x50);
    store2(x + j, _mm256_mul_pd(load2(x + j), g));
  }
  for (; j < n; ++j) x[j] *= gain[j];
}

void magnitude(const cplx* x, double* out, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    _mm256_storeu_pd(out + j, _mm256_sqrt_pd(norm4(load2(x + j), load2(x + j + 2))));
  }
  for (; j < n; ++j) {
    out[j] = std::sqrt(x[j].real() * x[j].real() + x[j].imag() * x[j].imag());
  }
}

double sum_squares(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d v = _mm256_loadu_pd(x + j);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  double total = (s[0] + s[1]) + (s[2] + s[3]);
  for (; j < n; ++j) total += x[j] * x[j];
  return total;
}

void accumulate(double* acc, const double* x, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    _mm256_storeu_pd(acc + j, _mm256_add_pd(_mm256_loadu_pd(acc + j), _mm256_loadu_pd(x + j)));
  }
  for (; j < n; ++j) acc[j] += x[j];
}

void cross_accumulate(const cplx* f, const cplx* x, cplx* sfx, double* sff, double* sxx,
                      std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d f01 = load2(f + j), f23 = load2(f + j + 2);
    const __m256d x01 = load2(x + j), x23 = load2(x + j + 2);
    // conj(f) * x: even lanes fr*xr + fi*xi, odd lanes fr*xi - fi*xr.
    const __m256d c01 = _mm256_fmsubadd_pd(_mm256_permute_pd(f01, 0x5), _mm256_permute_pd(x01, 0xF),
                                           _mm256_mul_pd(f01, _mm256_movedup_pd(x01)));
    const __m256d c23 = _mm256_fmsubadd_pd(_mm256_permute_pd(f23, 0x5), _mm256_permute_pd(x23, 0xF),
                                           _mm256_mul_pd(f23, _mm256_movedup_pd(x23)));
    store2(sfx + j, _mm256_add_pd(load2(sfx + j), c01));
    store2(sfx + j + 2, _mm256_add_pd(load2(sfx + j + 2), c23));
    _mm256_storeu_pd(sff + j, _mm256_add_pd(_mm256_loadu_pd(sff + j), norm4(f01, f23)));
    _mm256_storeu_pd(sxx + j, _mm256_add_pd(_mm256_loadu_pd(sxx + j), norm4(x01, x23)));
  }
  for (; j < n; ++j) {
    const double fr = f[j].real(), fi = f[j].imag();
    const double xr = x[j].real(), xi = x[j].imag();
    sfx[j] += cplx(fr * xr + fi * xi, fr * xi - fi * xr);
    sff[j] += fr * fr + fi * fi;
    sxx[j] += xr * xr + xi * xi;
  }
}

constexpr KernelTable kAvx2{
    Isa::avx2,  "avx2",       &butterfly,  &complex_multiply, &scale_by_real,
    &magnitude, &sum_squares, &accumulate, &cross_accumulate,
};

}  // namespace

namespace detail {
const KernelTable* avx2_table() noexcept { return &kAvx2; }
}  // namespace detail

}  // namespace millenv::simd
