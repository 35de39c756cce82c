#pragma once

// Data-parallel inner loops used by the FFT, filtering, envelope and averaging
// code. Every kernel has a portable scalar reference; an AVX2/FMA variant is
// compiled separately and selected at runtime when the CPU supports it.
//
// All pointers may be unaligned. Complex arrays are interleaved (re, im).

#include <complex>
#include <cstddef>
#include <string_view>

namespace millenv::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  /// Radix-2 decimation-in-time butterflies over `n` pairs:
  /// t = b[j] * w[j]; b[j] = a[j] - t; a[j] = a[j] + t.
  void (*butterfly)(cplx* a, cplx* b, const cplx* w, std::size_t n);
  /// out[j] = x[j] * y[j]
  void (*complex_multiply)(const cplx* x, const cplx* y, cplx* out, std::size_t n);
  /// x[j] *= gain[j] (real gain)
  void (*scale_by_real)(cplx* x, const double* gain, std::size_t n);
  /// out[j] = |x[j]|
  void (*magnitude)(const cplx* x, double* out, std::size_t n);
  /// sum of x[j]^2
  double (*sum_squares)(const double* x, std::size_t n);
  /// acc[j] += x[j]
  void (*accumulate)(double* acc, const double* x, std::size_t n);
  /// sfx[j] += conj(f[j]) * x[j]; sff[j] += |f[j]|^2; sxx[j] += |x[j]|^2
  void (*cross_accumulate)(const cplx* f, const cplx* x, cplx* sfx, double* sff,
                           double* sxx, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// The AVX2 table, or nullptr when it was not compiled in or the running CPU
/// lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

/// Table used by the library. Chosen on first use: the best supported ISA,
/// unless the MILLENV_ISA environment variable names another one.
const KernelTable& active() noexcept;

/// Overrides the active table. Returns false (and changes nothing) when the
/// requested ISA is unavailable on this machine.
bool select(Isa isa) noexcept;

std::string_view to_string(Isa isa) noexcept;
bool parse_isa(std::string_view name, Isa& out) noexcept;

namespace detail {
// Defined in kernels_avx2.cpp when the variant is built.
const KernelTable* avx2_table() noexcept;
}  // namespace detail

}  // namespace millenv::simd
