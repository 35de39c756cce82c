#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace millenv {

using cplx = std::complex<double>;

/// Complex DFT of a fixed length.
///
/// Powers of two use an iterative radix-2 transform; other lengths go through
/// Bluestein's chirp-z algorithm on a power-of-two grid. Forward is
/// X[k] = sum x[n] exp(-2 pi i k n / N); inverse includes the 1/N factor.
/// A plan is immutable once built and may be shared between threads.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

  /// Process-wide plan cache keyed by length (mutex-guarded).
  static std::shared_ptr<const Fft> cached(std::size_t n);

 private:
  void radix2(std::span<cplx> data) const;
  void bluestein(std::span<cplx> data) const;

  std::size_t n_;
  bool pow2_;
  // Radix-2 path: bit-reversal table and per-stage twiddles laid out
  // back to back (stage with half-size h starts at offset h - 1).
  std::vector<std::size_t> bitrev_;
  std::vector<cplx> twiddles_;
  // Bluestein path.
  std::unique_ptr<Fft> inner_;
  std::vector<cplx> chirp_;         // exp(-i pi k^2 / N), k < N
  std::vector<cplx> kernel_freq_;   // forward FFT of the conjugate chirp
};

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

/// Full-length forward DFT of a real sequence, optionally zero-padded to n_fft.
std::vector<cplx> fft_real(std::span<const double> x, std::size_t n_fft = 0);
/// Inverse DFT returning the real part.
std::vector<double> ifft_real(std::vector<cplx> spectrum);

}  // namespace millenv
