#include "millenv/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "millenv/error.hpp"
#include "millenv/simd/kernels.hpp"

namespace millenv {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Fft::Fft(std::size_t n) : n_(n), pow2_(is_power_of_two(n)) {
  if (n == 0) throw SizeError("fft: length must be positive");
  if (pow2_) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev_[i] = r;
    }
    twiddles_.reserve(n > 1 ? n - 1 : 0);
    for (std::size_t half = 1; half < n; half <<= 1) {
      for (std::size_t j = 0; j < half; ++j) {
        const double angle = -std::numbers::pi * static_cast<double>(j) / static_cast<double>(half);
        twiddles_.emplace_back(std::cos(angle), std::sin(angle));
      }
    }
    return;
  }

  const std::size_t m = next_power_of_two(2 * n - 1);
  inner_ = std::make_unique<Fft>(m);
  chirp_.resize(n);
  const std::size_t two_n = 2 * n;
  std::size_t k2 = 0;  // k^2 mod 2N, updated incrementally
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) k2 = (k2 + 2 * k - 1) % two_n;
    const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp_[k] = cplx(std::cos(angle), std::sin(angle));
  }
  kernel_freq_.assign(m, cplx{});
  kernel_freq_[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n; ++k) {
    kernel_freq_[k] = std::conj(chirp_[k]);
    kernel_freq_[m - k] = std::conj(chirp_[k]);
  }
  inner_->forward(kernel_freq_);
}

void Fft::forward(std::span<cplx> data) const {
  if (data.size() != n_) throw SizeError("fft: buffer length does not match plan");
  if (n_ == 1) return;
  if (pow2_) {
    radix2(data);
  } else {
    bluestein(data);
  }
}

void Fft::inverse(std::span<cplx> data) const {
  for (auto& v : data) v = std::conj(v);
  forward(data);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v = std::conj(v) * scale;
}

void Fft::radix2(std::span<cplx> data) const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  const auto& k = simd::active();
  for (std::size_t half = 1; half < n_; half <<= 1) {
    const cplx* w = twiddles_.data() + (half - 1);
    for (std::size_t start = 0; start < n_; start += 2 * half) {
      k.butterfly(data.data() + start, data.data() + start + half, w, half);
    }
  }
}

void Fft::bluestein(std::span<cplx> data) const {
  const auto& k = simd::active();
  const std::size_t m = inner_->size();
  std::vector<cplx> work(m, cplx{});
  k.complex_multiply(data.data(), chirp_.data(), work.data(), n_);
  inner_->forward(work);
  k.complex_multiply(work.data(), kernel_freq_.data(), work.data(), m);
  inner_->inverse(work);
  k.complex_multiply(work.data(), chirp_.data(), data.data(), n_);
}

std::shared_ptr<const Fft> Fft::cached(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const Fft>> plans;
  std::lock_guard lock(mutex);
  auto& slot = plans[n];
  if (!slot) {
    if (plans.size() > 64) {
      // Unbounded growth only happens with many distinct lengths; start over.
      plans.clear();
      return plans[n] = std::make_shared<const Fft>(n);
    }
    slot = std::make_shared<const Fft>(n);
  }
  return slot;
}

std::vector<cplx> fft_real(std::span<const double> x, std::size_t n_fft) {
  if (n_fft == 0) n_fft = x.size();
  if (n_fft < x.size()) throw SizeError("fft: n_fft shorter than input");
  std::vector<cplx> buf(n_fft, cplx{});
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = cplx(x[i], 0.0);
  Fft::cached(n_fft)->forward(buf);
  return buf;
}

std::vector<double> ifft_real(std::vector<cplx> spectrum) {
  Fft::cached(spectrum.size())->inverse(spectrum);
  std::vector<double> out(spectrum.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = spectrum[i].real();
  return out;
}

}  // namespace millenv
