#include "millenv/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "millenv/error.hpp"
#include "millenv/fft.hpp"
#include "millenv/simd/kernels.hpp"

namespace millenv {

std::string_view Window::name() const noexcept {
  return kind == WindowKind::hann ? "hann" : "rectangular";
}

std::vector<double> Window::generate(std::size_t n) const {
  std::vector<double> w(n, 1.0);
  if (kind == WindowKind::hann && n > 1) {
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom);
    }
    w.front() = 0.0;
    w.back() = 0.0;
  }
  return w;
}

Window Window::parse(std::string_view name) {
  if (name == "hann") return hann();
  if (name == "rectangular" || name == "rect") return rectangular();
  throw ConfigError("unknown window '" + std::string(name) + "' (expected hann or rectangular)");
}

void Band::validate(double nyquist_hz) const {
  char buf[192];
  if (!(f_lo_hz >= 0.0) || !(f_hi_hz > f_lo_hz)) {
    std::snprintf(buf, sizeof buf, "band [%.6g, %.6g] Hz: need 0 <= f_lo < f_hi", f_lo_hz, f_hi_hz);
    throw RangeError(buf);
  }
  if (f_hi_hz > nyquist_hz * (1.0 + 1e-12)) {
    std::snprintf(buf, sizeof buf, "band [%.6g, %.6g] Hz exceeds Nyquist %.6g Hz", f_lo_hz, f_hi_hz,
                  nyquist_hz);
    throw RangeError(buf);
  }
}

Spectrum amplitude_spectrum(std::span<const double> x, double sample_rate_hz, Window w,
                            SpectrumOptions opts) {
  if (x.size() < 2) throw SizeError("amplitude spectrum needs at least 2 samples");
  const std::size_t n = x.size();
  const std::size_t n_fft = opts.pad_to_power_of_two ? next_power_of_two(n) : n;

  const auto win = w.generate(n);
  double win_sum = 0.0;
  std::vector<double> xw(n);
  for (std::size_t i = 0; i < n; ++i) {
    xw[i] = x[i] * win[i];
    win_sum += win[i];
  }
  const auto spec = fft_real(xw, n_fft);

  Spectrum out;
  out.n_fft = n_fft;
  out.df_hz = sample_rate_hz / static_cast<double>(n_fft);
  out.window = std::string(w.name());
  out.amplitudes.resize(n_fft / 2 + 1);
  simd::active().magnitude(spec.data(), out.amplitudes.data(), out.amplitudes.size());
  const double edge = 1.0 / win_sum;
  const double interior = 2.0 / win_sum;
  for (std::size_t k = 0; k < out.amplitudes.size(); ++k) {
    const bool unpaired = k == 0 || (n_fft % 2 == 0 && k == n_fft / 2);
    out.amplitudes[k] *= unpaired ? edge : interior;
  }
  return out;
}

Spectrum amplitude_spectrum(const TimeSeries& x, Window w, SpectrumOptions opts) {
  return amplitude_spectrum(x.samples(), x.sample_rate_hz(), w, opts);
}

double band_gain(double f, const Band& b, double taper, double nyquist, double df) noexcept {
  double hi = b.f_hi_hz;
  if (hi >= nyquist - 0.5 * df) hi = std::max(hi, nyquist);
  if (f >= b.f_lo_hz && f <= hi) return 1.0;
  if (taper <= 0.0) return 0.0;
  if (f < b.f_lo_hz && f > b.f_lo_hz - taper) {
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (b.f_lo_hz - f) / taper));
  }
  if (f > hi && f < hi + taper) {
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (f - hi) / taper));
  }
  return 0.0;
}

TimeSeries band_filter(const TimeSeries& x, const Band& b, double taper_hz) {
  b.validate(x.nyquist_hz());
  if (!(taper_hz >= 0.0) || taper_hz > 0.5 * b.width() * (1.0 + 1e-12)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "taper %.6g Hz outside [0, %.6g] Hz", taper_hz, 0.5 * b.width());
    throw RangeError(buf);
  }
  const std::size_t n = x.size();
  auto spec = fft_real(x.samples());
  const double df = x.sample_rate_hz() / static_cast<double>(n);
  std::vector<double> gain(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t mirrored = k <= n / 2 ? k : n - k;
    gain[k] = band_gain(static_cast<double>(mirrored) * df, b, taper_hz, x.nyquist_hz(), df);
  }
  simd::active().scale_by_real(spec.data(), gain.data(), n);
  return x.with_samples(ifft_real(std::move(spec)));
}

std::vector<cplx> analytic_signal(std::span<const double> x) {
  if (x.size() < 4) throw SizeError("analytic signal needs at least 4 samples");
  const std::size_t n = x.size() + (x.size() % 2);
  auto spec = fft_real(x, n);
  std::vector<double> h(n, 0.0);
  h[0] = 1.0;
  h[n / 2] = 1.0;
  for (std::size_t k = 1; k < n / 2; ++k) h[k] = 2.0;
  simd::active().scale_by_real(spec.data(), h.data(), n);
  Fft::cached(n)->inverse(spec);
  spec.resize(x.size());
  return spec;
}

std::vector<cplx> analytic_signal(const TimeSeries& x) { return analytic_signal(x.samples()); }

TimeSeries envelope(const TimeSeries& x) {
  const auto z = analytic_signal(x);
  std::vector<double> env(z.size());
  simd::active().magnitude(z.data(), env.data(), z.size());
  return TimeSeries(std::move(env), x.sample_rate_hz(), x.channel().as_envelope(), x.unit());
}

Spectrum envelope_spectrum(const TimeSeries& x, const Band& b, double taper_hz, Window w) {
  return amplitude_spectrum(detrend(envelope(band_filter(x, b, taper_hz))), w);
}

PeakEstimate hann_peak(const Spectrum& s, double approx_hz, std::size_t search_bins) {
  if (s.size() < 3) throw SizeError("peak search needs at least 3 bins");
  const std::size_t center = s.bin_of(approx_hz);
  const std::size_t lo = center > search_bins ? center - search_bins : 1;
  const std::size_t hi = std::min(center + search_bins, s.size() - 2);
  std::size_t k = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (s.amplitudes[i] > s.amplitudes[k]) k = i;
  }
  PeakEstimate p{k, s.frequency(k), s.amplitudes[k]};
  const double a = s.amplitudes[k];
  if (a <= 0.0) return p;
  const double left = s.amplitudes[k - 1], right = s.amplitudes[k + 1];
  const double ratio = std::max(left, right) / a;
  // Hann main lobe: adjacent-bin ratio (1 + d) / (2 - d) for offset d.
  double d = (2.0 * ratio - 1.0) / (ratio + 1.0);
  d = std::clamp(d, 0.0, 0.5);
  if (left > right) d = -d;
  const double ad = std::abs(d);
  const double correction =
      ad < 1e-12 ? 1.0 : (1.0 - ad * ad) * std::numbers::pi * ad / std::sin(std::numbers::pi * ad);
  p.frequency_hz = (static_cast<double>(k) + d) * s.df_hz;
  p.amplitude = a * correction;
  return p;
}

}  // namespace millenv
