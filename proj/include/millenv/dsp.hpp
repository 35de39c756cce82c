#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "millenv/signal.hpp"

namespace millenv {

using cplx = std::complex<double>;

enum class WindowKind { rectangular, hann };

struct Window {
  WindowKind kind = WindowKind::rectangular;

  static constexpr Window rectangular() { return {WindowKind::rectangular}; }
  static constexpr Window hann() { return {WindowKind::hann}; }

  /// Nominal coherent gain (1.0 rectangular, 0.5 Hann). Amplitude correction
  /// uses the exact mean of the generated sequence, which tends to this value.
  double coherent_gain() const noexcept { return kind == WindowKind::hann ? 0.5 : 1.0; }
  std::string_view name() const noexcept;
  /// Symmetric window of length n (Hann endpoints are exactly zero).
  std::vector<double> generate(std::size_t n) const;

  static Window parse(std::string_view name);
};

/// Frequency band [f_lo_hz, f_hi_hz].
struct Band {
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;

  double width() const noexcept { return f_hi_hz - f_lo_hz; }
  double center() const noexcept { return 0.5 * (f_lo_hz + f_hi_hz); }
  bool contains(double hz) const noexcept { return hz >= f_lo_hz && hz <= f_hi_hz; }
  bool overlaps(const Band& o) const noexcept { return f_lo_hz <= o.f_hi_hz && o.f_lo_hz <= f_hi_hz; }

  /// Throws RangeError unless 0 <= lo < hi <= nyquist_hz.
  void validate(double nyquist_hz) const;
};

/// Default raised-cosine roll-off: 5% of the band width.
inline double default_taper(const Band& b) noexcept { return 0.05 * b.width(); }

struct SpectrumOptions {
  /// Zero-pad to the next power of two before the transform.
  bool pad_to_power_of_two = false;
};

/// One-sided amplitude spectrum, corrected for the window's coherent gain so
/// a bin-centred sinusoid reads its peak amplitude.
Spectrum amplitude_spectrum(const TimeSeries& x, Window w, SpectrumOptions opts = {});
Spectrum amplitude_spectrum(std::span<const double> x, double sample_rate_hz, Window w,
                            SpectrumOptions opts = {});

/// Zero-phase frequency-domain band-pass: unity over [f_lo, f_hi], zero
/// outside, raised-cosine skirts of width taper_hz just outside each edge.
/// An upper edge within half a bin of Nyquist passes the Nyquist bin.
TimeSeries band_filter(const TimeSeries& x, const Band& b, double taper_hz);

/// Gain applied by band_filter at frequency f.
double band_gain(double f_hz, const Band& b, double taper_hz, double nyquist_hz,
                 double df_hz) noexcept;

/// Analytic signal by the FFT method (one-sided spectrum doubling).
/// Odd-length input is padded with one zero which is dropped again.
std::vector<cplx> analytic_signal(const TimeSeries& x);
std::vector<cplx> analytic_signal(std::span<const double> x);

/// Magnitude of the analytic signal; channel marked as envelope.
TimeSeries envelope(const TimeSeries& x);

/// amplitude_spectrum(detrended envelope(band_filter(x, b, taper)), w).
Spectrum envelope_spectrum(const TimeSeries& x, const Band& b, double taper_hz, Window w);

/// Sub-bin estimate of a Hann-windowed spectral peak.
struct PeakEstimate {
  std::size_t bin = 0;
  double frequency_hz = 0.0;
  double amplitude = 0.0;
};

/// Largest local maximum within `search_bins` of the bin nearest to
/// `approx_hz`, refined with the Hann two-bin interpolation. The spectrum
/// must come from a Hann window.
PeakEstimate hann_peak(const Spectrum& s, double approx_hz, std::size_t search_bins = 2);

}  // namespace millenv
