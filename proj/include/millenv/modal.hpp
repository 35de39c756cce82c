#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "millenv/dsp.hpp"
#include "millenv/signal.hpp"

namespace millenv {

/// One hammer hit: force (hammer channel) and the response it produced.
/// Rates and lengths must match and the force must be non-zero.
struct ImpactRecord {
  TimeSeries force;
  TimeSeries response;

  ImpactRecord(TimeSeries force, TimeSeries response);
};

/// Leakage control applied to each record before the spectra are averaged.
struct ImpactWindowing {
  /// Keep the force only from the pre-trigger point until it has decayed
  /// below 1% of its peak; zero elsewhere.
  bool force_gate = true;
  /// Exponential window on the response, starting at the force peak and
  /// reaching this fraction at the last sample. 1.0 disables it.
  double response_end_level = 0.05;

  static ImpactWindowing none() { return {false, 1.0}; }
};

struct Frf {
  std::vector<std::complex<double>> h1;
  std::vector<double> coherence;
  double df_hz = 0.0;
  std::size_t averages = 0;
  /// Coherence of a single average is identically 1 and carries no information.
  bool degenerate_coherence = false;
  /// Decay rate added by the exponential response window (1/s, mean over
  /// records); subtract sigma / (2 pi f_n) from identified damping ratios.
  double window_decay_per_s = 0.0;

  std::size_t size() const noexcept { return h1.size(); }
  double frequency(std::size_t k) const noexcept { return static_cast<double>(k) * df_hz; }
  double magnitude(std::size_t k) const noexcept { return std::abs(h1[k]); }
};

/// H1 = averaged cross-spectrum(force, response) / averaged force auto-spectrum,
/// with coherence |Sfx|^2 / (Sff Sxx). One-sided bins 0..N/2.
/// Throws InputError on mismatched records or zero force energy.
Frf estimate_frf(std::span<const ImpactRecord> impacts, const ImpactWindowing& w = {});

struct BandProposal {
  std::vector<Band> bands;
  std::vector<double> peak_hz;
  std::string status;
};

/// Resonance bands from the n_bands highest |H1| peaks with coherence at
/// least min_coherence. A peak qualifies only if |H1| falls below its
/// half-power level on both sides; the band spans those -3 dB points,
/// widened to at least 10 bins. Bands are disjoint and sorted by peak
/// magnitude (ties: lower frequency first).
BandProposal propose_bands(const Frf& frf, std::size_t n_bands, double min_coherence = 0.9);

struct TriggerOptions {
  double level_frac = 0.05;     // of the hammer full-scale (max |force|)
  double pretrigger_frac = 0.1; // of the record length
};

/// Cuts a continuous hammer/response recording into one record per hit.
/// Hits whose record would run past the end of the data are dropped.
std::vector<ImpactRecord> split_impacts(const TimeSeries& force, const TimeSeries& response,
                                        std::size_t record_len, const TriggerOptions& opts = {});

}  // namespace millenv
