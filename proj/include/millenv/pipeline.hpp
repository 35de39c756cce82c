#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "millenv/dsp.hpp"
#include "millenv/error.hpp"
#include "millenv/signal.hpp"
#include "millenv/sync.hpp"

namespace millenv {

inline constexpr double kMachineMaxRpm = 8000.0;

/// Milling cutter and cutting conditions.
struct CutterSpec {
  std::size_t z = 6;
  double diameter_mm = 80.0;
  double feed_per_tooth_mm = 0.1;
  double cutting_speed_m_min = 340.0;
  double depth_of_cut_mm = 0.5;  // run metadata only

  /// N = 1000 * v_c / (pi * D).
  double rpm() const noexcept;
  /// Throws ConfigError on non-positive fields or N above kMachineMaxRpm.
  void validate() const;
};

/// (rpm / 60) * z. Throws RangeError for rpm <= 0 or z == 0.
double tooth_passing_frequency(double rpm, std::size_t z);
double tooth_passing_frequency(const CutterSpec& spec);

/// Classifier and coverage thresholds. All ratios are scale free.
struct Thresholds {
  double asym_ratio = 0.2;
  double weak_tooth_drop = 0.3;
  double ecc_ratio = 0.2;
  double misalign_ratio = 0.2;
  double min_carrier = 10.0;  // carrier must exceed this multiple of the median bin in (0, 2 z f_rot]
  std::size_t min_revs = 20;
  double max_rpm_drift = 0.05;

  void validate() const;
};

struct SyncConfig {
  /// 0 selects the default: 1024 rounded up to a multiple of the tooth count.
  std::size_t samples_per_rev = 0;
  double tooth0_offset_frac = 0.0;

  std::size_t resolved_samples_per_rev(std::size_t z) const noexcept;
};

struct AnalysisConfig {
  Thresholds thresholds;
  SyncConfig sync;
  double taper_fraction = 0.05;  // of band width
  /// Also compute the Hann spectrum of the raw (time-domain) envelope.
  bool raw_envelope_spectrum = false;
};

enum class FindingKind { tooth_asymmetry, weak_tooth, imbalance_or_eccentricity, misalignment };

std::string_view to_string(FindingKind kind) noexcept;

struct Finding {
  FindingKind kind{};
  double evidence_freq_hz = 0.0;
  double amplitude_ratio = 0.0;
  double threshold = 0.0;
  /// amplitude_ratio >= threshold and not gated.
  bool triggered = false;
  /// Set when a precondition of the signature rules the finding out even
  /// though the ratio reached the threshold (see `note`).
  bool gated = false;
  std::optional<std::size_t> tooth;
  std::string note;
};

struct Classification {
  std::vector<Finding> findings;
  bool inconclusive = false;
  std::string status;
  double carrier_amplitude = 0.0;
  double noise_floor = 0.0;
};

struct DefectReport {
  Channel channel{ChannelKind::ax};
  double f_rot_hz = 0.0;
  double f_tooth_hz = 0.0;
  double mean_rpm = 0.0;
  std::size_t n_revs = 0;
  std::size_t samples_per_rev = 0;
  Band band;
  Classification classification;
  ToothProfile tooth_profile;
  std::vector<std::string> warnings;

  bool any_triggered() const noexcept;
};

struct ChannelAnalysis {
  DefectReport report;
  /// Order-tracked envelope spectrum in Hz (rectangular window, integer
  /// revolutions). Bins at multiples of n_revs are the orders of the
  /// synchronously averaged revolution.
  Spectrum envelope_spectrum;
  std::vector<double> averaged_revolution;
  TimeSeries envelope;
  std::optional<Spectrum> raw_envelope_spectrum;
};

/// Amplitude at `hz`: the largest bin within +-1 bin. Returns {amplitude, bin}.
std::pair<double, std::size_t> read_amplitude(const Spectrum& s, double hz) noexcept;

/// Defect signatures from an envelope spectrum and tooth profile.
/// Throws RangeError when f_rot < 3 * df.
Classification classify(const Spectrum& env_spec, const ToothProfile& profile, double f_rot_hz,
                        std::size_t z, const Thresholds& cfg);

/// detrend -> band_filter -> envelope -> resample_to_angle -> synchronous
/// average -> tooth profile + order spectrum -> classify.
/// Throws CoverageError below cfg.thresholds.min_revs revolutions.
ChannelAnalysis analyze(const TimeSeries& x, const TachoTrack& tacho, const CutterSpec& spec,
                        const Band& band, const AnalysisConfig& cfg);

struct ChannelOutcome {
  std::optional<ChannelAnalysis> analysis;
  std::optional<ErrorKind> error_kind;
  std::string error;

  bool ok() const noexcept { return analysis.has_value(); }
};

/// analyze() per channel with per-channel bands. Tacho and hammer channels
/// are skipped. A failing channel records its error and does not stop the
/// others.
std::map<Channel, ChannelOutcome> analyze_all_channels(std::span<const TimeSeries> channels,
                                                       const TachoTrack& tacho,
                                                       const CutterSpec& spec,
                                                       const std::map<Channel, Band>& bands,
                                                       const AnalysisConfig& cfg);

}  // namespace millenv
