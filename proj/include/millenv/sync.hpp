#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "millenv/signal.hpp"

namespace millenv {

/// Tachometer pulse times, one pulse per spindle revolution.
///
/// Construction enforces at least two strictly increasing pulses and every
/// gap within +-50% of the median gap; violations throw QualityError listing
/// the offending gaps.
class TachoTrack {
 public:
  explicit TachoTrack(std::vector<double> pulse_times_s);

  std::span<const double> pulse_times_s() const noexcept { return pulses_; }
  std::size_t pulse_count() const noexcept { return pulses_.size(); }
  std::size_t revolutions() const noexcept { return pulses_.size() - 1; }
  /// 60 / median gap.
  double nominal_rpm() const noexcept { return nominal_rpm_; }
  /// Revolutions divided by elapsed time between first and last pulse.
  double mean_rpm() const noexcept;

 private:
  std::vector<double> pulses_;
  double nominal_rpm_;
};

struct SpeedSample {
  double time_s;
  double rpm;
};

/// Schmitt-trigger rising-edge detector. The detector re-arms once the signal
/// falls below threshold - hysteresis; crossing times are interpolated
/// linearly between the bracketing samples.
/// Throws DetectionError when fewer than two pulses are found.
TachoTrack detect_pulses(const TimeSeries& tacho, double threshold, double hysteresis);

/// Raw rising-edge times without the gap-consistency check.
std::vector<double> find_rising_edges(std::span<const double> x, double sample_rate_hz,
                                      double threshold, double hysteresis);

/// One entry per revolution: gap midpoint and 60 / gap.
std::vector<SpeedSample> speed_profile(const TachoTrack& t);

/// Order tracking. Each revolution between consecutive pulses is mapped
/// linearly onto samples_per_rev uniform angles and x is read there with
/// 4-point cubic (Lagrange) interpolation. Revolutions not fully covered by
/// x are skipped; zero covered revolutions throws CoverageError.
AngularSeries resample_to_angle(const TimeSeries& x, const TachoTrack& t,
                                std::size_t samples_per_rev);

/// Pointwise mean across revolutions.
std::vector<double> synchronous_average(const AngularSeries& a);

struct ToothProfile {
  std::size_t z = 0;
  std::vector<double> mean_load;        // RMS of the averaged envelope per sector
  std::vector<double> peak_load;        // max |value| per sector
  std::vector<double> asymmetry_index;  // mean_load / mean(mean_load) - 1
};

/// Splits one averaged revolution into z equal sectors, the first starting at
/// tooth0_offset_frac of a revolution. Offsets are accepted anywhere in
/// [0, 1); shifting by 1/z relabels the teeth by one.
/// Throws SizeError when the length is not divisible by z.
ToothProfile tooth_segmentation(std::span<const double> avg_rev, std::size_t z,
                                double tooth0_offset_frac);

}  // namespace millenv
