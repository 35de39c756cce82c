#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "millenv/pipeline.hpp"
#include "millenv/signal.hpp"

namespace millenv {

/// Synthetic milling run.
///
/// Tooth i strikes at shaft angle 2 pi i / z of every revolution. Each strike
/// is an impulse of height gain_i * (1 + eccentricity * cos(angle)) exciting
/// a unit-energy damped oscillator at resonance_hz. Acceleration channels see
/// the ringing response, force channels a Hann-smoothed pulse train at the
/// nominal cutting force. Shaft angle is zero at each tacho pulse.
struct SimConfig {
  CutterSpec spec;
  std::optional<double> rpm;       // overrides spec.rpm()
  std::optional<double> rpm_end;   // linear speed ramp to this value (order-tracking tests)
  std::vector<double> per_tooth_gain;  // empty = all ones
  double resonance_hz = 2000.0;
  double damping_ratio = 0.03;
  double eccentricity = 0.0;
  double noise_rms = 0.0;
  double duration_s = 2.0;
  double sample_rate_hz = 25000.0;
  std::uint64_t seed = 1;
  /// Shaft angle at t = 0 as a fraction of a revolution; negative so the
  /// first tacho pulse falls inside the record.
  double start_angle_frac = -0.25;
  double force_pulse_s = 1e-3;          // Hann pulse length on force channels
  double specific_cutting_force = 2000.0;  // N/mm^2

  double resolved_rpm() const noexcept { return rpm.value_or(spec.rpm()); }
  std::vector<double> resolved_gains() const;
  /// Nominal per-tooth force: k_c * depth * feed per tooth.
  double nominal_force_n() const noexcept;
  /// Throws ConfigError when an invariant does not hold.
  void validate() const;
};

struct ToothImpact {
  std::size_t tooth;
  std::int64_t revolution;  // 0 = revolution starting at the first tacho pulse
  double time_s;
  double amplitude;  // gain * eccentricity modulation
};

struct SimTruth {
  std::vector<ToothImpact> impacts;
  std::vector<double> per_tooth_gain;
  std::vector<double> pulse_times_s;
  double rpm = 0.0;
};

struct SimOutput {
  std::vector<TimeSeries> channels;  // ax, ay, az, fx, fy, fz, tacho
  SimTruth truth;

  const TimeSeries& channel(ChannelKind kind) const;
};

/// Fixed per-direction sensitivities of the synthetic sensors.
double direction_gain(ChannelKind kind) noexcept;

/// Deterministic: the same config (seed included) gives bit-identical output.
SimOutput simulate(const SimConfig& cfg);

}  // namespace millenv
