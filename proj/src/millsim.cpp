#include "millenv/millsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "millenv/error.hpp"

namespace millenv {

namespace {

constexpr double kTachoHigh = 5.0;
constexpr double kTachoDuty = 0.1;  // pulse width as a fraction of a revolution
constexpr double kTailTimeConstants = 20.0;

// Shaft angle in revolutions: phi(t) = phi0 + f0 t + a t^2 / 2.
struct Kinematics {
  double phi0, f0, accel;

  double angle(double t) const noexcept { return phi0 + f0 * t + 0.5 * accel * t * t; }
  // Inverse of angle(); stable form of the quadratic root.
  double time_at(double phi) const noexcept {
    const double d = phi - phi0;
    if (accel == 0.0) return d / f0;
    const double disc = std::max(0.0, f0 * f0 + 2.0 * accel * d);
    return 2.0 * d / (f0 + std::sqrt(disc));
  }
};

double ramp(double v) noexcept { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::vector<double> SimConfig::resolved_gains() const {
  if (per_tooth_gain.empty()) return std::vector<double>(spec.z, 1.0);
  return per_tooth_gain;
}

double SimConfig::nominal_force_n() const noexcept {
  return specific_cutting_force * spec.depth_of_cut_mm * spec.feed_per_tooth_mm;
}

void SimConfig::validate() const {
  if (spec.z == 0) throw ConfigError("simulation: tooth count must be at least 1");
  const double r = resolved_rpm();
  if (!(r > 0.0) || r > kMachineMaxRpm) throw ConfigError("simulation: rpm must lie in (0, 8000]");
  if (rpm_end && (!(*rpm_end > 0.0) || *rpm_end > kMachineMaxRpm)) {
    throw ConfigError("simulation: rpm_end must lie in (0, 8000]");
  }
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw ConfigError("simulation: sample rate must be positive");
  }
  if (!(resonance_hz > 0.0) || !(resonance_hz < 0.4 * sample_rate_hz)) {
    throw ConfigError("simulation: resonance must lie in (0, 0.4 x sample rate)");
  }
  if (!(damping_ratio > 0.0 && damping_ratio < 1.0)) {
    throw ConfigError("simulation: damping ratio must lie in (0, 1)");
  }
  if (!per_tooth_gain.empty() && per_tooth_gain.size() != spec.z) {
    throw ConfigError("simulation: per_tooth_gain needs exactly z = " + std::to_string(spec.z) + " entries");
  }
  for (double g : per_tooth_gain) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw ConfigError("simulation: tooth gains must be finite and >= 0");
  }
  if (!(eccentricity >= 0.0)) throw ConfigError("simulation: eccentricity must be >= 0");
  if (!(noise_rms >= 0.0)) throw ConfigError("simulation: noise_rms must be >= 0");
  if (!(duration_s > 0.0)) throw ConfigError("simulation: duration must be positive");
  if (!(force_pulse_s > 0.0)) throw ConfigError("simulation: force pulse length must be positive");
}

double direction_gain(ChannelKind kind) noexcept {
  switch (kind) {
    case ChannelKind::ax: return 1.0;
    case ChannelKind::ay: return 0.8;
    case ChannelKind::az: return 0.5;
    case ChannelKind::fx: return 1.0;
    case ChannelKind::fy: return 0.7;
    case ChannelKind::fz: return 0.4;
    default: return 0.0;
  }
}

const TimeSeries& SimOutput::channel(ChannelKind kind) const {
  for (const auto& c : channels) {
    if (c.channel().kind() == kind) return c;
  }
  throw InputError("simulation output has no such channel");
}

SimOutput simulate(const SimConfig& cfg) {
  cfg.validate();
  const double fs = cfg.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(cfg.duration_s * fs));
  if (n < 4) throw ConfigError("simulation: duration shorter than 4 samples");
  const double duration = static_cast<double>(n) / fs;
  const std::size_t z = cfg.spec.z;
  const auto gains = cfg.resolved_gains();

  const double f0 = cfg.resolved_rpm() / 60.0;
  const double f1 = cfg.rpm_end.value_or(cfg.resolved_rpm()) / 60.0;
  const Kinematics kin{cfg.start_angle_frac, f0, (f1 - f0) / duration};

  // Unit-energy damped oscillator impulse response.
  const double wn = 2.0 * std::numbers::pi * cfg.resonance_hz;
  const double sigma = cfg.damping_ratio * wn;
  const double wd = wn * std::sqrt(1.0 - cfg.damping_ratio * cfg.damping_ratio);
  const double energy = wd * wd / (4.0 * sigma * (sigma * sigma + wd * wd));
  const double norm = 1.0 / std::sqrt(energy);
  const double tail = kTailTimeConstants / sigma;

  constexpr ChannelKind accel_kinds[] = {ChannelKind::ax, ChannelKind::ay, ChannelKind::az};
  constexpr ChannelKind force_kinds[] = {ChannelKind::fx, ChannelKind::fy, ChannelKind::fz};
  std::vector<std::vector<double>> accel(3, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> force(3, std::vector<double>(n, 0.0));
  std::vector<double> tacho(n, 0.0);

  SimTruth truth;
  truth.per_tooth_gain = gains;
  truth.rpm = cfg.resolved_rpm();

  const double phi_start = kin.angle(-tail);
  const double phi_end = kin.angle(duration);
  const double f_nom = cfg.nominal_force_n();
  const double pulse = cfg.force_pulse_s;
  std::vector<double> shape;

  for (auto k = static_cast<std::int64_t>(std::floor(phi_start)); static_cast<double>(k) <= phi_end; ++k) {
    for (std::size_t i = 0; i < z; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(z);
      const double t_hit = kin.time_at(static_cast<double>(k) + frac);
      if (t_hit < -tail || t_hit >= duration) continue;
      const double amp = gains[i] * (1.0 + cfg.eccentricity * std::cos(2.0 * std::numbers::pi * frac));
      if (t_hit >= 0.0) truth.impacts.push_back({i, k, t_hit, amp});
      if (amp == 0.0) continue;

      // Vibration: ringing response sampled on the grid from the impact on.
      const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil(t_hit * fs)));
      const auto stop = static_cast<std::size_t>(
          std::clamp(std::ceil((t_hit + tail) * fs), 0.0, static_cast<double>(n)));
      if (first < stop) {
        shape.resize(stop - first);
        for (std::size_t s = first; s < stop; ++s) {
          const double dt = static_cast<double>(s) / fs - t_hit;
          shape[s - first] = amp * norm * std::exp(-sigma * dt) * std::sin(wd * dt);
        }
        for (std::size_t c = 0; c < 3; ++c) {
          const double g = direction_gain(accel_kinds[c]);
          for (std::size_t s = first; s < stop; ++s) accel[c][s] += g * shape[s - first];
        }
      }

      // Force: Hann pulse starting at the impact.
      const auto pf = static_cast<std::size_t>(std::max(0.0, std::ceil(t_hit * fs)));
      const auto pe = static_cast<std::size_t>(
          std::clamp(std::ceil((t_hit + pulse) * fs), 0.0, static_cast<double>(n)));
      for (std::size_t s = pf; s < pe; ++s) {
        const double u = (static_cast<double>(s) / fs - t_hit) / pulse;
        const double p = std::sin(std::numbers::pi * u);
        for (std::size_t c = 0; c < 3; ++c) force[c][s] += amp * f_nom * direction_gain(force_kinds[c]) * p * p;
      }
    }

    // Tacho: rising edge at the revolution start, width kTachoDuty. Edges are
    // linear over +-1 sample so mid-level interpolation recovers them exactly.
    const double t_rise = kin.time_at(static_cast<double>(k));
    const double t_fall = kin.time_at(static_cast<double>(k) + kTachoDuty);
    if (t_fall < -1.0 / fs || t_rise > duration) continue;
    if (t_rise >= 0.0 && t_rise < duration) truth.pulse_times_s.push_back(t_rise);
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(t_rise * fs) - 1.0));
    const auto hi = static_cast<std::size_t>(std::min<double>(static_cast<double>(n), std::ceil(t_fall * fs) + 2.0));
    for (std::size_t s = lo; s < hi; ++s) {
      const double t = static_cast<double>(s) / fs;
      const double level = ramp((t - t_rise) * fs * 0.5 + 0.5) - ramp((t - t_fall) * fs * 0.5 + 0.5);
      tacho[s] += kTachoHigh * level;
    }
  }

  if (cfg.noise_rms > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, cfg.noise_rms);
    for (auto& ch : accel) for (double& v : ch) v += noise(rng);
    for (auto& ch : force) for (double& v : ch) v += noise(rng);
  }

  SimOutput out;
  for (std::size_t c = 0; c < 3; ++c) out.channels.emplace_back(std::move(accel[c]), fs, Channel(accel_kinds[c]));
  for (std::size_t c = 0; c < 3; ++c) out.channels.emplace_back(std::move(force[c]), fs, Channel(force_kinds[c]));
  out.channels.emplace_back(std::move(tacho), fs, Channel(ChannelKind::tacho));
  out.truth = std::move(truth);
  return out;
}

}  // namespace millenv
