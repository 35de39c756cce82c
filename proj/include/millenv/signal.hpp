#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace millenv {

/// Physical source of a sampled channel.
enum class ChannelKind { ax, ay, az, fx, fy, fz, tacho, hammer };

inline constexpr ChannelKind kAllChannelKinds[] = {
    ChannelKind::ax, ChannelKind::ay, ChannelKind::az,    ChannelKind::fx,
    ChannelKind::fy, ChannelKind::fz, ChannelKind::tacho, ChannelKind::hammer};

/// Channel label: one of the eight physical channels, optionally marked as
/// a derived envelope ("ax_env").
class Channel {
 public:
  constexpr Channel(ChannelKind kind, bool envelope = false) noexcept
      : kind_(kind), envelope_(envelope) {}

  /// Throws InputError for labels outside the fixed channel set.
  static Channel parse(std::string_view label);
  static std::optional<Channel> try_parse(std::string_view label) noexcept;

  constexpr ChannelKind kind() const noexcept { return kind_; }
  constexpr bool is_envelope() const noexcept { return envelope_; }
  constexpr Channel as_envelope() const noexcept { return {kind_, true}; }

  bool is_acceleration() const noexcept;
  bool is_force() const noexcept;
  std::string str() const;
  /// SI unit implied by the channel kind.
  std::string_view default_unit() const noexcept;

  friend constexpr bool operator==(Channel, Channel) = default;
  friend constexpr auto operator<=>(Channel, Channel) = default;

 private:
  ChannelKind kind_;
  bool envelope_;
};

/// Uniformly sampled real-valued channel.
///
/// Always holds at least one finite sample and a finite, positive sample
/// rate; the constructor throws InputError otherwise.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double sample_rate_hz, Channel channel,
             std::string unit = {});

  std::span<const double> samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return rate_; }
  Channel channel() const noexcept { return channel_; }
  const std::string& unit() const noexcept { return unit_; }

  std::size_t size() const noexcept { return samples_.size(); }
  double duration_s() const noexcept { return static_cast<double>(samples_.size()) / rate_; }
  double nyquist_hz() const noexcept { return 0.5 * rate_; }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

  /// Same rate, channel and unit with new samples.
  TimeSeries with_samples(std::vector<double> samples) const;
  TimeSeries with_channel(Channel channel) const;

 private:
  std::vector<double> samples_;
  double rate_;
  Channel channel_;
  std::string unit_;
};

/// One-sided amplitude spectrum. Bin k sits at k * df_hz.
struct Spectrum {
  std::vector<double> amplitudes;
  double df_hz = 0.0;
  std::string window;
  std::size_t n_fft = 0;

  std::size_t size() const noexcept { return amplitudes.size(); }
  double frequency(std::size_t bin) const noexcept { return static_cast<double>(bin) * df_hz; }
  /// Nearest bin to `hz`, clamped to the spectrum.
  std::size_t bin_of(double hz) const noexcept;
};

/// Signal sampled at uniform shaft-angle increments, revolution after revolution.
class AngularSeries {
 public:
  AngularSeries(std::vector<double> samples, std::size_t samples_per_rev);

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t samples_per_rev() const noexcept { return per_rev_; }
  std::size_t n_revs() const noexcept { return samples_.size() / per_rev_; }
  std::span<const double> revolution(std::size_t r) const noexcept {
    return std::span<const double>(samples_).subspan(r * per_rev_, per_rev_);
  }

 private:
  std::vector<double> samples_;
  std::size_t per_rev_;
};

/// Removes the mean. A mean already negligible against the signal RMS
/// (below 1e-13 relative) is left in place, so the operation is idempotent.
TimeSeries detrend(const TimeSeries& x);

/// Samples with time in [t0_s, t1_s). Throws RangeError outside [0, duration].
TimeSeries slice_time(const TimeSeries& x, double t0_s, double t1_s);

double rms(const TimeSeries& x);
double rms(std::span<const double> x);
double mean(std::span<const double> x);

}  // namespace millenv
