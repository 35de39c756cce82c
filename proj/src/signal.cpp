#include "millenv/signal.hpp"

#include <cmath>
#include <string>

#include "millenv/error.hpp"
#include "millenv/simd/kernels.hpp"

namespace millenv {

namespace {

constexpr std::string_view kNames[] = {"ax", "ay", "az", "fx", "fy", "fz", "tacho", "hammer"};
constexpr std::string_view kEnvSuffix = "_env";

// Neumaier-compensated sum; keeps the mean accurate to a few ulps so that
// detrend's residual stays far below its skip threshold.
double compensated_sum(std::span<const double> x) {
  double sum = 0.0, c = 0.0;
  for (double v : x) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

}  // namespace

std::optional<Channel> Channel::try_parse(std::string_view label) noexcept {
  bool env = false;
  if (label.size() > kEnvSuffix.size() && label.ends_with(kEnvSuffix)) {
    env = true;
    label.remove_suffix(kEnvSuffix.size());
  }
  for (std::size_t i = 0; i < std::size(kNames); ++i) {
    if (label == kNames[i]) return Channel(kAllChannelKinds[i], env);
  }
  return std::nullopt;
}

Channel Channel::parse(std::string_view label) {
  if (auto c = try_parse(label)) return *c;
  throw InputError("unknown channel label '" + std::string(label) +
                   "' (expected one of ax, ay, az, fx, fy, fz, tacho, hammer)");
}

bool Channel::is_acceleration() const noexcept {
  return kind_ == ChannelKind::ax || kind_ == ChannelKind::ay || kind_ == ChannelKind::az;
}

bool Channel::is_force() const noexcept {
  return kind_ == ChannelKind::fx || kind_ == ChannelKind::fy || kind_ == ChannelKind::fz ||
         kind_ == ChannelKind::hammer;
}

std::string Channel::str() const {
  std::string s(kNames[static_cast<std::size_t>(kind_)]);
  if (envelope_) s += kEnvSuffix;
  return s;
}

std::string_view Channel::default_unit() const noexcept {
  if (is_acceleration()) return "m/s^2";
  if (is_force()) return "N";
  return "V";
}

TimeSeries::TimeSeries(std::vector<double> samples, double sample_rate_hz, Channel channel,
                       std::string unit)
    : samples_(std::move(samples)), rate_(sample_rate_hz), channel_(channel), unit_(std::move(unit)) {
  if (samples_.empty()) throw InputError("time series: no samples");
  if (!std::isfinite(rate_) || rate_ <= 0.0) {
    throw InputError("time series: sample rate must be finite and positive");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw InputError("time series " + channel_.str() + ": non-finite sample at index " +
                       std::to_string(i));
    }
  }
  if (unit_.empty()) unit_ = std::string(channel_.default_unit());
}

TimeSeries TimeSeries::with_samples(std::vector<double> samples) const {
  return TimeSeries(std::move(samples), rate_, channel_, unit_);
}

TimeSeries TimeSeries::with_channel(Channel channel) const {
  return TimeSeries(samples_, rate_, channel, unit_);
}

std::size_t Spectrum::bin_of(double hz) const noexcept {
  if (amplitudes.empty() || df_hz <= 0.0 || !(hz > 0.0)) return 0;
  const double k = std::round(hz / df_hz);
  const double last = static_cast<double>(amplitudes.size() - 1);
  return static_cast<std::size_t>(k > last ? last : k);
}

AngularSeries::AngularSeries(std::vector<double> samples, std::size_t samples_per_rev)
    : samples_(std::move(samples)), per_rev_(samples_per_rev) {
  if (per_rev_ == 0) throw SizeError("angular series: samples_per_rev must be positive");
  if (samples_.empty() || samples_.size() % per_rev_ != 0) {
    throw SizeError("angular series: length must be a positive multiple of samples_per_rev");
  }
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return compensated_sum(x) / static_cast<double>(x.size());
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::sqrt(simd::active().sum_squares(x.data(), x.size()) / static_cast<double>(x.size()));
}

double rms(const TimeSeries& x) { return rms(x.samples()); }

TimeSeries detrend(const TimeSeries& x) {
  const double m = mean(x.samples());
  if (std::abs(m) <= 1e-13 * rms(x)) return x;
  std::vector<double> out(x.samples().begin(), x.samples().end());
  for (double& v : out) v -= m;
  return x.with_samples(std::move(out));
}

TimeSeries slice_time(const TimeSeries& x, double t0_s, double t1_s) {
  const double dur = x.duration_s();
  if (!(t0_s >= 0.0) || !(t1_s > t0_s) || !(t1_s <= dur * (1.0 + 1e-12))) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "slice [%.9g, %.9g) outside valid interval [0, %.9g] s", t0_s,
                  t1_s, dur);
    throw RangeError(buf);
  }
  // Sample i sits at i / rate; the epsilon absorbs representation error of
  // bounds that lie on the sample grid.
  constexpr double eps = 1e-9;
  const double rate = x.sample_rate_hz();
  const auto first = static_cast<std::size_t>(std::ceil(t0_s * rate - eps));
  auto last = static_cast<std::size_t>(std::ceil(t1_s * rate - eps));
  if (last > x.size()) last = x.size();
  if (last <= first) throw RangeError("slice contains no samples");
  auto s = x.samples();
  return x.with_samples(std::vector<double>(s.begin() + first, s.begin() + last));
}

}  // namespace millenv
