#include "millenv/sync.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "millenv/error.hpp"
#include "millenv/simd/kernels.hpp"

namespace millenv {

namespace {

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

// 4-point Lagrange interpolation of x at fractional sample position u.
double cubic_at(std::span<const double> x, double u) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  auto base = static_cast<std::ptrdiff_t>(std::floor(u)) - 1;
  base = std::clamp<std::ptrdiff_t>(base, 0, n - 4);
  const double s = u - static_cast<double>(base);
  const double* p = x.data() + base;
  const double w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  const double w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
  const double w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
  const double w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
  return w0 * p[0] + w1 * p[1] + w2 * p[2] + w3 * p[3];
}

}  // namespace

TachoTrack::TachoTrack(std::vector<double> pulse_times_s) : pulses_(std::move(pulse_times_s)) {
  if (pulses_.size() < 2) throw DetectionError("tacho track needs at least 2 pulses");
  std::vector<double> gaps(pulses_.size() - 1);
  for (std::size_t i = 0; i + 1 < pulses_.size(); ++i) {
    gaps[i] = pulses_[i + 1] - pulses_[i];
    if (!(gaps[i] > 0.0) || !std::isfinite(gaps[i])) {
      throw InputError("tacho pulse times must be finite and strictly increasing (pulse " +
                       std::to_string(i + 1) + ")");
    }
  }
  const double med = median_of(gaps);
  std::vector<GapViolation> bad;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] < 0.5 * med || gaps[i] > 1.5 * med) bad.push_back({i, gaps[i], med});
  }
  if (!bad.empty()) throw QualityError(std::move(bad));
  nominal_rpm_ = 60.0 / med;
}

double TachoTrack::mean_rpm() const noexcept {
  return 60.0 * static_cast<double>(revolutions()) / (pulses_.back() - pulses_.front());
}

std::vector<double> find_rising_edges(std::span<const double> x, double sample_rate_hz,
                                      double threshold, double hysteresis) {
  std::vector<double> edges;
  if (x.empty()) return edges;
  const double rearm = threshold - hysteresis;
  bool armed = x[0] < rearm;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (armed && x[i] >= threshold) {
      const double prev = x[i - 1];
      const double frac = (threshold - prev) / (x[i] - prev);
      edges.push_back((static_cast<double>(i - 1) + frac) / sample_rate_hz);
      armed = false;
    } else if (!armed && x[i] < rearm) {
      armed = true;
    }
  }
  return edges;
}

TachoTrack detect_pulses(const TimeSeries& tacho, double threshold, double hysteresis) {
  if (!(hysteresis > 0.0)) throw RangeError("tacho hysteresis must be positive");
  auto edges = find_rising_edges(tacho.samples(), tacho.sample_rate_hz(), threshold, hysteresis);
  if (edges.size() < 2) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "found %zu tacho pulse(s) at threshold %.6g; need at least 2",
                  edges.size(), threshold);
    throw DetectionError(buf);
  }
  return TachoTrack(std::move(edges));
}

std::vector<SpeedSample> speed_profile(const TachoTrack& t) {
  const auto p = t.pulse_times_s();
  std::vector<SpeedSample> out;
  out.reserve(p.size() - 1);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    out.push_back({0.5 * (p[i] + p[i + 1]), 60.0 / (p[i + 1] - p[i])});
  }
  return out;
}

AngularSeries resample_to_angle(const TimeSeries& x, const TachoTrack& t,
                                std::size_t samples_per_rev) {
  if (samples_per_rev < 2) throw SizeError("samples_per_rev must be at least 2");
  if (x.size() < 4) throw CoverageError("signal too short for cubic resampling (< 4 samples)");
  const double rate = x.sample_rate_hz();
  const double t_end = static_cast<double>(x.size() - 1) / rate;
  const auto p = t.pulse_times_s();

  std::vector<double> out;
  out.reserve((p.size() - 1) * samples_per_rev);
  for (std::size_t r = 0; r + 1 < p.size(); ++r) {
    if (p[r] < 0.0 || p[r + 1] > t_end) continue;
    const double span = p[r + 1] - p[r];
    for (std::size_t j = 0; j < samples_per_rev; ++j) {
      const double tj = p[r] + span * static_cast<double>(j) / static_cast<double>(samples_per_rev);
      out.push_back(cubic_at(x.samples(), tj * rate));
    }
  }
  if (out.empty()) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "no complete revolution inside the signal (signal %.6g s, first gap %.6g s)",
                  x.duration_s(), p[1] - p[0]);
    throw CoverageError(buf);
  }
  return AngularSeries(std::move(out), samples_per_rev);
}

std::vector<double> synchronous_average(const AngularSeries& a) {
  const std::size_t per_rev = a.samples_per_rev();
  std::vector<double> acc(per_rev, 0.0);
  const auto& k = simd::active();
  for (std::size_t r = 0; r < a.n_revs(); ++r) k.accumulate(acc.data(), a.revolution(r).data(), per_rev);
  const auto n = static_cast<double>(a.n_revs());
  for (double& v : acc) v /= n;
  return acc;
}

ToothProfile tooth_segmentation(std::span<const double> avg_rev, std::size_t z,
                                double tooth0_offset_frac) {
  if (z == 0) throw SizeError("tooth count must be at least 1");
  const std::size_t len = avg_rev.size();
  if (len == 0 || len % z != 0) {
    throw SizeError("averaged revolution length " + std::to_string(len) +
                    " is not divisible by z = " + std::to_string(z) +
                    "; choose samples_per_rev as a multiple of the tooth count");
  }
  if (!(tooth0_offset_frac >= 0.0) || !(tooth0_offset_frac < 1.0)) {
    throw RangeError("tooth0_offset_frac must lie in [0, 1)");
  }
  const std::size_t sector = len / z;
  const auto offset = static_cast<std::size_t>(std::llround(tooth0_offset_frac * static_cast<double>(len))) % len;

  ToothProfile tp;
  tp.z = z;
  tp.mean_load.resize(z);
  tp.peak_load.resize(z);
  tp.asymmetry_index.resize(z);
  std::vector<double> buf(sector);
  const auto& k = simd::active();
  for (std::size_t i = 0; i < z; ++i) {
    double peak = 0.0;
    for (std::size_t j = 0; j < sector; ++j) {
      buf[j] = std::abs(avg_rev[(offset + i * sector + j) % len]);
      peak = std::max(peak, buf[j]);
    }
    tp.mean_load[i] = std::sqrt(k.sum_squares(buf.data(), sector) / static_cast<double>(sector));
    tp.peak_load[i] = peak;
  }
  double total = 0.0;
  for (double m : tp.mean_load) total += m;
  const double avg = total / static_cast<double>(z);
  for (std::size_t i = 0; i < z; ++i) {
    tp.asymmetry_index[i] = avg > 0.0 ? tp.mean_load[i] / avg - 1.0 : 0.0;
  }
  return tp;
}

}  // namespace millenv
