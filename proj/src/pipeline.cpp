#include "millenv/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace millenv {

namespace {

Finding make_finding(FindingKind kind, double hz, double ratio, double threshold, bool triggered = false) {
  Finding f;
  f.kind = kind;
  f.evidence_freq_hz = hz;
  f.amplitude_ratio = ratio;
  f.threshold = threshold;
  f.triggered = triggered;
  return f;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
}

// Revolutions [first, last) fully inside the sampled span of x.
std::pair<std::size_t, std::size_t> covered_revolutions(const TimeSeries& x, const TachoTrack& t) {
  const double t_end = static_cast<double>(x.size() - 1) / x.sample_rate_hz();
  const auto p = t.pulse_times_s();
  std::size_t first = 0;
  while (first + 1 < p.size() && p[first] < 0.0) ++first;
  std::size_t last = first;
  while (last + 1 < p.size() && p[last + 1] <= t_end) ++last;
  return {first, last};
}

}  // namespace

double CutterSpec::rpm() const noexcept {
  return 1000.0 * cutting_speed_m_min / (std::numbers::pi * diameter_mm);
}

void CutterSpec::validate() const {
  if (z == 0) throw ConfigError("cutter tooth count must be at least 1");
  require_positive(diameter_mm, "cutter diameter_mm");
  require_positive(feed_per_tooth_mm, "cutter feed_per_tooth_mm");
  require_positive(cutting_speed_m_min, "cutter cutting_speed_m_min");
  if (rpm() > kMachineMaxRpm) {
    throw ConfigError(fmt("derived spindle speed %.1f rpm exceeds machine maximum %.0f rpm", rpm(),
                          kMachineMaxRpm));
  }
}

double tooth_passing_frequency(double rpm, std::size_t z) {
  if (!(rpm > 0.0) || !std::isfinite(rpm)) throw RangeError(fmt("rpm must be positive (got %g)", rpm));
  if (z == 0) throw RangeError("tooth count must be at least 1");
  return rpm / 60.0 * static_cast<double>(z);
}

double tooth_passing_frequency(const CutterSpec& spec) { return tooth_passing_frequency(spec.rpm(), spec.z); }

void Thresholds::validate() const {
  require_positive(asym_ratio, "thresholds.asym_ratio");
  require_positive(weak_tooth_drop, "thresholds.weak_tooth_drop");
  require_positive(ecc_ratio, "thresholds.ecc_ratio");
  require_positive(misalign_ratio, "thresholds.misalign_ratio");
  require_positive(min_carrier, "thresholds.min_carrier");
  require_positive(max_rpm_drift, "thresholds.max_rpm_drift");
  if (min_revs == 0) throw ConfigError("thresholds.min_revs must be positive");
}

std::size_t SyncConfig::resolved_samples_per_rev(std::size_t z) const noexcept {
  if (samples_per_rev != 0) return samples_per_rev;
  if (z == 0) return 1024;
  return (1024 + z - 1) / z * z;
}

std::string_view to_string(FindingKind kind) noexcept {
  switch (kind) {
    case FindingKind::tooth_asymmetry: return "tooth_asymmetry";
    case FindingKind::weak_tooth: return "weak_tooth";
    case FindingKind::imbalance_or_eccentricity: return "imbalance_or_eccentricity";
    case FindingKind::misalignment: return "misalignment";
  }
  return "unknown";
}

bool DefectReport::any_triggered() const noexcept {
  return std::any_of(classification.findings.begin(), classification.findings.end(),
                     [](const Finding& f) { return f.triggered; });
}

std::pair<double, std::size_t> read_amplitude(const Spectrum& s, double hz) noexcept {
  if (s.amplitudes.empty()) return {0.0, 0};
  const std::size_t b = s.bin_of(hz);
  const std::size_t lo = b > 0 ? b - 1 : 0;
  const std::size_t hi = std::min(b + 1, s.size() - 1);
  std::size_t best = lo;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (s.amplitudes[k] > s.amplitudes[best]) best = k;
  }
  return {s.amplitudes[best], best};
}

Classification classify(const Spectrum& env_spec, const ToothProfile& profile, double f_rot_hz,
                        std::size_t z, const Thresholds& cfg) {
  if (z == 0 || profile.mean_load.size() != z) throw SizeError("tooth profile does not match z");
  if (!(f_rot_hz >= 3.0 * env_spec.df_hz)) {
    throw RangeError(fmt("envelope spectrum too coarse: f_rot %.6g Hz < 3 x df %.6g Hz", f_rot_hz,
                         env_spec.df_hz));
  }
  Classification out;
  const auto [carrier, carrier_bin] = read_amplitude(env_spec, static_cast<double>(z) * f_rot_hz);
  out.carrier_amplitude = carrier;
  // Floor from the bins the classifier reads (DC excluded); bins far above
  // the envelope bandwidth are near zero and would understate it.
  const std::size_t top = std::max<std::size_t>(2, std::min(env_spec.size(), env_spec.bin_of(2.0 * static_cast<double>(z) * f_rot_hz) + 1));
  out.noise_floor = cfg.min_carrier * median({env_spec.amplitudes.begin() + 1, env_spec.amplitudes.begin() + static_cast<std::ptrdiff_t>(top)});
  if (!(carrier > out.noise_floor)) {
    out.inconclusive = true;
    out.status = fmt("inconclusive: tooth-passing amplitude %.6g does not exceed noise floor %.6g",
                     carrier, out.noise_floor);
    return out;
  }
  (void)carrier_bin;
  out.status = "ok";

  auto order = [&](std::size_t k) { return read_amplitude(env_spec, static_cast<double>(k) * f_rot_hz); };

  {
    Finding f = make_finding(FindingKind::tooth_asymmetry, f_rot_hz, 0.0, cfg.asym_ratio);
    f.threshold = cfg.asym_ratio;
    f.evidence_freq_hz = f_rot_hz;
    for (std::size_t k = 1; k < z; ++k) {
      const auto [amp, bin] = order(k);
      const double ratio = amp / carrier;
      if (ratio > f.amplitude_ratio) {
        f.amplitude_ratio = ratio;
        f.evidence_freq_hz = env_spec.frequency(bin);
      }
    }
    if (z == 1) f.note = "single tooth: no sub-tooth orders";
    f.triggered = f.amplitude_ratio >= f.threshold;
    out.findings.push_back(f);
  }

  bool weak_present = false;
  {
    std::size_t weakest = 0;
    for (std::size_t i = 0; i < z; ++i) {
      if (profile.asymmetry_index[i] < profile.asymmetry_index[weakest]) weakest = i;
      const double drop = -profile.asymmetry_index[i];
      if (drop >= cfg.weak_tooth_drop) {
        Finding f = make_finding(FindingKind::weak_tooth, f_rot_hz, drop, cfg.weak_tooth_drop, true);
        f.tooth = i;
        out.findings.push_back(f);
        weak_present = true;
      }
    }
    if (!weak_present) {
      Finding f = make_finding(FindingKind::weak_tooth, f_rot_hz, std::max(0.0, -profile.asymmetry_index[weakest]),
                                 cfg.weak_tooth_drop, false);
      f.tooth = weakest;
      out.findings.push_back(f);
    }
  }

  const auto [amp1, bin1] = order(1);
  {
    Finding f = make_finding(FindingKind::imbalance_or_eccentricity, env_spec.frequency(bin1), amp1 / carrier,
                                 cfg.ecc_ratio);
    const bool reached = f.amplitude_ratio >= f.threshold;
    if (z < 2) {
      f.gated = reached;
      f.note = "1 x f_rot coincides with the tooth-passing order";
    } else if (weak_present) {
      f.gated = reached;
      f.note = "weak tooth present: 1 x f_rot attributed to tooth asymmetry";
    }
    f.triggered = reached && !f.gated;
    out.findings.push_back(f);
  }

  {
    const auto [amp2, bin2] = order(2);
    Finding f = make_finding(FindingKind::misalignment, env_spec.frequency(bin2), amp2 / carrier, cfg.misalign_ratio);
    const bool reached = f.amplitude_ratio >= f.threshold;
    if (z <= 2) {
      f.gated = reached;
      f.note = "2 x f_rot is not below the tooth-passing order";
    } else if (!(amp2 > amp1)) {
      f.gated = reached;
      f.note = "2 x f_rot peak does not exceed 1 x f_rot peak";
    }
    f.triggered = reached && !f.gated;
    out.findings.push_back(f);
  }
  return out;
}

ChannelAnalysis analyze(const TimeSeries& x, const TachoTrack& tacho, const CutterSpec& spec,
                        const Band& band, const AnalysisConfig& cfg) {
  spec.validate();
  cfg.thresholds.validate();
  band.validate(x.nyquist_hz());
  const std::size_t z = spec.z;
  const std::size_t spr = cfg.sync.resolved_samples_per_rev(z);
  if (spr % z != 0) {
    throw ConfigError("samples_per_rev " + std::to_string(spr) + " is not a multiple of z = " +
                      std::to_string(z));
  }

  const auto [first, last] = covered_revolutions(x, tacho);
  const std::size_t revs = last - first;
  if (revs < cfg.thresholds.min_revs) {
    throw CoverageError("signal covers " + std::to_string(revs) + " complete revolution(s); need " +
                        std::to_string(cfg.thresholds.min_revs));
  }
  const auto pulses = tacho.pulse_times_s();
  const TachoTrack used(std::vector<double>(pulses.begin() + static_cast<std::ptrdiff_t>(first),
                                            pulses.begin() + static_cast<std::ptrdiff_t>(last) + 1));

  const auto filtered = band_filter(detrend(x), band, cfg.taper_fraction * band.width());
  auto env = envelope(filtered);
  const auto angular = resample_to_angle(env, used, spr);
  auto avg = synchronous_average(angular);
  auto profile = tooth_segmentation(avg, z, cfg.sync.tooth0_offset_frac);

  const double mean_rpm = used.mean_rpm();
  const double f_rot = mean_rpm / 60.0;
  std::vector<double> record(angular.samples().begin(), angular.samples().end());
  const double m = mean(record);
  for (double& v : record) v -= m;
  auto order_spec = amplitude_spectrum(record, static_cast<double>(spr) * f_rot, Window::rectangular());

  DefectReport report;
  report.channel = x.channel();
  report.f_rot_hz = f_rot;
  report.f_tooth_hz = static_cast<double>(z) * f_rot;
  report.mean_rpm = mean_rpm;
  report.n_revs = angular.n_revs();
  report.samples_per_rev = spr;
  report.band = band;

  const auto speeds = speed_profile(used);
  double lo = speeds.front().rpm, hi = speeds.front().rpm;
  for (const auto& s : speeds) {
    lo = std::min(lo, s.rpm);
    hi = std::max(hi, s.rpm);
  }
  const double drift = (hi - lo) / mean_rpm;
  if (drift > cfg.thresholds.max_rpm_drift) {
    report.warnings.push_back(fmt("rpm instability: %.2f%% spread (%.1f..%.1f rpm) exceeds limit", 100.0 * drift,
                                  lo, hi) +
                              fmt(" %.2f%%", 100.0 * cfg.thresholds.max_rpm_drift));
  }

  report.classification = classify(order_spec, profile, f_rot, z, cfg.thresholds);
  report.tooth_profile = std::move(profile);

  std::optional<Spectrum> raw;
  if (cfg.raw_envelope_spectrum) raw = amplitude_spectrum(detrend(env), Window::hann());

  return ChannelAnalysis{std::move(report), std::move(order_spec), std::move(avg), std::move(env),
                         std::move(raw)};
}

std::map<Channel, ChannelOutcome> analyze_all_channels(std::span<const TimeSeries> channels,
                                                       const TachoTrack& tacho,
                                                       const CutterSpec& spec,
                                                       const std::map<Channel, Band>& bands,
                                                       const AnalysisConfig& cfg) {
  std::map<Channel, ChannelOutcome> out;
  for (const auto& x : channels) {
    const Channel c = x.channel();
    if (c.kind() == ChannelKind::tacho || c.kind() == ChannelKind::hammer) continue;
    ChannelOutcome outcome;
    try {
      const auto band = bands.find(c);
      if (band == bands.end()) throw ConfigError("no band configured for channel " + c.str());
      outcome.analysis = analyze(x, tacho, spec, band->second, cfg);
    } catch (const Error& e) {
      outcome.error_kind = e.kind();
      outcome.error = e.what();
    }
    out.emplace(c, std::move(outcome));
  }
  return out;
}

}  // namespace millenv
