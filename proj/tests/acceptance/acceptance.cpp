// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "millenv/dsp.hpp"
#include "millenv/fft.hpp"
#include "millenv/io/report.hpp"
#include "millenv/millsim.hpp"
#include "millenv/modal.hpp"
#include "millenv/pipeline.hpp"
#include "millenv/sync.hpp"
#include "oracles.hpp"

using namespace millenv;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  std::string detail;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!cond) {
      detail += " [x]";
      ok = false;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const Band kVibBand{1500.0, 2500.0};
const Band kForceBand{300.0, 1500.0};

struct Run {
  SimOutput sim;
  TachoTrack tacho;
};

Run run(std::vector<double> gains, double noise = 0.0, std::uint64_t seed = 1) {
  SimConfig cfg;
  cfg.rpm = 1352.8;
  cfg.per_tooth_gain = std::move(gains);
  cfg.noise_rms = noise;
  cfg.seed = seed;
  auto sim = simulate(cfg);
  auto tacho = detect_pulses(sim.channel(ChannelKind::tacho), 2.5, 0.5);
  return {std::move(sim), std::move(tacho)};
}

const Finding* find(const Classification& c, FindingKind k, bool triggered_only = false) {
  for (const auto& f : c.findings) {
    if (f.kind == k && (!triggered_only || f.triggered)) return &f;
  }
  return nullptr;
}

Check ac1() {
  Check c;
  const auto t0 = Clock::now();
  const auto r = run({});
  const auto a = analyze(r.sim.channel(ChannelKind::ax), r.tacho, CutterSpec{}, kVibBand, {});
  const double elapsed = seconds_since(t0);
  const auto& s = a.envelope_spectrum;
  const auto peak = static_cast<std::size_t>(std::max_element(s.amplitudes.begin() + 1, s.amplitudes.end()) -
                                             s.amplitudes.begin());
  const double bins_off = std::abs(static_cast<double>(peak) - 135.28 / s.df_hz);
  c.expect(bins_off <= 1.0, fmt("envelope peak %.3f Hz (%.2f bins from 135.28)", s.frequency(peak), bins_off));
  double worst = 0.0;
  for (int k = 1; k <= 5; ++k) worst = std::max(worst, read_amplitude(s, k * a.report.f_rot_hz).first);
  c.expect(worst < 0.1 * s.amplitudes[peak], fmt("max k*f_rot component %.3g of peak", worst / s.amplitudes[peak]));
  c.expect(elapsed < 5.0, fmt("runtime %.3f s", elapsed));
  return c;
}

Check ac2() {
  Check c;
  const auto r = run({1, 1, 1, 0.5, 1, 1});
  const auto a = analyze(r.sim.channel(ChannelKind::ax), r.tacho, CutterSpec{}, kVibBand, {});
  const auto& cls = a.report.classification;
  const auto* asym = find(cls, FindingKind::tooth_asymmetry);
  const auto* weak = find(cls, FindingKind::weak_tooth, true);
  if (!asym || !weak) {
    c.expect(false, "tooth_asymmetry and a triggered weak_tooth finding present");
    return c;
  }
  const double df = a.envelope_spectrum.df_hz;
  c.expect(asym->triggered, "tooth_asymmetry triggered");
  c.expect(std::abs(asym->evidence_freq_hz - 22.55) <= df,
           fmt("evidence %.3f Hz within 1 bin (%.3f Hz) of 22.55", asym->evidence_freq_hz, df));
  c.expect(asym->amplitude_ratio >= 0.2, fmt("ratio %.4f >= 0.2", asym->amplitude_ratio));
  c.expect(std::abs(asym->amplitude_ratio - 0.2209) <= 0.1 * 0.2209, fmt("ratio %.4f within 10%% of 0.2209", asym->amplitude_ratio));
  c.expect(weak->tooth == 3u, fmt("weak tooth index %.0f", static_cast<double>(weak->tooth.value_or(99))));
  return c;
}

double am(double t) { return 1.0 + 0.5 * std::cos(2.0 * oracle::kPi * 20.0 * t); }

Check ac3() {
  Check c;
  const double fs = 25000.0;
  const std::size_t n = 25000, lo = n / 100, hi = n - n / 100;
  const TimeSeries x(oracle::sample(n, fs, [](double t) { return am(t) * std::cos(2.0 * oracle::kPi * 2000.0 * t); }),
                     fs, ChannelKind::ax);
  const auto s = envelope_spectrum(x, kVibBand, default_taper(kVibBand), Window::hann());
  const auto it = std::max_element(s.amplitudes.begin() + 1, s.amplitudes.end());
  const double f_peak = s.frequency(static_cast<std::size_t>(it - s.amplitudes.begin()));
  c.expect(std::abs(f_peak - 20.0) <= s.df_hz, fmt("peak at %.3f Hz", f_peak));
  c.expect(std::abs(*it - 0.5) <= 0.025, fmt("peak amplitude %.4f vs 0.5", *it));
  const auto e = envelope(x);
  const auto truth = oracle::sample(n, fs, am);
  const double rel = oracle::rms_diff(e.samples(), truth, lo, hi) / oracle::rms_range(truth, lo, hi);
  c.expect(rel <= 0.01, fmt("envelope RMS error %.2e", rel));
  return c;
}

Check ac4() {
  Check c;
  const std::size_t n = 4096;
  const auto g = oracle::gaussian(n, 4096);
  const auto z = analytic_signal(g);
  double re = 0.0;
  for (std::size_t i = 0; i < n; ++i) re = std::max(re, std::abs(z[i].real() - g[i]));
  c.expect(re <= 1e-9, fmt("real part error %.2e", re));
  std::vector<cplx> zz(z);
  Fft(n).forward(zz);
  double neg = 0.0, total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    total += std::norm(zz[k]);
    if (k > n / 2) neg += std::norm(zz[k]);
  }
  c.expect(neg / total < 1e-9, fmt("negative-frequency energy %.2e", neg / total));

  const auto x = oracle::bandlimited(n, 25000.0, 1500.0, 4500.0, 77);
  const auto zx = analytic_signal(x);
  const std::size_t lo = n / 4, hi = 3 * n / 4;
  std::vector<double> h(n, 0.0), ref(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) h[i] = zx[i].imag();
  for (std::size_t i = lo; i < hi; ++i) ref[i] = oracle::hilbert_at(x, i);
  const double rel = oracle::rms_diff(h, ref, lo, hi) / oracle::rms_range(ref, lo, hi);
  c.expect(rel <= 0.01, fmt("Hilbert convolution mismatch %.2e", rel));
  return c;
}

Check ac5() {
  Check c;
  const double fs = 25000.0, dur = 2.0, f0 = 20.0, a = 2.5;  // 1200 -> 1500 rpm
  const auto angle = [&](double t) { return f0 * t + 0.5 * a * t * t; };
  const auto time_at = [&](double rev) { return (-f0 + std::sqrt(f0 * f0 + 2.0 * a * rev)) / a; };
  const auto n = static_cast<std::size_t>(dur * fs);
  const TimeSeries x(oracle::sample(n, fs, [&](double t) { return std::cos(2.0 * oracle::kPi * angle(t)); }), fs,
                     ChannelKind::ax);
  std::vector<double> p;
  for (int k = 0; time_at(k) < dur; ++k) p.push_back(time_at(k));
  const std::size_t spr = 512;
  const auto ang = resample_to_angle(x, TachoTrack(p), spr);
  std::vector<double> ref(ang.samples().size());
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = std::cos(2.0 * oracle::kPi * static_cast<double>(i % spr) / spr);
  const double rel = oracle::rms_diff(ang.samples(), ref, 0, ref.size()) / oracle::rms(ref);
  c.expect(rel <= 0.01, fmt("resampled RMS error %.2e", rel));

  const auto so = amplitude_spectrum(ang.samples(), static_cast<double>(spr), Window::rectangular());
  const double opeak = *std::max_element(so.amplitudes.begin(), so.amplitudes.end());
  const auto o_above = std::count_if(so.amplitudes.begin(), so.amplitudes.end(), [&](double v) { return v > 0.5 * opeak; });
  c.expect(o_above == 1 && so.amplitudes[so.bin_of(1.0)] == opeak, fmt("order bins above half-max %.0f", static_cast<double>(o_above)));

  const auto st = amplitude_spectrum(x, Window::hann());
  const double tpeak = *std::max_element(st.amplitudes.begin(), st.amplitudes.end());
  const auto t_above = std::count_if(st.amplitudes.begin(), st.amplitudes.end(), [&](double v) { return v > 0.5 * tpeak; });
  c.expect(t_above >= 3, fmt("time-domain bins above half-max %.0f", static_cast<double>(t_above)));
  return c;
}

Check ac6() {
  Check c;
  const double fs = 12800.0, fn = 800.0, zeta = 0.05;
  const std::size_t len = 6400, at = 640;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amp(50.0, 150.0);
  std::vector<ImpactRecord> recs;
  for (std::size_t k = 0; k < 10; ++k) {
    std::vector<double> f(len, 0.0), x(len, 0.0);
    const double A = amp(rng);
    for (std::size_t i = 0; i < 3; ++i) {
      const double s = std::sin(oracle::kPi * static_cast<double>(i + 1) / 4.0);
      f[at + i] = A * s * s;
    }
    for (std::size_t m = at; m < at + 3; ++m) {
      for (std::size_t j = m; j < len; ++j) x[j] += f[m] * oracle::impulse_1dof(static_cast<double>(j - m) / fs, fn, zeta) / fs;
    }
    const double peak = *std::max_element(x.begin(), x.end());
    const auto e = oracle::gaussian(len, 300 + k, 0.01 * peak);
    for (std::size_t i = 0; i < len; ++i) x[i] += e[i];
    recs.emplace_back(TimeSeries(f, fs, ChannelKind::hammer), TimeSeries(x, fs, ChannelKind::ax));
  }
  const auto frf = estimate_frf(recs);
  std::size_t best = 1;
  for (std::size_t k = 1; k < frf.size() / 2; ++k) {
    if (frf.coherence[k] >= 0.9 && frf.magnitude(k) > frf.magnitude(best)) best = k;
  }
  const double f_peak = frf.frequency(best);
  c.expect(std::abs(f_peak - 796.0) <= 0.01 * 796.0, fmt("|H1| peak %.1f Hz", f_peak));
  c.expect(frf.coherence[best] > 0.95, fmt("coherence at peak %.4f", frf.coherence[best]));
  const auto prop = propose_bands(frf, 1);
  const bool has = !prop.bands.empty() && prop.bands[0].contains(fn);
  c.expect(has, has ? fmt("band [%.1f, %.1f] Hz contains f_n", prop.bands[0].f_lo_hz, prop.bands[0].f_hi_hz)
                    : std::string("no band proposed: ") + prop.status);
  return c;
}

Check ac7() {
  Check c;
  const auto t0 = Clock::now();
  double rt = 0.0, pv = 0.0;
  for (std::size_t n : {1000u, 4096u, 65536u, 262144u}) {
    const auto x = oracle::gaussian(n, n);
    const auto X = fft_real(x);
    const auto y = ifft_real(X);
    double ex = 0.0, et = 0.0, ef = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rt = std::max(rt, std::abs(y[i] - x[i]));
      et += x[i] * x[i];
      ef += std::norm(X[i]);
    }
    ex = std::abs(et - ef / static_cast<double>(n)) / et;
    pv = std::max(pv, ex);
  }
  c.expect(rt <= 1e-9, fmt("FFT round trip %.2e", rt));
  c.expect(pv <= 1e-9, fmt("Parseval %.2e", pv));

  const auto r = run({1, 1, 1, 0.5, 1, 1}, 0.05, 5);
  const auto base = analyze(r.sim.channel(ChannelKind::ax), r.tacho, CutterSpec{}, kVibBand, {});
  std::vector<double> scaled(r.sim.channel(ChannelKind::ax).samples().begin(), r.sim.channel(ChannelKind::ax).samples().end());
  for (double& v : scaled) v *= 1000.0;
  const auto big = analyze(TimeSeries(scaled, 25000.0, ChannelKind::ax), r.tacho, CutterSpec{}, kVibBand, {});
  double drift = 0.0;
  const auto& fb = base.report.classification.findings;
  const auto& fg = big.report.classification.findings;
  bool same_flags = fb.size() == fg.size();
  for (std::size_t i = 0; same_flags && i < fb.size(); ++i) {
    same_flags = fb[i].triggered == fg[i].triggered && fb[i].tooth == fg[i].tooth;
    drift = std::max(drift, std::abs(fb[i].amplitude_ratio - fg[i].amplitude_ratio) / std::max(fb[i].amplitude_ratio, 1e-12));
  }
  c.expect(same_flags && drift <= 1e-9, fmt("scale x1000 ratio drift %.2e", drift));

  io::RunConfig cfg;
  cfg.default_band = kVibBand;
  std::map<Channel, Band> bands;
  for (auto k : {ChannelKind::ax, ChannelKind::ay, ChannelKind::az}) bands[k] = kVibBand;
  for (auto k : {ChannelKind::fx, ChannelKind::fy, ChannelKind::fz}) bands[k] = kForceBand;
  const auto text = io::serialize(io::report_json(cfg, analyze_all_channels(r.sim.channels, r.tacho, cfg.cutter, bands, cfg.analysis)));
  std::vector<TimeSeries> shuffled(r.sim.channels.rbegin(), r.sim.channels.rend());
  std::rotate(shuffled.begin(), shuffled.begin() + 2, shuffled.end());
  const auto text_perm = io::serialize(io::report_json(cfg, analyze_all_channels(shuffled, r.tacho, cfg.cutter, bands, cfg.analysis)));
  c.expect(text_perm == text, "channel permutation gives an identical report");
  const auto r2 = run({1, 1, 1, 0.5, 1, 1}, 0.05, 5);
  const auto text2 = io::serialize(io::report_json(cfg, analyze_all_channels(r2.sim.channels, r2.tacho, cfg.cutter, bands, cfg.analysis)));
  c.expect(text2 == text, "repeat run byte-identical");
  c.expect(true, fmt("invariant checks %.2f s", seconds_since(t0)));
  return c;
}

Check ac8() {
  Check c;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = run({1, 1, 1, 0.5, 1, 1}, seed == 1 ? 0.0 : 0.05, seed);
    const auto vib = analyze(r.sim.channel(ChannelKind::ax), r.tacho, CutterSpec{}, kVibBand, {});
    const auto frc = analyze(r.sim.channel(ChannelKind::fx), r.tacho, CutterSpec{}, kForceBand, {});
    const auto* wv = find(vib.report.classification, FindingKind::weak_tooth, true);
    const auto* wf = find(frc.report.classification, FindingKind::weak_tooth, true);
    const double iv = wv && wv->tooth ? static_cast<double>(*wv->tooth) : -1.0;
    const double iff = wf && wf->tooth ? static_cast<double>(*wf->tooth) : -1.0;
    c.expect(iv >= 0.0 && iv == iff, fmt("seed %.0f: ax tooth %.0f, fx tooth %.0f", static_cast<double>(seed), iv, iff));
  }
  return c;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Check()>> criteria[] = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
      {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8},
  };
  const auto t0 = Clock::now();
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", c.ok ? "PASS" : "FAIL", name, c.detail.c_str());
    failures += c.ok ? 0 : 1;
  }
  std::printf("acceptance run %.2f s, %d failing\n", seconds_since(t0), failures);
  return failures == 0 ? 0 : 1;
}
