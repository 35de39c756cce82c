#include "millenv/modal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "millenv/error.hpp"
#include "millenv/fft.hpp"
#include "millenv/simd/kernels.hpp"

namespace millenv {

namespace {

std::size_t peak_index(const std::vector<double>& f) {
  std::size_t peak = 0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (std::abs(f[i]) > std::abs(f[peak])) peak = i;
  }
  return peak;
}

void gate_force(std::vector<double>& f) {
  const std::size_t peak = peak_index(f);
  const double floor = 0.01 * std::abs(f[peak]);
  std::size_t start = peak, end = peak;
  while (start > 0 && std::abs(f[start - 1]) >= floor) --start;
  while (end + 1 < f.size() && std::abs(f[end + 1]) >= floor) ++end;
  std::fill(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(start), 0.0);
  std::fill(f.begin() + static_cast<std::ptrdiff_t>(end) + 1, f.end(), 0.0);
}

}  // namespace

ImpactRecord::ImpactRecord(TimeSeries f, TimeSeries r) : force(std::move(f)), response(std::move(r)) {
  if (force.sample_rate_hz() != response.sample_rate_hz()) {
    throw InputError("impact record: force and response sample rates differ");
  }
  if (force.size() != response.size()) throw InputError("impact record: force and response lengths differ");
  const auto s = force.samples();
  if (std::all_of(s.begin(), s.end(), [](double v) { return v == 0.0; })) {
    throw InputError("impact record: force contains no impulse (zero force energy)");
  }
}

Frf estimate_frf(std::span<const ImpactRecord> impacts, const ImpactWindowing& w) {
  if (impacts.empty()) throw InputError("FRF estimation needs at least one impact record");
  const std::size_t n = impacts.front().force.size();
  const double rate = impacts.front().force.sample_rate_hz();
  if (n < 4) throw SizeError("impact records need at least 4 samples");
  for (const auto& rec : impacts) {
    if (rec.force.sample_rate_hz() != rate) throw InputError("impact records have mismatched sample rates");
    if (rec.force.size() != n) throw InputError("impact records have mismatched lengths");
  }
  if (!(w.response_end_level > 0.0) || w.response_end_level > 1.0) {
    throw ConfigError("response window end level must lie in (0, 1]");
  }

  const std::size_t bins = n / 2 + 1;
  std::vector<cplx> sfx(bins, cplx{});
  std::vector<double> sff(bins, 0.0), sxx(bins, 0.0);
  const auto& k = simd::active();
  double decay_sum = 0.0;
  for (const auto& rec : impacts) {
    std::vector<double> f(rec.force.samples().begin(), rec.force.samples().end());
    std::vector<double> x(rec.response.samples().begin(), rec.response.samples().end());
    if (w.force_gate) gate_force(f);
    // Exponential window from the impact (force peak) on.
    const std::size_t hit = peak_index(f);
    const double decay = hit + 1 < n ? -std::log(w.response_end_level) / static_cast<double>(n - 1 - hit) : 0.0;
    for (std::size_t i = hit; i < n; ++i) x[i] *= std::exp(-decay * static_cast<double>(i - hit));
    decay_sum += decay;
    const auto F = fft_real(f);
    const auto X = fft_real(x);
    k.cross_accumulate(F.data(), X.data(), sfx.data(), sff.data(), sxx.data(), bins);
  }
  double force_energy = 0.0;
  for (double v : sff) force_energy += v;
  if (!(force_energy > 0.0)) throw InputError("zero force energy across impact records");

  Frf frf;
  frf.df_hz = rate / static_cast<double>(n);
  frf.averages = impacts.size();
  frf.degenerate_coherence = impacts.size() == 1;
  frf.window_decay_per_s = decay_sum / static_cast<double>(impacts.size()) * rate;
  frf.h1.resize(bins);
  frf.coherence.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    frf.h1[b] = sff[b] > 0.0 ? sfx[b] / sff[b] : cplx{};
    const double denom = sff[b] * sxx[b];
    double coh = denom > 0.0 ? std::norm(sfx[b]) / denom : 0.0;
    if (frf.degenerate_coherence) coh = 1.0;
    frf.coherence[b] = std::clamp(coh, 0.0, 1.0);
  }
  return frf;
}

BandProposal propose_bands(const Frf& frf, std::size_t n_bands, double min_coherence) {
  BandProposal out;
  if (n_bands == 0) throw RangeError("n_bands must be at least 1");
  const std::size_t n = frf.size();
  if (n < 3) {
    out.status = "FRF too short for peak picking";
    return out;
  }
  const double nyquist = frf.frequency(n - 1);
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = frf.magnitude(i);

  struct Candidate {
    std::size_t bin;
    double magnitude;
    Band band;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(mag[i] > mag[i - 1] && mag[i] >= mag[i + 1])) continue;
    if (frf.coherence[i] < min_coherence) continue;
    const double hp = mag[i] / std::sqrt(2.0);
    std::size_t l = i;
    while (l > 0 && mag[l] > hp) --l;
    std::size_t r = i;
    while (r + 1 < n && mag[r] > hp) ++r;
    if (mag[l] > hp || mag[r] > hp) continue;  // no resolvable half-power width
    // Linear interpolation of the -3 dB crossings.
    const double fl = frf.frequency(l) + frf.df_hz * (hp - mag[l]) / (mag[l + 1] - mag[l]);
    const double fr = frf.frequency(r) - frf.df_hz * (hp - mag[r]) / (mag[r - 1] - mag[r]);
    Band b{fl, fr};
    const double min_width = 10.0 * frf.df_hz;
    if (b.width() < min_width) {
      const double c = frf.frequency(i);
      b = {c - 0.5 * min_width, c + 0.5 * min_width};
    }
    b.f_lo_hz = std::max(b.f_lo_hz, 0.5 * frf.df_hz);
    b.f_hi_hz = std::min(b.f_hi_hz, nyquist - 0.5 * frf.df_hz);
    if (!(b.f_hi_hz > b.f_lo_hz)) continue;
    cands.push_back({i, mag[i], b});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
    return a.bin < b.bin;
  });
  for (const auto& c : cands) {
    if (out.bands.size() == n_bands) break;
    const bool clash = std::any_of(out.bands.begin(), out.bands.end(),
                                   [&](const Band& b) { return b.overlaps(c.band); });
    if (clash) continue;
    out.bands.push_back(c.band);
    out.peak_hz.push_back(frf.frequency(c.bin));
  }
  if (out.bands.empty()) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "no qualifying peaks: no |H1| maximum with coherence >= %.3g and a resolvable "
                  "half-power bandwidth",
                  min_coherence);
    out.status = buf;
  } else {
    out.status = "ok";
  }
  return out;
}

std::vector<ImpactRecord> split_impacts(const TimeSeries& force, const TimeSeries& response,
                                        std::size_t record_len, const TriggerOptions& opts) {
  if (force.size() != response.size() || force.sample_rate_hz() != response.sample_rate_hz()) {
    throw InputError("hammer and response channels must share rate and length");
  }
  if (record_len < 4) throw SizeError("impact record length must be at least 4 samples");
  const auto f = force.samples();
  double full_scale = 0.0;
  for (double v : f) full_scale = std::max(full_scale, std::abs(v));
  if (full_scale == 0.0) throw InputError("hammer channel is all zeros");
  const double level = opts.level_frac * full_scale;
  const auto pre = static_cast<std::size_t>(opts.pretrigger_frac * static_cast<double>(record_len));

  std::vector<ImpactRecord> out;
  std::size_t i = 0;
  while (i < f.size()) {
    if (std::abs(f[i]) < level) {
      ++i;
      continue;
    }
    const std::size_t start = i > pre ? i - pre : 0;
    if (start + record_len > f.size()) break;
    const auto fs = force.samples().subspan(start, record_len);
    const auto rs = response.samples().subspan(start, record_len);
    out.emplace_back(force.with_samples({fs.begin(), fs.end()}), response.with_samples({rs.begin(), rs.end()}));
    i = start + record_len;
  }
  return out;
}

}  // namespace millenv
