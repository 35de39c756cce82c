#include "millenv/io/config.hpp"

#include <fstream>
#include <set>

#include "millenv/error.hpp"

namespace millenv::io {

namespace {

using json = nlohmann::json;

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const char* where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

Band read_band(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(where + ": band must be [f_lo_hz, f_hi_hz]");
  }
  Band b{j[0].get<double>(), j[1].get<double>()};
  if (!(b.f_lo_hz >= 0.0) || !(b.f_hi_hz > b.f_lo_hz)) throw ConfigError(where + ": need 0 <= f_lo < f_hi");
  return b;
}

Channel read_channel(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": channel label must be a string");
  auto c = Channel::try_parse(j.get<std::string>());
  if (!c || c->is_envelope()) throw ConfigError(where + ": unknown channel '" + j.get<std::string>() + "'");
  return *c;
}

void read_cutter(const json& j, CutterSpec& c) {
  check_keys(j, "cutter", {"teeth", "diameter_mm", "feed_per_tooth_mm", "cutting_speed_m_min", "depth_of_cut_mm"});
  read(j, "teeth", c.z, "cutter");
  read(j, "diameter_mm", c.diameter_mm, "cutter");
  read(j, "feed_per_tooth_mm", c.feed_per_tooth_mm, "cutter");
  read(j, "cutting_speed_m_min", c.cutting_speed_m_min, "cutter");
  read(j, "depth_of_cut_mm", c.depth_of_cut_mm, "cutter");
}

ordered_json cutter_json(const CutterSpec& c) {
  return {{"teeth", c.z},
          {"diameter_mm", c.diameter_mm},
          {"feed_per_tooth_mm", c.feed_per_tooth_mm},
          {"cutting_speed_m_min", c.cutting_speed_m_min},
          {"depth_of_cut_mm", c.depth_of_cut_mm}};
}

}  // namespace

std::optional<Band> RunConfig::band_for(Channel c) const {
  if (auto it = bands.find(c); it != bands.end()) return it->second;
  return default_band;
}

void RunConfig::validate() const {
  cutter.validate();
  analysis.thresholds.validate();
  const std::size_t spr = analysis.sync.resolved_samples_per_rev(cutter.z);
  if (spr < 2 || spr % cutter.z != 0) {
    throw ConfigError("sync.samples_per_rev (" + std::to_string(spr) + ") must be a multiple of teeth (" +
                      std::to_string(cutter.z) + ")");
  }
  if (!(analysis.sync.tooth0_offset_frac >= 0.0 && analysis.sync.tooth0_offset_frac < 1.0)) {
    throw ConfigError("sync.tooth0_offset_frac must lie in [0, 1)");
  }
  if (!(analysis.taper_fraction >= 0.0 && analysis.taper_fraction <= 0.5)) {
    throw ConfigError("taper_fraction must lie in [0, 0.5]");
  }
  if (sample_rate_hz && !(*sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be positive");
  if (!(tacho.hysteresis > 0.0)) throw ConfigError("tacho.hysteresis must be positive");
  if (!(impact.record_s > 0.0)) throw ConfigError("impact.record_s must be positive");
  if (impact.n_bands == 0) throw ConfigError("impact.n_bands must be at least 1");
  if (!(impact.min_coherence >= 0.0 && impact.min_coherence <= 1.0)) {
    throw ConfigError("impact.min_coherence must lie in [0, 1]");
  }
  simulation.validate();
}

RunConfig parse_config(const json& j) {
  check_keys(j, "config", {"cutter", "sample_rate_hz", "bands", "default_band", "taper_fraction", "thresholds",
                           "sync", "tacho", "columns", "simulation", "impact", "raw_envelope_spectrum"});
  RunConfig c;
  if (j.contains("cutter")) read_cutter(j["cutter"], c.cutter);
  if (j.contains("sample_rate_hz")) {
    double r = 0.0;
    read(j, "sample_rate_hz", r, "config");
    c.sample_rate_hz = r;
  }
  if (j.contains("bands")) {
    if (!j["bands"].is_object()) throw ConfigError("bands: expected an object of channel -> [lo, hi]");
    for (const auto& [key, value] : j["bands"].items()) {
      c.bands[read_channel(key, "bands")] = read_band(value, "bands." + key);
    }
  }
  if (j.contains("default_band")) c.default_band = read_band(j["default_band"], "default_band");
  read(j, "taper_fraction", c.analysis.taper_fraction, "config");
  read(j, "raw_envelope_spectrum", c.analysis.raw_envelope_spectrum, "config");

  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    check_keys(t, "thresholds", {"asym_ratio", "weak_tooth_drop", "ecc_ratio", "misalign_ratio", "min_carrier",
                                 "min_revs", "max_rpm_drift"});
    auto& th = c.analysis.thresholds;
    read(t, "asym_ratio", th.asym_ratio, "thresholds");
    read(t, "weak_tooth_drop", th.weak_tooth_drop, "thresholds");
    read(t, "ecc_ratio", th.ecc_ratio, "thresholds");
    read(t, "misalign_ratio", th.misalign_ratio, "thresholds");
    read(t, "min_carrier", th.min_carrier, "thresholds");
    read(t, "min_revs", th.min_revs, "thresholds");
    read(t, "max_rpm_drift", th.max_rpm_drift, "thresholds");
  }
  if (j.contains("sync")) {
    const auto& s = j["sync"];
    check_keys(s, "sync", {"samples_per_rev", "tooth0_offset_frac"});
    read(s, "samples_per_rev", c.analysis.sync.samples_per_rev, "sync");
    read(s, "tooth0_offset_frac", c.analysis.sync.tooth0_offset_frac, "sync");
  }
  if (j.contains("tacho")) {
    const auto& t = j["tacho"];
    check_keys(t, "tacho", {"threshold", "hysteresis"});
    read(t, "threshold", c.tacho.threshold, "tacho");
    read(t, "hysteresis", c.tacho.hysteresis, "tacho");
  }
  if (j.contains("columns")) {
    if (!j["columns"].is_object()) throw ConfigError("columns: expected an object of channel -> column name");
    for (const auto& [key, value] : j["columns"].items()) {
      if (!value.is_string()) throw ConfigError("columns." + key + ": column name must be a string");
      c.columns.emplace_back(read_channel(key, "columns"), value.get<std::string>());
    }
  }

  c.simulation.spec = c.cutter;
  if (j.contains("simulation")) {
    const auto& s = j["simulation"];
    check_keys(s, "simulation", {"rpm", "rpm_end", "per_tooth_gain", "resonance_hz", "damping_ratio",
                                 "eccentricity", "noise_rms", "duration_s", "sample_rate_hz", "seed",
                                 "start_angle_frac", "force_pulse_s", "specific_cutting_force"});
    auto& sim = c.simulation;
    for (auto [key, slot] : {std::pair{"rpm", &sim.rpm}, std::pair{"rpm_end", &sim.rpm_end}}) {
      if (!s.contains(key)) continue;
      double v = 0.0;
      read(s, key, v, "simulation");
      *slot = v;
    }
    read(s, "per_tooth_gain", sim.per_tooth_gain, "simulation");
    read(s, "resonance_hz", sim.resonance_hz, "simulation");
    read(s, "damping_ratio", sim.damping_ratio, "simulation");
    read(s, "eccentricity", sim.eccentricity, "simulation");
    read(s, "noise_rms", sim.noise_rms, "simulation");
    read(s, "duration_s", sim.duration_s, "simulation");
    read(s, "sample_rate_hz", sim.sample_rate_hz, "simulation");
    read(s, "seed", sim.seed, "simulation");
    read(s, "start_angle_frac", sim.start_angle_frac, "simulation");
    read(s, "force_pulse_s", sim.force_pulse_s, "simulation");
    read(s, "specific_cutting_force", sim.specific_cutting_force, "simulation");
  }
  if (j.contains("impact")) {
    const auto& s = j["impact"];
    check_keys(s, "impact", {"response_channel", "record_s", "n_bands", "min_coherence", "force_gate",
                             "response_end_level", "trigger_level_frac", "pretrigger_frac"});
    auto& im = c.impact;
    if (s.contains("response_channel")) im.response = read_channel(s["response_channel"], "impact.response_channel");
    read(s, "record_s", im.record_s, "impact");
    read(s, "n_bands", im.n_bands, "impact");
    read(s, "min_coherence", im.min_coherence, "impact");
    read(s, "force_gate", im.windowing.force_gate, "impact");
    read(s, "response_end_level", im.windowing.response_end_level, "impact");
    read(s, "trigger_level_frac", im.trigger.level_frac, "impact");
    read(s, "pretrigger_frac", im.trigger.pretrigger_frac, "impact");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["cutter"] = cutter_json(c.cutter);
  if (c.sample_rate_hz) j["sample_rate_hz"] = *c.sample_rate_hz;
  ordered_json bands = ordered_json::object();
  for (const auto& [ch, b] : c.bands) bands[ch.str()] = {b.f_lo_hz, b.f_hi_hz};
  j["bands"] = bands;
  if (c.default_band) j["default_band"] = {c.default_band->f_lo_hz, c.default_band->f_hi_hz};
  j["taper_fraction"] = c.analysis.taper_fraction;
  j["raw_envelope_spectrum"] = c.analysis.raw_envelope_spectrum;
  const auto& th = c.analysis.thresholds;
  j["thresholds"] = {{"asym_ratio", th.asym_ratio},         {"weak_tooth_drop", th.weak_tooth_drop},
                     {"ecc_ratio", th.ecc_ratio},           {"misalign_ratio", th.misalign_ratio},
                     {"min_carrier", th.min_carrier},       {"min_revs", th.min_revs},
                     {"max_rpm_drift", th.max_rpm_drift}};
  j["sync"] = {{"samples_per_rev", c.analysis.sync.resolved_samples_per_rev(c.cutter.z)},
               {"tooth0_offset_frac", c.analysis.sync.tooth0_offset_frac}};
  j["tacho"] = {{"threshold", c.tacho.threshold}, {"hysteresis", c.tacho.hysteresis}};
  ordered_json cols = ordered_json::object();
  for (const auto& [ch, name] : c.columns) cols[ch.str()] = name;
  j["columns"] = cols;
  const auto& s = c.simulation;
  ordered_json sim;
  if (s.rpm) sim["rpm"] = *s.rpm;
  if (s.rpm_end) sim["rpm_end"] = *s.rpm_end;
  sim["per_tooth_gain"] = s.resolved_gains();
  sim["resonance_hz"] = s.resonance_hz;
  sim["damping_ratio"] = s.damping_ratio;
  sim["eccentricity"] = s.eccentricity;
  sim["noise_rms"] = s.noise_rms;
  sim["duration_s"] = s.duration_s;
  sim["sample_rate_hz"] = s.sample_rate_hz;
  sim["seed"] = s.seed;
  sim["start_angle_frac"] = s.start_angle_frac;
  sim["force_pulse_s"] = s.force_pulse_s;
  sim["specific_cutting_force"] = s.specific_cutting_force;
  j["simulation"] = sim;
  const auto& im = c.impact;
  j["impact"] = {{"response_channel", im.response.str()},
                 {"record_s", im.record_s},
                 {"n_bands", im.n_bands},
                 {"min_coherence", im.min_coherence},
                 {"force_gate", im.windowing.force_gate},
                 {"response_end_level", im.windowing.response_end_level},
                 {"trigger_level_frac", im.trigger.level_frac},
                 {"pretrigger_frac", im.trigger.pretrigger_frac}};
  return j;
}

}  // namespace millenv::io
