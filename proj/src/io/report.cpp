#include "millenv/io/report.hpp"

#include <fstream>

#include "millenv/error.hpp"

namespace millenv::io {

ordered_json to_json(const DefectReport& r) {
  ordered_json j;
  const auto& cls = r.classification;
  j["status"] = cls.inconclusive ? "inconclusive" : "ok";
  j["f_rot_hz"] = r.f_rot_hz;
  j["f_tooth_hz"] = r.f_tooth_hz;
  j["mean_rpm"] = r.mean_rpm;
  j["n_revs"] = r.n_revs;
  j["samples_per_rev"] = r.samples_per_rev;
  j["band_hz"] = {r.band.f_lo_hz, r.band.f_hi_hz};
  j["carrier_amplitude"] = cls.carrier_amplitude;
  j["noise_floor"] = cls.noise_floor;
  j["classifier_status"] = cls.status;
  ordered_json findings = ordered_json::array();
  for (const auto& f : cls.findings) {
    ordered_json fj;
    fj["kind"] = to_string(f.kind);
    fj["triggered"] = f.triggered;
    fj["amplitude_ratio"] = f.amplitude_ratio;
    fj["threshold"] = f.threshold;
    fj["evidence_freq_hz"] = f.evidence_freq_hz;
    if (f.tooth) fj["tooth"] = *f.tooth;
    fj["gated"] = f.gated;
    if (!f.note.empty()) fj["note"] = f.note;
    findings.push_back(std::move(fj));
  }
  j["findings"] = std::move(findings);
  j["tooth_profile"] = {{"z", r.tooth_profile.z},
                        {"mean_load", r.tooth_profile.mean_load},
                        {"peak_load", r.tooth_profile.peak_load},
                        {"asymmetry_index", r.tooth_profile.asymmetry_index}};
  j["warnings"] = r.warnings;
  return j;
}

ordered_json report_json(const RunConfig& cfg, const std::map<Channel, ChannelOutcome>& outcomes,
                         const std::vector<std::string>& warnings) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["signature_table"] = {
      {"note", "defect-to-frequency mapping is a configured convention, not a measured table"},
      {"tooth_asymmetry", "k x f_rot, 1 <= k < z, relative to z x f_rot"},
      {"weak_tooth", "sector RMS drop of the synchronously averaged envelope"},
      {"imbalance_or_eccentricity", "1 x f_rot relative to z x f_rot, no weak tooth"},
      {"misalignment", "2 x f_rot relative to z x f_rot, above the 1 x f_rot peak"}};
  j["config"] = to_json(cfg);
  j["warnings"] = warnings;
  ordered_json channels = ordered_json::object();
  for (const auto& [ch, outcome] : outcomes) {
    if (outcome.analysis) {
      channels[ch.str()] = to_json(outcome.analysis->report);
    } else {
      channels[ch.str()] = {{"status", "error"},
                            {"error_kind", to_string(outcome.error_kind.value_or(ErrorKind::input))},
                            {"error", outcome.error}};
    }
  }
  j["channels"] = std::move(channels);
  return j;
}

std::string serialize(const ordered_json& j) { return j.dump(2) + "\n"; }

void write_report(const std::filesystem::path& path, const ordered_json& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << serialize(report);
}

}  // namespace millenv::io
