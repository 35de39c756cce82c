#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "millenv/io/csv.hpp"
#include "millenv/millsim.hpp"
#include "millenv/modal.hpp"
#include "millenv/pipeline.hpp"

namespace millenv::io {

using ordered_json = nlohmann::ordered_json;

struct ImpactSettings {
  Channel response{ChannelKind::ax};
  double record_s = 0.5;
  std::size_t n_bands = 3;
  double min_coherence = 0.9;
  ImpactWindowing windowing;
  TriggerOptions trigger;
};

/// Everything a run can tune. See README for the JSON schema.
struct RunConfig {
  CutterSpec cutter;
  std::optional<double> sample_rate_hz;
  std::map<Channel, Band> bands;
  std::optional<Band> default_band;
  AnalysisConfig analysis;
  TachoOptions tacho;
  ColumnMap columns;
  SimConfig simulation;
  ImpactSettings impact;

  /// Band for a channel: explicit entry, else default_band.
  std::optional<Band> band_for(Channel c) const;
  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Parses and validates. Unknown keys are rejected so typos do not pass
/// silently. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form (stable key order); parse_config(to_json(c)) == c.
ordered_json to_json(const RunConfig& c);

}  // namespace millenv::io
