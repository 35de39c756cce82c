#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "millenv/signal.hpp"
#include "millenv/sync.hpp"

namespace millenv::io {

struct TachoOptions {
  double threshold = 2.5;
  double hysteresis = 0.5;
};

/// Channel -> CSV column name. Empty means every header that names a channel.
using ColumnMap = std::vector<std::pair<Channel, std::string>>;

struct ReadOptions {
  /// Declared rate; takes precedence over the time column.
  std::optional<double> sample_rate_hz;
  ColumnMap columns;
  TachoOptions tacho;
  bool detect_tacho = true;
};

struct Recording {
  std::vector<TimeSeries> channels;
  std::optional<TachoTrack> tacho;
  std::vector<std::string> warnings;

  const TimeSeries* find(ChannelKind kind) const noexcept;
};

/// Reads a comma-separated recording with a header row. An optional
/// `time_s` column supplies the rate when none is declared; a declared rate
/// that disagrees with it by more than 0.1% produces a warning.
/// Throws ParseError (with the 1-based line number) on malformed content.
Recording read_recording(const std::filesystem::path& path, const ReadOptions& opts = {});
Recording read_recording(std::istream& in, const ReadOptions& opts = {});

/// Writes `time_s` plus one column per series. Values use the shortest text
/// form that reads back to the identical double.
void write_recording(const std::filesystem::path& path, std::span<const TimeSeries> channels);
void write_recording(std::ostream& out, std::span<const TimeSeries> channels);

}  // namespace millenv::io
