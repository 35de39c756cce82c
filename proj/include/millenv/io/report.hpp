#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "millenv/io/config.hpp"
#include "millenv/pipeline.hpp"

namespace millenv::io {

inline constexpr const char* kReportSchema = "millenv.report/1";

/// Report tree: schema tag, signature table, config echo, run warnings and
/// one entry per channel (in channel order). Key order is fixed.
ordered_json report_json(const RunConfig& cfg, const std::map<Channel, ChannelOutcome>& outcomes,
                         const std::vector<std::string>& warnings = {});

ordered_json to_json(const DefectReport& r);

/// Two-space indented JSON with a trailing newline. Re-parsing and
/// re-serializing the output reproduces it byte for byte.
std::string serialize(const ordered_json& j);

void write_report(const std::filesystem::path& path, const ordered_json& report);

}  // namespace millenv::io
