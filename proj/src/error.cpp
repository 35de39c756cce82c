#include "millenv/error.hpp"

#include <cstdio>

namespace millenv {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::range: return "range";
    case ErrorKind::size: return "size";
    case ErrorKind::detection: return "detection";
    case ErrorKind::quality: return "quality";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::input: return "input";
    case ErrorKind::parse: return "parse";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

namespace {

std::string describe(const std::vector<GapViolation>& gaps) {
  std::string msg = "tacho gap consistency violated (allowed: within 50% of median gap):";
  for (const auto& g : gaps) {
    char buf[128];
    std::snprintf(buf, sizeof buf, " gap %zu = %.6g s (%.2fx median %.6g s);", g.index, g.gap_s,
                  g.gap_s / g.median_gap_s, g.median_gap_s);
    msg += buf;
  }
  return msg;
}

}  // namespace

QualityError::QualityError(std::vector<GapViolation> gaps)
    : Error(ErrorKind::quality, describe(gaps)), gaps_(std::move(gaps)) {}

}  // namespace millenv
