#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "millenv/modal.hpp"
#include "millenv/signal.hpp"
#include "millenv/sync.hpp"

namespace millenv::io {

struct PlotData {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  bool bars = false;
};

PlotData spectrum_plot(const Spectrum& s, std::string title, std::string unit,
                       std::optional<double> max_hz = std::nullopt);
PlotData series_plot(const TimeSeries& x, std::string title);
/// One averaged revolution against shaft angle in degrees.
PlotData revolution_plot(std::span<const double> avg_rev, std::string title);
PlotData tooth_profile_plot(const ToothProfile& tp, std::string title);
PlotData frf_magnitude_plot(const Frf& frf, std::string title);
PlotData coherence_plot(const Frf& frf, std::string title);

/// Two-column text file: '#'-prefixed header, then "x y" rows.
std::string to_columns(const PlotData& p);
/// Stand-alone SVG line (or bar) chart. Long series are reduced to a
/// min/max envelope per pixel column.
std::string to_svg(const PlotData& p);

/// Writes <stem>.dat and <stem>.svg. Output is deterministic.
void emit_plot_data(const std::filesystem::path& stem, const PlotData& p);

}  // namespace millenv::io
