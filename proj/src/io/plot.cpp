#include "millenv/io/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "millenv/error.hpp"

namespace millenv::io {

namespace {

constexpr double kWidth = 800.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 36.0, kBottom = 50.0;

std::string num(double v, const char* f = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

PlotData spectrum_plot(const Spectrum& s, std::string title, std::string unit, std::optional<double> max_hz) {
  PlotData p{std::move(title), "frequency_hz", "amplitude_" + unit, {}, {}};
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = s.frequency(k);
    if (max_hz && f > *max_hz) break;
    p.x.push_back(f);
    p.y.push_back(s.amplitudes[k]);
  }
  return p;
}

PlotData series_plot(const TimeSeries& x, std::string title) {
  PlotData p{std::move(title), "time_s", x.channel().str() + "_" + x.unit(), {}, {}};
  p.x.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p.x.push_back(static_cast<double>(i) / x.sample_rate_hz());
    p.y.push_back(x[i]);
  }
  return p;
}

PlotData revolution_plot(std::span<const double> avg_rev, std::string title) {
  PlotData p{std::move(title), "angle_deg", "averaged_envelope", {}, {}};
  for (std::size_t i = 0; i < avg_rev.size(); ++i) {
    p.x.push_back(360.0 * static_cast<double>(i) / static_cast<double>(avg_rev.size()));
    p.y.push_back(avg_rev[i]);
  }
  return p;
}

PlotData tooth_profile_plot(const ToothProfile& tp, std::string title) {
  PlotData p{std::move(title), "tooth_index", "mean_load", {}, {}, true};
  for (std::size_t i = 0; i < tp.mean_load.size(); ++i) {
    p.x.push_back(static_cast<double>(i));
    p.y.push_back(tp.mean_load[i]);
  }
  return p;
}

PlotData frf_magnitude_plot(const Frf& frf, std::string title) {
  PlotData p{std::move(title), "frequency_hz", "h1_magnitude", {}, {}};
  for (std::size_t k = 0; k < frf.size(); ++k) {
    p.x.push_back(frf.frequency(k));
    p.y.push_back(frf.magnitude(k));
  }
  return p;
}

PlotData coherence_plot(const Frf& frf, std::string title) {
  PlotData p{std::move(title), "frequency_hz", "coherence", {}, {}};
  for (std::size_t k = 0; k < frf.size(); ++k) {
    p.x.push_back(frf.frequency(k));
    p.y.push_back(frf.coherence[k]);
  }
  return p;
}

std::string to_columns(const PlotData& p) {
  std::string out = "# " + p.title + "\n# " + p.x_label + " " + p.y_label + "\n";
  for (std::size_t i = 0; i < p.x.size(); ++i) out += num(p.x[i]) + " " + num(p.y[i]) + "\n";
  return out;
}

std::string to_svg(const PlotData& p) {
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (!p.x.empty()) {
    const auto [xmin, xmax] = std::minmax_element(p.x.begin(), p.x.end());
    const auto [ymin, ymax] = std::minmax_element(p.y.begin(), p.y.end());
    x0 = *xmin;
    x1 = *xmax;
    y0 = std::min(0.0, *ymin);
    y1 = *ymax;
    if (p.bars) {
      x0 -= 0.5;
      x1 += 0.5;
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth, "%.0f") + "\" height=\"" +
                  num(kHeight, "%.0f") + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2, "%.1f") + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(p.title) + "</text>\n";
  s += "<rect x=\"" + num(kLeft, "%.1f") + "\" y=\"" + num(kTop, "%.1f") + "\" width=\"" + num(pw, "%.1f") +
       "\" height=\"" + num(ph, "%.1f") + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    s += "<text x=\"" + num(sx(fx), "%.1f") + "\" y=\"" + num(kHeight - kBottom + 16, "%.1f") +
         "\" text-anchor=\"middle\">" + num(fx, "%.4g") + "</text>\n";
    s += "<text x=\"" + num(kLeft - 6, "%.1f") + "\" y=\"" + num(sy(fy) + 4, "%.1f") +
         "\" text-anchor=\"end\">" + num(fy, "%.4g") + "</text>\n";
  }
  s += "<text x=\"" + num(kLeft + pw / 2, "%.1f") + "\" y=\"" + num(kHeight - 10, "%.1f") +
       "\" text-anchor=\"middle\">" + escape(p.x_label) + "</text>\n";
  s += "<text x=\"14\" y=\"" + num(kTop + ph / 2, "%.1f") + "\" transform=\"rotate(-90 14 " +
       num(kTop + ph / 2, "%.1f") + ")\" text-anchor=\"middle\">" + escape(p.y_label) + "</text>\n";

  if (p.bars) {
    const double bw = 0.6 * pw / (x1 - x0);
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      s += "<rect x=\"" + num(sx(p.x[i]) - bw / 2, "%.2f") + "\" y=\"" + num(sy(p.y[i]), "%.2f") +
           "\" width=\"" + num(bw, "%.2f") + "\" height=\"" + num(sy(y0) - sy(p.y[i]), "%.2f") +
           "\" fill=\"#3a6ea5\"/>\n";
    }
  } else if (!p.x.empty()) {
    std::string pts;
    const auto columns = static_cast<std::size_t>(pw);
    if (p.x.size() <= 2 * columns) {
      for (std::size_t i = 0; i < p.x.size(); ++i) pts += num(sx(p.x[i]), "%.2f") + "," + num(sy(p.y[i]), "%.2f") + " ";
    } else {
      // Min/max per pixel column keeps peaks visible.
      const std::size_t per = (p.x.size() + columns - 1) / columns;
      for (std::size_t start = 0; start < p.x.size(); start += per) {
        const std::size_t stop = std::min(p.x.size(), start + per);
        const auto [lo, hi] = std::minmax_element(p.y.begin() + static_cast<std::ptrdiff_t>(start),
                                                  p.y.begin() + static_cast<std::ptrdiff_t>(stop));
        const double xc = sx(p.x[start]);
        pts += num(xc, "%.2f") + "," + num(sy(*lo), "%.2f") + " " + num(xc, "%.2f") + "," + num(sy(*hi), "%.2f") + " ";
      }
    }
    s += "<polyline fill=\"none\" stroke=\"#3a6ea5\" stroke-width=\"1\" points=\"" + pts + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

void emit_plot_data(const std::filesystem::path& stem, const PlotData& p) {
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
  };
  auto dat = stem;
  dat += ".dat";
  auto svg = stem;
  svg += ".svg";
  write(dat, to_columns(p));
  write(svg, to_svg(p));
}

}  // namespace millenv::io
