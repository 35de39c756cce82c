#include "millenv/io/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "millenv/error.hpp"

namespace millenv::io {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_cell(std::string_view cell, std::size_t line, std::string_view column) {
  cell = trim(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
    throw ParseError(line, "non-numeric value '" + std::string(cell) + "' in column " + std::string(column));
  }
  if (!std::isfinite(v)) {
    throw ParseError(line, "non-finite value '" + std::string(cell) + "' in column " + std::string(column));
  }
  return v;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

const TimeSeries* Recording::find(ChannelKind kind) const noexcept {
  for (const auto& c : channels) {
    if (c.channel().kind() == kind && !c.channel().is_envelope()) return &c;
  }
  return nullptr;
}

Recording read_recording(std::istream& in, const ReadOptions& opts) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty file (missing header row)");
  const auto header_cells = split(line);
  std::vector<std::string> header;
  for (auto h : header_cells) header.emplace_back(trim(h));

  auto column_of = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };

  ColumnMap map = opts.columns;
  if (map.empty()) {
    for (const auto& h : header) {
      if (auto c = Channel::try_parse(h); c && !c->is_envelope()) map.emplace_back(*c, h);
    }
    if (map.empty()) throw ParseError(1, "header names no known channel column");
  }
  std::vector<std::size_t> col_index;
  for (const auto& [channel, name] : map) {
    const auto idx = column_of(name);
    if (!idx) throw ParseError(1, "missing column '" + name + "' for channel " + channel.str());
    col_index.push_back(*idx);
  }
  const auto time_col = column_of("time_s");

  std::vector<std::vector<double>> data(map.size());
  std::vector<double> times;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                    std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < map.size(); ++c) {
      data[c].push_back(parse_cell(cells[col_index[c]], line_no, header[col_index[c]]));
    }
    if (time_col) times.push_back(parse_cell(cells[*time_col], line_no, "time_s"));
  }
  if (data.front().empty()) throw ParseError(line_no, "no data rows");

  Recording rec;
  double rate = 0.0;
  std::optional<double> time_rate;
  if (times.size() >= 2) {
    std::vector<double> dt(times.size() - 1);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) dt[i] = times[i + 1] - times[i];
    std::nth_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2), dt.end());
    const double med = dt[dt.size() / 2];
    if (med > 0.0) time_rate = 1.0 / med;
  }
  if (opts.sample_rate_hz) {
    rate = *opts.sample_rate_hz;
    if (time_rate && std::abs(*time_rate - rate) > 1e-3 * rate) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "declared sample rate %.6g Hz differs from time column (%.6g Hz) by more than 0.1%%; "
                    "using the declared rate",
                    rate, *time_rate);
      rec.warnings.emplace_back(buf);
    }
  } else if (time_rate) {
    rate = *time_rate;
  } else {
    throw InputError("no sample rate: declare one in the config or provide a time_s column");
  }

  for (std::size_t c = 0; c < map.size(); ++c) {
    rec.channels.emplace_back(std::move(data[c]), rate, map[c].first);
  }
  if (opts.detect_tacho) {
    if (const auto* t = rec.find(ChannelKind::tacho)) {
      rec.tacho = detect_pulses(*t, opts.tacho.threshold, opts.tacho.hysteresis);
    }
  }
  return rec;
}

Recording read_recording(const std::filesystem::path& path, const ReadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_recording(in, opts);
}

void write_recording(std::ostream& out, std::span<const TimeSeries> channels) {
  if (channels.empty()) throw InputError("nothing to write");
  const std::size_t n = channels.front().size();
  const double rate = channels.front().sample_rate_hz();
  for (const auto& c : channels) {
    if (c.size() != n || c.sample_rate_hz() != rate) {
      throw InputError("all channels written to one CSV must share length and rate");
    }
  }
  std::string buf = "time_s";
  for (const auto& c : channels) buf += "," + c.channel().str();
  buf += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    append_number(buf, static_cast<double>(i) / rate);
    for (const auto& c : channels) {
      buf += ',';
      append_number(buf, c[i]);
    }
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

void write_recording(const std::filesystem::path& path, std::span<const TimeSeries> channels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_recording(out, channels);
}

}  // namespace millenv::io
