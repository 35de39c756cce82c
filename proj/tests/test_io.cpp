#include "catch_amalgamated.hpp"

#include <cmath>
#include <sstream>

#include "millenv/error.hpp"
#include "millenv/io/config.hpp"
#include "millenv/io/csv.hpp"
#include "millenv/io/plot.hpp"
#include "millenv/io/report.hpp"
#include "millenv/millsim.hpp"

using namespace millenv;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string csv_rows(std::size_t rows, double fs, std::size_t bad_line = 0) {
  std::ostringstream s;
  s << "time_s,ax,ay,az,fx,fy,fz,tacho\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t line = i + 2;
    const double t = static_cast<double>(i) / fs;
    s << t << ',' << (line == bad_line ? "NaN" : std::to_string(std::sin(t))) << ",0.1,0.2,1,2,3,"
      << ((i % 100) >= 50 && (i % 100) < 60 ? 5 : 0) << '\n';
  }
  return s.str();
}

io::Recording read_text(const std::string& text, const io::ReadOptions& o = {}) {
  std::istringstream in(text);
  return io::read_recording(in, o);
}

}  // namespace

TEST_CASE("csv round trip is exact", "[io]") {
  SimConfig cfg;
  cfg.duration_s = 0.2;
  cfg.noise_rms = 0.3;
  const auto sim = simulate(cfg);
  std::ostringstream out;
  io::write_recording(out, sim.channels);
  const std::string text = out.str();
  CHECK(text.substr(0, text.find('\n')) == "time_s,ax,ay,az,fx,fy,fz,tacho");

  const auto rec = read_text(text);
  REQUIRE(rec.channels.size() == 7);
  for (std::size_t c = 0; c < 7; ++c) {
    CHECK(rec.channels[c].channel() == sim.channels[c].channel());
    CHECK(rec.channels[c].sample_rate_hz() == Approx(25000.0).epsilon(1e-9));
    const auto a = rec.channels[c].samples(), b = sim.channels[c].samples();
    REQUIRE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  REQUIRE(rec.tacho);
  CHECK(rec.tacho->pulse_count() == sim.truth.pulse_times_s.size());
  CHECK(rec.warnings.empty());

  // The rate derived from printed times is within rounding of 25 kHz; a
  // declared rate makes the rewrite byte-identical.
  io::ReadOptions declared;
  declared.sample_rate_hz = 25000.0;
  std::ostringstream again;
  io::write_recording(again, read_text(text, declared).channels);
  CHECK(again.str() == text);
}

TEST_CASE("csv parse errors carry the line number", "[io]") {
  SECTION("NaN on line 42") {
    try {
      read_text(csv_rows(100, 1000.0, 42));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 42);
      CHECK_THAT(e.what(), ContainsSubstring("line 42") && ContainsSubstring("ax"));
    }
  }
  SECTION("non-numeric cell") {
    std::string text = csv_rows(10, 1000.0);
    text.replace(text.find(",0.1,", text.find('\n') + 1), 5, ",abc,");
    CHECK_THROWS_MATCHES(read_text(text), ParseError, Catch::Matchers::MessageMatches(ContainsSubstring("line 2")));
  }
  SECTION("short row") {
    CHECK_THROWS_AS(read_text("time_s,ax\n0,1\n0.001\n"), ParseError);
  }
  SECTION("empty file and header only") {
    CHECK_THROWS_AS(read_text(""), ParseError);
    CHECK_THROWS_AS(read_text("time_s,ax\n"), ParseError);
  }
  SECTION("no channel column") {
    CHECK_THROWS_AS(read_text("time_s,foo\n0,1\n"), ParseError);
  }
  SECTION("mapped column missing") {
    io::ReadOptions o;
    o.columns = {{Channel(ChannelKind::ax), "accel_x"}};
    CHECK_THROWS_MATCHES(read_text(csv_rows(10, 1000.0), o), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("accel_x")));
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(io::read_recording("/nonexistent/x.csv"), InputError);
  }
}

TEST_CASE("sample rate resolution", "[io]") {
  const std::string text = csv_rows(200, 1000.0);
  CHECK(read_text(text).channels[0].sample_rate_hz() == Approx(1000.0).epsilon(1e-6));
  io::ReadOptions o;
  o.sample_rate_hz = 1000.5;
  auto rec = read_text(text, o);
  CHECK(rec.channels[0].sample_rate_hz() == 1000.5);
  CHECK(rec.warnings.empty());
  o.sample_rate_hz = 2000.0;
  rec = read_text(text, o);
  CHECK(rec.channels[0].sample_rate_hz() == 2000.0);
  REQUIRE(rec.warnings.size() == 1);
  CHECK_THAT(rec.warnings[0], ContainsSubstring("0.1%"));
  CHECK_THROWS_AS(read_text("ax\n1\n2\n"), InputError);
  o.sample_rate_hz = 100.0;
  CHECK(read_text("ax\n1\n2\n", o).channels[0].size() == 2);
}

TEST_CASE("column remapping", "[io]") {
  io::ReadOptions o;
  o.columns = {{Channel(ChannelKind::ax), "acc"}, {Channel(ChannelKind::hammer), "hit"}};
  o.sample_rate_hz = 10.0;
  const auto rec = read_text("hit,other,acc\n1,9,4\n2,9,5\n", o);
  REQUIRE(rec.channels.size() == 2);
  const auto* ax = rec.find(ChannelKind::ax);
  const auto* hm = rec.find(ChannelKind::hammer);
  REQUIRE(ax);
  REQUIRE(hm);
  CHECK(ax->samples()[1] == 5.0);
  CHECK(hm->samples()[0] == 1.0);
  CHECK_FALSE(rec.find(ChannelKind::tacho));
}

TEST_CASE("config parsing", "[io]") {
  const auto j = nlohmann::json::parse(R"({
    "cutter": {"teeth": 4},
    "sample_rate_hz": 20000,
    "bands": {"ax": [1000, 3000], "fx": [300, 1500]},
    "default_band": [1500, 2500],
    "simulation": {"rpm": 1500, "per_tooth_gain": [1, 1, 0.5, 1], "seed": 7},
    "impact": {"response_channel": "ay", "n_bands": 2}
  })");
  const auto cfg = io::parse_config(j);
  CHECK(cfg.cutter.z == 4);
  CHECK(cfg.sample_rate_hz == 20000.0);
  CHECK(cfg.band_for(Channel(ChannelKind::ax))->f_lo_hz == 1000.0);
  CHECK(cfg.band_for(Channel(ChannelKind::az))->f_hi_hz == 2500.0);
  CHECK(cfg.simulation.resolved_gains()[2] == 0.5);
  CHECK(cfg.simulation.seed == 7);
  CHECK(cfg.impact.response == Channel(ChannelKind::ay));

  SECTION("canonical form round-trips") {
    const auto canon = io::to_json(cfg);
    const auto again = io::to_json(io::parse_config(nlohmann::json::parse(canon.dump())));
    CHECK(again.dump() == canon.dump());
    CHECK(io::to_json(io::parse_config(nlohmann::json::object())).dump() ==
          io::to_json(io::RunConfig{}).dump());
  }
  SECTION("rejections") {
    const auto bad = [](const char* text) { return io::parse_config(nlohmann::json::parse(text)); };
    CHECK_THROWS_AS(bad(R"({"cutter": {"teth": 6}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"unknown": 1})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"bands": {"ax": [3000, 1000]}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"bands": {"bogus": [1, 2]}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"simulation": {"rpm": "fast"}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"simulation": {"per_tooth_gain": [1, 1]}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"sync": {"samples_per_rev": 1024}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"([1, 2])"), ConfigError);
    CHECK_THROWS_AS(io::load_config("/nonexistent/cfg.json"), ConfigError);
  }
}

TEST_CASE("report serialization is stable", "[io][invariant]") {
  SimConfig sc;
  sc.per_tooth_gain = {1, 1, 1, 0.5, 1, 1};
  const auto sim = simulate(sc);
  const auto tacho = detect_pulses(sim.channel(ChannelKind::tacho), 2.5, 0.5);
  io::RunConfig cfg;
  cfg.default_band = Band{1500, 2500};
  std::map<Channel, Band> bands;
  const std::span<const TimeSeries> accel(sim.channels.data(), 3);
  for (const auto& c : accel) bands[c.channel()] = *cfg.default_band;
  const auto out = analyze_all_channels(accel, tacho, cfg.cutter, bands, cfg.analysis);
  const auto report = io::report_json(cfg, out, {"note"});
  const std::string text = io::serialize(report);
  CHECK(text.back() == '\n');
  CHECK(io::serialize(nlohmann::ordered_json::parse(text)) == text);
  CHECK(text.find("\"schema\"") < text.find("\"channels\""));
  CHECK_THAT(text, ContainsSubstring(io::kReportSchema) && ContainsSubstring("weak_tooth"));
  const auto out2 = analyze_all_channels(accel, tacho, cfg.cutter, bands, cfg.analysis);
  CHECK(io::serialize(io::report_json(cfg, out2, {"note"})) == text);
}

TEST_CASE("plot output", "[io]") {
  Spectrum s;
  s.df_hz = 10.0;
  s.amplitudes = {0.0, 1.0, 0.5, 0.25};
  const auto p = io::spectrum_plot(s, "spec <ax>", "m/s^2", 25.0);
  CHECK(p.x.size() == 3);
  const auto cols = io::to_columns(p);
  CHECK(cols.rfind("# spec <ax>\n", 0) == 0);
  CHECK_THAT(cols, ContainsSubstring("\n20 0.5\n"));
  const auto svg = io::to_svg(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK_THAT(svg, ContainsSubstring("spec &lt;ax&gt;") && ContainsSubstring("</svg>"));
  CHECK(io::to_svg(p) == svg);

  std::vector<double> big(100000);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = std::sin(0.01 * static_cast<double>(i));
  const auto series = io::series_plot(TimeSeries(big, 1000.0, Channel(ChannelKind::ax)), "long");
  CHECK(io::to_svg(series).size() < 200000);
}
