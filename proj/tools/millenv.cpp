// millenv command-line front end.
//
// Exit codes: 0 success, 1 input or parse error, 2 analysis inconclusive,
// 3 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "millenv/dsp.hpp"
#include "millenv/error.hpp"
#include "millenv/io/config.hpp"
#include "millenv/io/csv.hpp"
#include "millenv/io/plot.hpp"
#include "millenv/io/report.hpp"
#include "millenv/millsim.hpp"
#include "millenv/modal.hpp"
#include "millenv/pipeline.hpp"
#include "millenv/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace millenv;

namespace {

enum Exit : int { kOk = 0, kInput = 1, kInconclusive = 2, kConfig = 3 };

int exit_for(ErrorKind k) { return k == ErrorKind::config ? kConfig : kInput; }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  out << text;
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
  return out;
}

io::ReadOptions read_options(const io::RunConfig& cfg) {
  io::ReadOptions o;
  o.sample_rate_hz = cfg.sample_rate_hz;
  o.columns = cfg.columns;
  o.tacho = cfg.tacho;
  return o;
}

int cmd_simulate(const std::string& config, const std::string& out_dir) {
  const auto cfg = io::load_config(config);
  const auto out = prepare_out(out_dir);
  const auto sim = simulate(cfg.simulation);
  io::write_recording(out / "recording.csv", sim.channels);

  io::ordered_json truth;
  truth["rpm"] = sim.truth.rpm;
  truth["teeth"] = cfg.simulation.spec.z;
  truth["per_tooth_gain"] = sim.truth.per_tooth_gain;
  truth["pulse_times_s"] = sim.truth.pulse_times_s;
  auto impacts = io::ordered_json::array();
  for (const auto& i : sim.truth.impacts) {
    io::ordered_json e;
    e["tooth"] = i.tooth;
    e["revolution"] = i.revolution;
    e["time_s"] = i.time_s;
    e["amplitude"] = i.amplitude;
    impacts.push_back(std::move(e));
  }
  truth["impacts"] = std::move(impacts);
  write_text(out / "truth.json", io::serialize(truth));
  std::printf("simulated %zu samples at %.6g Hz, %zu tacho pulses\n", sim.channels.front().size(),
              sim.channels.front().sample_rate_hz(), sim.truth.pulse_times_s.size());
  return kOk;
}

int cmd_analyze(const std::string& config, const std::string& in, const std::string& out_dir,
                std::optional<double> t0, std::optional<double> t1) {
  const auto cfg = io::load_config(config);
  auto opts = read_options(cfg);
  opts.detect_tacho = false;
  auto rec = io::read_recording(in, opts);
  const auto out = prepare_out(out_dir);

  std::vector<std::string> warnings = rec.warnings;
  if (t0 || t1) {
    const double dur = rec.channels.front().duration_s();
    for (auto& ch : rec.channels) ch = slice_time(ch, t0.value_or(0.0), t1.value_or(dur));
  }
  const auto* tacho_series = rec.find(ChannelKind::tacho);
  if (!tacho_series) throw InputError("recording has no tacho channel");
  const auto tacho = detect_pulses(*tacho_series, cfg.tacho.threshold, cfg.tacho.hysteresis);

  std::map<Channel, Band> bands;
  for (const auto& ch : rec.channels) {
    if (auto b = cfg.band_for(ch.channel())) bands.emplace(ch.channel(), *b);
  }
  const auto outcomes = analyze_all_channels(rec.channels, tacho, cfg.cutter, bands, cfg.analysis);
  io::write_report(out / "report.json", io::report_json(cfg, outcomes, warnings));

  const double f_tooth = tooth_passing_frequency(tacho.nominal_rpm(), cfg.cutter.z);
  for (const auto& ch : rec.channels) {
    if (ch.channel().kind() == ChannelKind::tacho) continue;
    const std::string name = ch.channel().str();
    io::emit_plot_data(out / ("spectrum_" + name),
                       io::spectrum_plot(amplitude_spectrum(detrend(ch), Window::hann()), name + " spectrum",
                                         ch.unit()));
    const auto it = outcomes.find(ch.channel());
    if (it == outcomes.end() || !it->second.ok()) continue;
    const auto& a = *it->second.analysis;
    io::emit_plot_data(out / ("envelope_" + name), io::series_plot(a.envelope, name + " envelope"));
    io::emit_plot_data(out / ("envspec_" + name),
                       io::spectrum_plot(a.envelope_spectrum, name + " envelope order spectrum", ch.unit(),
                                         2.0 * f_tooth));
    io::emit_plot_data(out / ("revolution_" + name),
                       io::revolution_plot(a.averaged_revolution, name + " averaged revolution"));
    io::emit_plot_data(out / ("teeth_" + name),
                       io::tooth_profile_plot(a.report.tooth_profile, name + " tooth profile"));
  }

  bool any_conclusive = false, any_analyzed = false;
  std::optional<ErrorKind> first_error;
  for (const auto& [ch, o] : outcomes) {
    if (o.ok()) {
      any_analyzed = true;
      any_conclusive = any_conclusive || !o.analysis->report.classification.inconclusive;
      const auto& r = o.analysis->report;
      std::printf("%-6s f_rot %.4f Hz  f_tooth %.4f Hz  %s\n", ch.str().c_str(), r.f_rot_hz, r.f_tooth_hz,
                  r.classification.status.c_str());
      for (const auto& f : r.classification.findings) {
        if (f.triggered) {
          std::printf("         %s ratio %.3f >= %.3f", std::string(to_string(f.kind)).c_str(), f.amplitude_ratio,
                      f.threshold);
          if (f.tooth) std::printf(" tooth %zu", *f.tooth);
          std::printf("\n");
        }
      }
    } else {
      if (!first_error) first_error = o.error_kind;
      std::printf("%-6s error: %s\n", ch.str().c_str(), o.error.c_str());
    }
  }
  if (any_conclusive) return kOk;
  if (any_analyzed) return kInconclusive;
  return first_error ? exit_for(*first_error) : kInput;
}

int cmd_impact(const std::string& config, const std::string& in, const std::string& out_dir) {
  const auto cfg = io::load_config(config);
  auto opts = read_options(cfg);
  opts.detect_tacho = false;
  const auto rec = io::read_recording(in, opts);
  const auto* hammer = rec.find(ChannelKind::hammer);
  if (!hammer) throw InputError("recording has no hammer channel");
  const auto* response = rec.find(cfg.impact.response.kind());
  if (!response) throw InputError("recording has no " + cfg.impact.response.str() + " channel");
  const auto out = prepare_out(out_dir);

  const auto len = static_cast<std::size_t>(cfg.impact.record_s * hammer->sample_rate_hz());
  const auto records = split_impacts(*hammer, *response, len, cfg.impact.trigger);
  if (records.empty()) throw DetectionError("no complete impact found on the hammer channel");
  const auto frf = estimate_frf(records, cfg.impact.windowing);
  const auto proposal = propose_bands(frf, cfg.impact.n_bands, cfg.impact.min_coherence);

  io::emit_plot_data(out / "frf", io::frf_magnitude_plot(frf, "H1 magnitude"));
  io::emit_plot_data(out / "coherence", io::coherence_plot(frf, "coherence"));

  io::ordered_json j;
  j["averages"] = frf.averages;
  j["df_hz"] = frf.df_hz;
  j["degenerate_coherence"] = frf.degenerate_coherence;
  j["window_decay_per_s"] = frf.window_decay_per_s;
  j["status"] = proposal.status;
  auto bands = io::ordered_json::array();
  for (std::size_t i = 0; i < proposal.bands.size(); ++i) {
    io::ordered_json b;
    b["peak_hz"] = proposal.peak_hz[i];
    b["band_hz"] = io::ordered_json::array({proposal.bands[i].f_lo_hz, proposal.bands[i].f_hi_hz});
    bands.push_back(std::move(b));
    std::printf("band %zu: [%.1f, %.1f] Hz (peak %.1f Hz)\n", i, proposal.bands[i].f_lo_hz,
                proposal.bands[i].f_hi_hz, proposal.peak_hz[i]);
  }
  j["bands"] = std::move(bands);
  write_text(out / "bands.json", io::serialize(j));
  if (proposal.bands.empty()) {
    std::printf("%s\n", proposal.status.c_str());
    return kInconclusive;
  }
  return kOk;
}

int cmd_spectrum(const std::string& in, const std::string& channel, std::optional<double> rate,
                 const std::string& window, const std::string& out_stem) {
  const auto ch = Channel::parse(channel);
  io::ReadOptions opts;
  opts.sample_rate_hz = rate;
  opts.detect_tacho = false;
  const auto rec = io::read_recording(in, opts);
  const TimeSeries* x = nullptr;
  for (const auto& s : rec.channels) {
    if (s.channel() == ch) x = &s;
  }
  if (!x) throw InputError("recording has no " + ch.str() + " channel");
  const auto spec = amplitude_spectrum(detrend(*x), Window::parse(window));
  const auto plot = io::spectrum_plot(spec, ch.str() + " spectrum", x->unit());
  if (!out_stem.empty()) {
    io::emit_plot_data(out_stem, plot);
  } else {
    std::cout << io::to_columns(plot);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Milling cutter condition monitoring by envelope analysis"};
  app.require_subcommand(1);
  std::string isa;
  app.add_option("--isa", isa, "Kernel set: scalar or avx2 (default: best available)");

  std::string config, in, out, channel, window = "hann", out_stem;
  std::optional<double> t0, t1, rate;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic milling recording");
  sim->add_option("--config", config, "JSON config")->required();
  sim->add_option("--out", out, "Output directory")->required();

  auto* ana = app.add_subcommand("analyze", "Envelope analysis of a recording");
  ana->add_option("--config", config, "JSON config")->required();
  ana->add_option("--in", in, "Input CSV")->required();
  ana->add_option("--out", out, "Output directory")->required();
  ana->add_option("--t0", t0, "Analysis start (s)");
  ana->add_option("--t1", t1, "Analysis end (s)");

  auto* imp = app.add_subcommand("impact", "FRF and resonance bands from hammer tests");
  imp->add_option("--config", config, "JSON config")->required();
  imp->add_option("--in", in, "Input CSV with hammer and response columns")->required();
  imp->add_option("--out", out, "Output directory")->required();

  auto* spc = app.add_subcommand("spectrum", "Amplitude spectrum of one channel");
  spc->add_option("--in", in, "Input CSV")->required();
  spc->add_option("--channel", channel, "Channel name")->required();
  spc->add_option("--rate", rate, "Sample rate (Hz) when the file has no time column");
  spc->add_option("--window", window, "hann or rectangular");
  spc->add_option("--out", out_stem, "Write <stem>.dat and <stem>.svg instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (!isa.empty()) {
      simd::Isa want{};
      if (!simd::parse_isa(isa, want)) throw ConfigError("unknown --isa '" + isa + "'");
      if (!simd::select(want)) throw ConfigError("kernel set '" + isa + "' is not available on this CPU");
    }
    if (*sim) return cmd_simulate(config, out);
    if (*ana) return cmd_analyze(config, in, out, t0, t1);
    if (*imp) return cmd_impact(config, in, out);
    return cmd_spectrum(in, channel, rate, window, out_stem);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.kind())).c_str(), e.what());
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  }
}
