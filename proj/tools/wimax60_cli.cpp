// wimax60: loopback runs, Eb/N0 sweeps, capture inspection and example
// channel profiles.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 runtime or data error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "wimax60/config.hpp"
#include "wimax60/error.hpp"
#include "wimax60/link.hpp"
#include "wimax60/metrics.hpp"

namespace fs = std::filesystem;
using namespace wimax60;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
};

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig cfg;
  if (!g.config_path.empty()) cfg = load_run_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_report(const fs::path& path, const LinkReport& report, const RunConfig& cfg,
                  double occupied_bw) {
  auto out = open_out(path);
  report.write_text(out);
  out << std::setprecision(12) << "occupied_bw_hz=" << occupied_bw << '\n';
  out << "ser_ber_consistent=" << (report.ser_ber_consistent() ? "yes" : "no") << '\n';
  out << "\n[resolved_config]\n" << cfg.to_text();
}

int cmd_loopback(const GlobalOptions& g) {
  const RunConfig cfg = resolve_config(g);
  for (const auto& w : cfg.channel_profile().warnings(cfg.sample_rate)) std::cerr << "warning: " << w << '\n';

  const LoopbackResult res = run_loopback(cfg);
  const fs::path out(g.out_dir);
  fs::create_directories(out);
  write_report(out / "report.txt", res.burst.report, cfg, res.occupied_bw_hz);
  capture_write((out / "tx.iqcap").string(), res.burst.tx, cfg.center_freq);
  capture_write((out / "rx.iqcap").string(), res.burst.rx, cfg.center_freq);
  {
    auto f = open_out(out / "spectrum.csv");
    write_spectrum_csv(f, res.tx_spectrum);
  }
  {
    auto f = open_out(out / "constellation.csv");
    write_constellation_csv(f, res.burst.demod);
  }
  {
    auto f = open_out(out / "estimate.csv");
    write_estimate_csv(f, res.burst.estimate.h_hat);
  }
  {
    auto f = open_out(out / "truth.csv");
    write_estimate_csv(f, res.burst.truth);
  }

  const LinkReport& r = res.burst.report;
  std::cout << std::setprecision(6) << "bits " << r.bits_compared << "  errors " << r.bit_errors
            << "  ber " << r.ber << "  evm " << r.evm_pct << "%  pdus " << r.pdus_ok << '/'
            << r.pdus_sent << "  occupied_bw " << res.occupied_bw_hz / 1e6 << " MHz\n";
  return kExitOk;
}

int cmd_sweep(const GlobalOptions& g, const std::string& ebn0_text, bool ebn0_given) {
  RunConfig cfg = resolve_config(g);
  if (ebn0_given) cfg.sweep_ebn0_db = parse_double_list(ebn0_text);
  if (cfg.sweep_ebn0_db.empty()) {
    throw ConfigError("sweep needs Eb/N0 values: pass --ebn0 or set [sweep] ebn0_db");
  }
  const auto points = run_sweep(cfg, cfg.sweep_ebn0_db);

  const fs::path out(g.out_dir);
  fs::create_directories(out);
  {
    auto f = open_out(out / "sweep.csv");
    f << LinkReport::csv_header() << '\n';
    for (const auto& p : points) f << p.report.csv_row() << '\n';
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    capture_write((out / ("sweep_point_" + std::to_string(i) + "_rx.iqcap")).string(), points[i].first_rx,
                  cfg.center_freq);
  }
  {
    auto f = open_out(out / "sweep_config.txt");
    f << cfg.to_text();
  }
  for (const auto& p : points) {
    std::cout << std::setprecision(6) << "Eb/N0 " << *p.report.ebn0_db << " dB  ber " << p.report.ber
              << "  theory " << qpsk_theory_ber(*p.report.ebn0_db) << "  evm " << p.report.evm_pct << "%\n";
  }
  return kExitOk;
}

int cmd_inspect(const GlobalOptions& g, const std::string& path, std::size_t segment) {
  const IqCapture cap = capture_read(path);
  const SampleBuffer& buf = cap.buffer;
  double peak = 0.0;
  for (const auto& s : buf.samples()) peak = std::max(peak, std::abs(s));

  std::cout << std::setprecision(12);
  std::cout << "file=" << path << '\n';
  std::cout << "version=" << kCaptureVersion << '\n';
  std::cout << "sample_rate=" << buf.sample_rate() << '\n';
  std::cout << "center_freq=" << cap.center_freq << '\n';
  std::cout << "sample_count=" << buf.size() << '\n';
  std::cout << "duration_s=" << static_cast<double>(buf.size()) / buf.sample_rate() << '\n';
  std::cout << "mean_power=" << buf.mean_power() << '\n';
  std::cout << "peak_magnitude=" << peak << '\n';

  if (buf.empty()) return kExitOk;
  std::size_t seg = std::min(segment, buf.size());
  while (!is_power_of_two(seg)) seg &= seg - 1;
  const SpectrumEstimate spec = psd_estimate(buf, seg);
  std::size_t peak_bin = 0;
  for (std::size_t i = 1; i < spec.size(); ++i) {
    if (spec.power_db[i] > spec.power_db[peak_bin]) peak_bin = i;
  }
  std::cout << "spectrum_peak_hz=" << spec.bin_freqs[peak_bin] << '\n';
  if (spec.size() >= 2) {
    try {
      std::cout << "occupied_bw_hz=" << occupied_bandwidth(spec) << '\n';
    } catch (const GeometryError&) {
      std::cout << "occupied_bw_hz=nan\n";
    }
  }

  const fs::path out(g.out_dir);
  fs::create_directories(out);
  const fs::path csv = out / (fs::path(path).stem().string() + "_spectrum.csv");
  auto f = open_out(csv);
  write_spectrum_csv(f, spec);
  std::cout << "spectrum_csv=" << csv.string() << '\n';
  return kExitOk;
}

int cmd_make_profile(const GlobalOptions& g, const std::string& target) {
  // Three-path vehicular example: delays well inside the default 64-sample
  // (28.6 us) guard interval, 200 Hz Doppler.
  ChannelProfile p;
  const double fs = kDefaultSampleRate;
  p.taps = {Tap{0.0, std::pow(10.0, -0.0 / 10.0), 200.0}, Tap{5.0 / fs, std::pow(10.0, -3.0 / 10.0), 200.0},
            Tap{12.0 / fs, std::pow(10.0, -8.0 / 10.0), 200.0}};
  double total = 0.0;
  for (const auto& t : p.taps) total += t.power;
  for (auto& t : p.taps) t.power /= total;
  p.noise_variance = 0.0;

  const fs::path path = target.empty() ? fs::path(g.out_dir) / "profile.txt" : fs::path(target);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto f = open_out(path);
  write_profile(f, p);
  std::cout << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WiMAX OFDM link-level simulator"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "Run configuration file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides [run] seed)");
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();

  auto* loopback = app.add_subcommand("loopback", "Run the full chain once and write artifacts");
  auto* sweep = app.add_subcommand("sweep", "BER/EVM versus Eb/N0");
  std::string ebn0_text;
  auto* ebn0_opt = sweep->add_option("--ebn0", ebn0_text, "Comma-separated Eb/N0 values in dB");
  auto* inspect = app.add_subcommand("inspect", "Summarize an I/Q capture and write its spectrum");
  std::string capture_path;
  std::size_t segment = 1024;
  inspect->add_option("capture", capture_path, "Capture file")->required();
  inspect->add_option("--segment", segment, "Spectrum segment length")->capture_default_str();
  auto* make_profile = app.add_subcommand("make-profile", "Write an example channel profile");
  std::string profile_target;
  make_profile->add_option("path", profile_target, "Destination (default <out>/profile.txt)");

  for (auto* sub : {loopback, sweep, inspect, make_profile}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*loopback) return cmd_loopback(g);
    if (*sweep) return cmd_sweep(g, ebn0_text, static_cast<bool>(*ebn0_opt));
    if (*inspect) return cmd_inspect(g, capture_path, segment);
    if (*make_profile) return cmd_make_profile(g, profile_target);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
