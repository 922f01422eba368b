#include "wimax60/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wimax60/error.hpp"

namespace wimax60 {

namespace {

constexpr double kSlowFadingOversample = 64.0;
constexpr double kMinDopplerBins = 256.0;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + text + "'", line);
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ConfigError("expected a number, got '" + text + "'", line);
  }
  return v;
}

}  // namespace

void ChannelProfile::validate() const {
  if (taps.empty()) throw ProfileError("channel profile has no taps");
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const Tap& t = taps[i];
    if (!(t.delay_s >= 0.0) || !std::isfinite(t.delay_s)) throw ProfileError("tap delay must be >= 0");
    if (i > 0 && !(t.delay_s > taps[i - 1].delay_s)) {
      throw ProfileError("tap delays must be strictly increasing");
    }
    if (!(t.power > 0.0) || !std::isfinite(t.power)) throw ProfileError("tap power must be positive");
    if (!(t.doppler_hz >= 0.0) || !std::isfinite(t.doppler_hz)) {
      throw ProfileError("Doppler frequency must be >= 0");
    }
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw ProfileError("noise variance must be >= 0");
  }
}

std::vector<std::size_t> ChannelProfile::delay_samples(double sample_rate) const {
  std::vector<std::size_t> d;
  d.reserve(taps.size());
  for (const Tap& t : taps) d.push_back(static_cast<std::size_t>(std::llround(t.delay_s * sample_rate)));
  return d;
}

std::size_t ChannelProfile::max_delay_samples(double sample_rate) const {
  const auto d = delay_samples(sample_rate);
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

std::vector<std::string> ChannelProfile::warnings(double sample_rate) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const double exact = taps[i].delay_s * sample_rate;
    if (std::abs(exact - std::round(exact)) > 0.01) {
      std::ostringstream msg;
      msg << "tap " << i << " delay falls " << std::abs(exact - std::round(exact))
          << " samples off the sample grid; rounded to " << std::llround(exact);
      out.push_back(msg.str());
    }
  }
  double total = 0.0;
  for (const Tap& t : taps) total += t.power;
  if (std::abs(total - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "tap powers sum to " << total << " rather than 1";
    out.push_back(msg.str());
  }
  return out;
}

ChannelProfile ChannelProfile::identity() { return ChannelProfile{{Tap{0.0, 1.0, 0.0}}, 0.0}; }

ChannelProfile read_profile(std::istream& in) {
  ChannelProfile profile;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "tap") {
      std::vector<std::string> parts;
      std::stringstream ss(value);
      std::string part;
      while (std::getline(ss, part, ',')) parts.push_back(trim(part));
      if (parts.size() != 3) throw ConfigError("tap needs delay_ns,power_db,doppler_hz", line_no);
      Tap t;
      t.delay_s = parse_double(parts[0], line_no) * 1e-9;
      t.power = std::pow(10.0, parse_double(parts[1], line_no) / 10.0);
      t.doppler_hz = parse_double(parts[2], line_no);
      profile.taps.push_back(t);
    } else if (key == "noise_variance") {
      profile.noise_variance = parse_double(value, line_no);
    } else {
      throw ConfigError("unknown profile key '" + key + "'", line_no);
    }
  }
  try {
    profile.validate();
  } catch (const ProfileError& e) {
    throw ConfigError(e.what(), line_no);
  }
  return profile;
}

ChannelProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open channel profile '" + path + "'");
  return read_profile(in);
}

void write_profile(std::ostream& out, const ChannelProfile& profile) {
  const auto old_precision = out.precision(17);
  out << "# tap = delay_ns,power_db,doppler_hz\n";
  for (const Tap& t : profile.taps) {
    out << "tap = " << t.delay_s * 1e9 << ',' << 10.0 * std::log10(t.power) << ',' << t.doppler_hz
        << '\n';
  }
  out << "noise_variance = " << profile.noise_variance << '\n';
  out.precision(old_precision);
}

FadingTrajectory::FadingTrajectory(std::vector<CVec> gains, double sample_rate)
    : gains_(std::move(gains)), sample_rate_(sample_rate) {
  for (const auto& g : gains_) {
    if (g.size() != gains_.front().size()) throw GeometryError("ragged fading trajectory");
  }
}

FadingTrajectory FadingTrajectory::constant(const CVec& gains, std::size_t n_samples,
                                            double sample_rate) {
  std::vector<CVec> g;
  g.reserve(gains.size());
  for (const cplx& v : gains) g.emplace_back(n_samples, v);
  return FadingTrajectory(std::move(g), sample_rate);
}

CVec jakes_process(std::size_t n, double rho, RandomSource& rng) {
  if (!(rho > 0.0 && rho <= 0.25)) throw ProfileError("normalized Doppler must lie in (0, 0.25]");
  const std::size_t len = std::max(next_pow2(n), next_pow2(static_cast<std::size_t>(
                                                     std::ceil(kMinDopplerBins / rho))));
  const auto km = static_cast<std::size_t>(std::floor(rho * static_cast<double>(len)));

  // Square root of the sampled Jakes spectrum; the DC bin is left empty and
  // the edge bin km holds the spectrum integrated over its cell.
  std::vector<double> shape(len, 0.0);
  for (std::size_t k = 1; k < km; ++k) {
    const double x = static_cast<double>(k) / (static_cast<double>(len) * rho);
    const double v = std::sqrt(1.0 / (2.0 * std::sqrt(1.0 - x * x)));
    shape[k] = v;
    shape[len - k] = v;
  }
  const double kmd = static_cast<double>(km);
  const double edge = std::sqrt(kmd / 2.0 * (std::numbers::pi / 2.0 -
                                             std::atan((kmd - 1.0) / std::sqrt(2.0 * kmd - 1.0))));
  shape[km] = edge;
  shape[len - km] = edge;

  double energy = 0.0;
  for (double v : shape) energy += v * v;
  const double norm = static_cast<double>(len) / std::sqrt(energy);

  CVec spectrum(len);
  for (std::size_t k = 0; k < len; ++k) {
    const cplx w = rng.complex_gaussian(1.0);
    spectrum[k] = shape[k] > 0.0 ? w * (shape[k] * norm) : cplx{};
  }
  fft_inplace(spectrum, true);
  spectrum.resize(n);
  return spectrum;
}

FadingTrajectory fading_process(const ChannelProfile& profile, std::size_t n_samples,
                                double sample_rate, RandomSource& rng) {
  profile.validate();
  if (!(sample_rate > 0.0)) throw GeometryError("sample rate must be positive");
  std::vector<CVec> gains;
  gains.reserve(profile.taps.size());
  for (const Tap& t : profile.taps) {
    const double amp = std::sqrt(t.power);
    if (t.doppler_hz == 0.0) {
      gains.emplace_back(n_samples, rng.complex_gaussian(t.power));
      continue;
    }
    const double rho = t.doppler_hz / sample_rate;
    if (rho > 0.25) throw ProfileError("Doppler exceeds a quarter of the sample rate");
    CVec g;
    if (rho >= 1.0 / kSlowFadingOversample) {
      g = jakes_process(n_samples, rho, rng);
    } else {
      // Coarse grid at 64 points per Doppler period, then linear interpolation.
      const double step = 1.0 / (kSlowFadingOversample * t.doppler_hz);
      const double span = n_samples > 0 ? static_cast<double>(n_samples - 1) / sample_rate : 0.0;
      const auto coarse_n = static_cast<std::size_t>(std::ceil(span / step)) + 2;
      const CVec coarse = jakes_process(coarse_n, 1.0 / kSlowFadingOversample, rng);
      g.resize(n_samples);
      for (std::size_t i = 0; i < n_samples; ++i) {
        const double pos = static_cast<double>(i) / sample_rate / step;
        const auto j = static_cast<std::size_t>(pos);
        const double a = pos - static_cast<double>(j);
        g[i] = coarse[j] * (1.0 - a) + coarse[j + 1] * a;
      }
    }
    for (auto& v : g) v *= amp;
    gains.push_back(std::move(g));
  }
  return FadingTrajectory(std::move(gains), sample_rate);
}

SampleBuffer channel_apply(const SampleBuffer& tx, const ChannelProfile& profile,
                           const FadingTrajectory& trajectory, RandomSource& rng) {
  profile.validate();
  const double fs = tx.sample_rate();
  const auto delays = profile.delay_samples(fs);
  const std::size_t max_delay = *std::max_element(delays.begin(), delays.end());
  const std::size_t out_len = tx.size() + max_delay;
  if (max_delay > tx.size()) {
    throw GeometryError("tap delay of " + std::to_string(max_delay) +
                        " samples exceeds the buffer length " + std::to_string(tx.size()));
  }
  if (trajectory.n_taps() != profile.taps.size()) {
    throw GeometryError("trajectory and profile disagree on the tap count");
  }
  if (trajectory.n_samples() < out_len) {
    throw GeometryError("fading trajectory is shorter than the channel output");
  }

  CVec out(out_len, cplx{});
  const auto& x = tx.samples();
  for (std::size_t l = 0; l < delays.size(); ++l) {
    const std::size_t d = delays[l];
    const CVec& h = trajectory.tap(l);
    for (std::size_t i = 0; i < x.size(); ++i) out[i + d] += h[i + d] * x[i];
  }
  if (profile.noise_variance > 0.0) {
    for (auto& v : out) v += rng.complex_gaussian(profile.noise_variance);
  }
  return SampleBuffer(std::move(out), fs);
}

ComplexGrid effective_channel(const ChannelProfile& profile, const FadingTrajectory& trajectory,
                              const FrameConfig& cfg, std::size_t n_symbols, std::size_t offset) {
  const auto delays = profile.delay_samples(cfg.sample_rate());
  if (trajectory.n_taps() != delays.size()) {
    throw GeometryError("trajectory and profile disagree on the tap count");
  }
  const std::size_t n = cfg.n_fft();
  ComplexGrid h(n_symbols, n);
  for (std::size_t k = 0; k < n_symbols; ++k) {
    const std::size_t at = offset + k * cfg.symbol_len() + cfg.guard_len();
    if (at >= trajectory.n_samples()) throw GeometryError("trajectory does not cover symbol " + std::to_string(k));
    for (std::size_t l = 0; l < delays.size(); ++l) {
      const cplx gain = trajectory.gain(l, at);
      const std::size_t d = delays[l] % n;
      for (std::size_t q = 0; q < n; ++q) {
        // Reduce q*d modulo n before scaling so the phase stays exact.
        const std::size_t m = (q * d) % n;
        const double a = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        h(k, q) += gain * cplx{std::cos(a), std::sin(a)};
      }
    }
  }
  return h;
}

double energy_per_bit(const FrameConfig& cfg, EnergyAccounting acc) {
  const double n = static_cast<double>(cfg.n_fft());
  double carriers = static_cast<double>(cfg.n_data());
  if (acc.include_pilots) carriers += static_cast<double>(cfg.n_pilots());
  double e_symbol = carriers / n;
  if (acc.include_guard) e_symbol *= static_cast<double>(cfg.symbol_len()) / n;
  return e_symbol / (2.0 * static_cast<double>(cfg.n_data()));
}

double noise_variance_for_ebn0(double ebn0_db, const FrameConfig& cfg, EnergyAccounting acc) {
  return energy_per_bit(cfg, acc) / std::pow(10.0, ebn0_db / 10.0);
}

}  // namespace wimax60
