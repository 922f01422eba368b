#include "wimax60/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <algorithm>
#include <map>
#include <sstream>

#include "wimax60/error.hpp"

namespace wimax60 {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(trim(part));
  return out;
}

double to_double(const std::string& v, std::size_t line) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + v + "'", line);
  }
  if (used != v.size() || !std::isfinite(d)) throw ConfigError("expected a number, got '" + v + "'", line);
  return d;
}

std::uint64_t to_u64(const std::string& v, std::size_t line) {
  std::size_t used = 0;
  std::uint64_t n = 0;
  try {
    if (!v.empty() && v.front() == '-') throw std::invalid_argument("negative");
    n = std::stoull(v, &used, 0);
  } catch (const std::exception&) {
    throw ConfigError("expected a non-negative integer, got '" + v + "'", line);
  }
  if (used != v.size()) throw ConfigError("expected a non-negative integer, got '" + v + "'", line);
  return n;
}

std::uint64_t to_bounded(const std::string& v, std::size_t line, std::uint64_t max) {
  const std::uint64_t n = to_u64(v, line);
  if (n > max) throw ConfigError("value " + v + " exceeds " + std::to_string(max), line);
  return n;
}

bool to_bool(const std::string& v, std::size_t line) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError("expected a boolean, got '" + v + "'", line);
}

Tap to_tap(const std::string& v, std::size_t line) {
  const auto parts = split(v, ',');
  if (parts.size() != 3) throw ConfigError("tap needs delay_ns,power_db,doppler_hz", line);
  Tap t;
  t.delay_s = to_double(parts[0], line) * 1e-9;
  t.power = std::pow(10.0, to_double(parts[1], line) / 10.0);
  t.doppler_hz = to_double(parts[2], line);
  return t;
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || base.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base) / path).string();
}

using Setter = std::function<void(RunConfig&, const std::string&, std::size_t)>;

std::map<std::string, Setter> make_setters(const std::string& base) {
  std::map<std::string, Setter> table;

  table["frame.n_fft"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.n_fft = to_u64(v, l); };
  table["frame.n_data"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.n_data = to_u64(v, l); };
  table["frame.guard_len"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.guard_len = to_u64(v, l); };
  table["frame.sample_rate"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.sample_rate = to_double(v, l); };
  table["frame.pilots"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.pilots.clear();
    for (const auto& p : split(v, ',')) {
      const double d = to_double(p, l);
      if (d != std::floor(d)) throw ConfigError("pilot index must be an integer", l);
      c.pilots.push_back(static_cast<int>(d));
    }
  };
  table["frame.pilot_mode"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    if (v == "fixed") {
      c.pilot_mode = PilotMode::fixed;
    } else if (v == "prbs") {
      c.pilot_mode = PilotMode::prbs;
    } else {
      throw ConfigError("pilot_mode must be 'fixed' or 'prbs'", l);
    }
  };
  table["frame.bits_per_frame"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.bits_per_frame = to_u64(v, l); };
  table["frame.chip_frame_len"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.chip_frame_len = to_u64(v, l); };
  table["frame.chip_rate"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.chip_rate = to_double(v, l); };

  table["spreading.degree"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.pn_degree = static_cast<unsigned>(to_bounded(v, l, 32));
  };
  table["spreading.taps"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.pn_taps = static_cast<std::uint32_t>(to_bounded(v, l, 0xFFFFFFFFULL));
  };
  table["spreading.seed"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.pn_seed = static_cast<std::uint32_t>(to_bounded(v, l, 0xFFFFFFFFULL));
  };

  table["mac.payload_bytes"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.payload_bytes = to_u64(v, l); };
  table["mac.cid"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.cid = static_cast<std::uint16_t>(to_bounded(v, l, 0xFFFF));
  };
  table["mac.ht"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.flags.ht = to_bool(v, l); };
  table["mac.ec"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.flags.ec = to_bool(v, l); };
  table["mac.ci"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.flags.ci = to_bool(v, l); };
  table["mac.ptype"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.flags.ptype = static_cast<std::uint8_t>(to_bounded(v, l, 0x3F));
  };
  table["mac.eks"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.flags.eks = static_cast<std::uint8_t>(to_bounded(v, l, 0x3));
  };
  table["mac.payload_file"] = [base](RunConfig& c, const std::string& v, std::size_t) {
    c.payload_file = resolve(base, v);
  };

  table["channel.profile"] = [base](RunConfig& c, const std::string& v, std::size_t) {
    c.profile_path = resolve(base, v);
  };
  table["channel.tap"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.taps.push_back(to_tap(v, l)); };
  table["channel.noise_variance"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.noise_variance = to_double(v, l);
  };
  table["channel.ebn0_db"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.ebn0_db = to_double(v, l); };
  table["channel.ebn0_include_guard"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.energy.include_guard = to_bool(v, l);
  };
  table["channel.ebn0_include_pilots"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.energy.include_pilots = to_bool(v, l);
  };

  table["estimator.method"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    try {
      c.estimator = parse_estimator(v);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), l);
    }
  };

  table["run.seed"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.seed = to_u64(v, l); };
  table["run.bits"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.bits = to_u64(v, l); };
  table["run.pdus_per_burst"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.pdus_per_burst = to_u64(v, l); };
  table["run.center_freq"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.center_freq = to_double(v, l); };
  table["run.spectrum_segment"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    c.spectrum_segment = to_u64(v, l);
  };

  table["sweep.ebn0_db"] = [](RunConfig& c, const std::string& v, std::size_t l) {
    try {
      c.sweep_ebn0_db = parse_double_list(v);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), l);
    }
  };
  table["sweep.threads"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.threads = to_u64(v, l); };
  return table;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(part, 0));
  return out;
}

FrameConfig RunConfig::frame_config() const {
  return FrameConfig::make(n_fft, n_data, pilots, guard_len, sample_rate, pilot_mode);
}

PnGenerator RunConfig::pn_generator() const { return PnGenerator(pn_degree, pn_taps, pn_seed); }

ChannelProfile RunConfig::channel_profile() const {
  if (!taps.empty()) {
    ChannelProfile p{taps, 0.0};
    p.validate();
    return p;
  }
  if (!profile_path.empty()) return load_profile(profile_path);
  return ChannelProfile::identity();
}

void RunConfig::validate() const {
  FrameConfig frame = [&] {
    try {
      return frame_config();
    } catch (const Error& e) {
      throw ConfigError(std::string("[frame] ") + e.what());
    }
  }();
  try {
    (void)pn_generator();
  } catch (const Error& e) {
    throw ConfigError(std::string("[spreading] ") + e.what());
  }
  if (bits_per_frame == 0 || bits_per_frame % 2 != 0) {
    throw ConfigError("[frame] bits_per_frame must be a positive even number");
  }
  if (bits_per_frame > chip_frame_len) throw ConfigError("[frame] bits_per_frame exceeds chip_frame_len");
  if (chip_frame_len % 2 != 0) throw ConfigError("[frame] chip_frame_len must be even");
  if (chip_frame_len / 2 > frame.n_data()) {
    throw ConfigError("[frame] chip_frame_len / 2 QPSK symbols do not fit n_data subcarriers");
  }
  if (!(chip_rate > 0.0)) throw ConfigError("[frame] chip_rate must be positive");
  if (pdu_length(payload_bytes, flags.ci) > kMacMaxLength) {
    throw ConfigError("[mac] payload_bytes makes the PDU exceed 2047 bytes");
  }
  if (!profile_path.empty() && !taps.empty()) {
    throw ConfigError("[channel] give either 'profile' or inline 'tap' lines, not both");
  }
  if (noise_variance && ebn0_db) throw ConfigError("[channel] give either noise_variance or ebn0_db");
  if (noise_variance && !(*noise_variance >= 0.0)) throw ConfigError("[channel] noise_variance must be >= 0");
  try {
    const ChannelProfile p = channel_profile();
    if (p.max_delay_samples(sample_rate) >= 1'000'000) throw ConfigError("[channel] tap delay is unreasonably long");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("[channel] ") + e.what());
  }
  if (!payload_file.empty() && !std::filesystem::exists(payload_file)) {
    throw ConfigError("[mac] payload_file '" + payload_file + "' does not exist");
  }
  if (bits == 0) throw ConfigError("[run] bits must be positive");
  if (pdus_per_burst == 0) throw ConfigError("[run] pdus_per_burst must be positive");
  if (!is_power_of_two(spectrum_segment)) throw ConfigError("[run] spectrum_segment must be a power of two");
}

std::string RunConfig::to_text() const {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "[frame]\n";
  s << "n_fft = " << n_fft << '\n';
  s << "n_data = " << n_data << '\n';
  s << "guard_len = " << guard_len << '\n';
  s << "sample_rate = " << sample_rate << '\n';
  if (!pilots.empty()) {
    s << "pilots = ";
    for (std::size_t i = 0; i < pilots.size(); ++i) s << (i ? "," : "") << pilots[i];
    s << '\n';
  }
  s << "pilot_mode = " << (pilot_mode == PilotMode::fixed ? "fixed" : "prbs") << '\n';
  s << "bits_per_frame = " << bits_per_frame << '\n';
  s << "chip_frame_len = " << chip_frame_len << '\n';
  s << "chip_rate = " << chip_rate << '\n';
  s << "\n[spreading]\n";
  s << "degree = " << pn_degree << '\n';
  s << "taps = 0x" << std::hex << pn_taps << '\n';
  s << "seed = 0x" << pn_seed << std::dec << '\n';
  s << "\n[mac]\n";
  s << "payload_bytes = " << payload_bytes << '\n';
  s << "cid = " << cid << '\n';
  s << "ht = " << flags.ht << '\n';
  s << "ec = " << flags.ec << '\n';
  s << "ptype = " << unsigned{flags.ptype} << '\n';
  s << "eks = " << unsigned{flags.eks} << '\n';
  s << "ci = " << flags.ci << '\n';
  if (!payload_file.empty()) s << "payload_file = " << payload_file << '\n';
  s << "\n[channel]\n";
  if (!profile_path.empty()) s << "profile = " << profile_path << '\n';
  for (const Tap& t : taps) {
    s << "tap = " << t.delay_s * 1e9 << ',' << 10.0 * std::log10(t.power) << ',' << t.doppler_hz << '\n';
  }
  if (noise_variance) s << "noise_variance = " << *noise_variance << '\n';
  if (ebn0_db) s << "ebn0_db = " << *ebn0_db << '\n';
  s << "ebn0_include_guard = " << energy.include_guard << '\n';
  s << "ebn0_include_pilots = " << energy.include_pilots << '\n';
  s << "\n[estimator]\n";
  s << "method = " << to_string(estimator) << '\n';
  s << "\n[run]\n";
  s << "seed = " << seed << '\n';
  s << "bits = " << bits << '\n';
  s << "pdus_per_burst = " << pdus_per_burst << '\n';
  s << "center_freq = " << center_freq << '\n';
  s << "spectrum_segment = " << spectrum_segment << '\n';
  s << "\n[sweep]\n";
  if (!sweep_ebn0_db.empty()) {
    s << "ebn0_db = ";
    for (std::size_t i = 0; i < sweep_ebn0_db.size(); ++i) s << (i ? "," : "") << sweep_ebn0_db[i];
    s << '\n';
  }
  s << "threads = " << threads << '\n';
  return s.str();
}

RunConfig parse_run_config(std::istream& in, const std::string& base_dir) {
  RunConfig cfg;
  const auto table = make_setters(base_dir);
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", line_no);
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"frame", "spreading", "mac", "channel", "estimator", "run", "sweep"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
        throw ConfigError("unknown section [" + section + "]", line_no);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' appears before any [section]", line_no);
    const auto it = table.find(section + "." + key);
    if (it == table.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
    if (value.empty()) throw ConfigError("key '" + key + "' has no value", line_no);
    it->second(cfg, value, line_no);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_run_config(in, base);
}

}  // namespace wimax60
