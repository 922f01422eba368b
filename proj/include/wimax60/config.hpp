#pragma once

// Run configuration: line-oriented "key = value" text grouped into
// [frame], [spreading], [mac], [channel], [estimator], [run] and [sweep]
// sections, '#' starting a comment. Unknown sections or keys are errors.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wimax60/chanest.hpp"
#include "wimax60/channel.hpp"
#include "wimax60/mac.hpp"
#include "wimax60/ofdm.hpp"
#include "wimax60/spreading.hpp"

namespace wimax60 {

struct RunConfig {
  // [frame]
  std::size_t n_fft = 256;
  std::size_t n_data = 192;
  std::size_t guard_len = 64;
  double sample_rate = kDefaultSampleRate;
  std::vector<int> pilots;  // empty: default layout
  PilotMode pilot_mode = PilotMode::fixed;
  std::size_t bits_per_frame = 192;
  std::size_t chip_frame_len = kDefaultChipFrameLen;
  double chip_rate = kDefaultChipRate;

  // [spreading]
  unsigned pn_degree = kPnDefaultDegree;
  std::uint32_t pn_taps = kPnDefaultTaps;
  std::uint32_t pn_seed = (1U << kPnDefaultDegree) - 1U;

  // [mac]
  std::size_t payload_bytes = 64;
  std::uint16_t cid = 0x2A01;
  MacFlags flags{false, false, 0, 0, true};
  std::string payload_file;  // empty: random payload bytes

  // [channel]
  std::string profile_path;  // resolved path
  std::vector<Tap> taps;     // inline taps
  std::optional<double> noise_variance;
  std::optional<double> ebn0_db;
  EnergyAccounting energy;

  // [estimator]
  EstimatorMethod estimator = EstimatorMethod::genie;

  // [run]
  std::uint64_t seed = 1;
  std::uint64_t bits = 100000;
  std::size_t pdus_per_burst = 32;
  double center_freq = 0.0;
  std::size_t spectrum_segment = 1024;

  // [sweep]
  std::vector<double> sweep_ebn0_db;
  std::size_t threads = 0;  // 0: hardware concurrency

  FrameConfig frame_config() const;
  PnGenerator pn_generator() const;
  // True when inline taps or a profile file are configured. Otherwise the
  // link uses a fixed unit-gain tap rather than a random static draw.
  bool has_channel_profile() const noexcept { return !taps.empty() || !profile_path.empty(); }

  // Inline taps, then the profile file, then the identity channel. The
  // [channel] noise settings are not applied here.
  ChannelProfile channel_profile() const;

  // Checks every cross-field constraint; throws ConfigError.
  void validate() const;

  // Canonical text form; parse_run_config(to_text()) reproduces the config.
  std::string to_text() const;
};

// base_dir resolves relative profile and payload paths.
RunConfig parse_run_config(std::istream& in, const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace wimax60
