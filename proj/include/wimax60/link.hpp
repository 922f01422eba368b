#pragma once

// End-to-end chain: MAC PDUs -> PN spreading -> QPSK -> subcarrier packing
// -> IFFT + prefix -> fading channel + noise -> FFT -> estimation ->
// equalization -> demapping -> despreading -> PDU parsing.
//
// Per OFDM symbol, bits_per_frame PDU bits are spread into a chip frame of
// chip_frame_len chips (zero padded), mapped to chip_frame_len / 2 QPSK
// points and topped up to n_data with the QPSK point of a zero bit pair.
// The PN generator restarts from its seed for every frame.

#include <cstdint>
#include <span>
#include <vector>

#include "wimax60/chanest.hpp"
#include "wimax60/config.hpp"
#include "wimax60/metrics.hpp"

namespace wimax60 {

struct BurstResult {
  LinkReport report;  // counts for this burst only
  Bits tx_bits;
  Bits rx_bits;
  SampleBuffer tx;
  SampleBuffer rx;
  DemodOutput demod;
  ChannelEstimate estimate;
  ComplexGrid truth;
  // Squared-error and reference sums behind report.evm_pct.
  double evm_err = 0.0;
  double evm_ref = 0.0;
};

class LinkSimulator {
 public:
  explicit LinkSimulator(RunConfig cfg);

  const RunConfig& config() const noexcept { return cfg_; }
  const FrameConfig& frame() const noexcept { return frame_; }
  const ChannelProfile& profile() const noexcept { return profile_; }

  // Noise variance from Eb/N0 when given, otherwise the configured or
  // profile noise variance.
  double noise_variance(std::optional<double> ebn0_db) const;

  // One independent burst of n_pdus PDUs; `rng` seeds payload, fading and
  // noise through derived streams.
  BurstResult run_burst(std::size_t n_pdus, double noise_variance, const RandomSource& rng) const;

  // Number of PDUs needed to reach a bit budget.
  std::size_t pdus_for_bits(std::uint64_t bits) const;
  std::size_t pdu_bits() const noexcept;

 private:
  Bytes next_payload(RandomSource& rng, std::size_t index) const;

  RunConfig cfg_;
  FrameConfig frame_;
  ChannelProfile profile_;
  Bytes file_payload_;
};

struct LoopbackResult {
  BurstResult burst;
  SpectrumEstimate tx_spectrum;
  double occupied_bw_hz = 0.0;
};

// Single burst carrying at least cfg.bits PDU bits.
LoopbackResult run_loopback(const RunConfig& cfg);

struct SweepPoint {
  LinkReport report;
  SampleBuffer first_rx;  // received samples of the point's first burst
};

// One point per Eb/N0 value, each with its own stream derived from the seed;
// bursts of cfg.pdus_per_burst PDUs repeat until cfg.bits bits are compared.
// Points may run on several threads; results come back in input order.
std::vector<SweepPoint> run_sweep(const RunConfig& cfg, std::span<const double> ebn0_db);

}  // namespace wimax60
