#pragma once

// Link measurements and the binary I/Q capture container.
//
// Capture layout (all little-endian):
//   0..7    magic "IQCAP\0\0\0"
//   8..11   version, u32 (= 1)
//   12..19  sample_rate, f64
//   20..27  center_freq, f64 (metadata only)
//   28..35  sample_count, u64
//   36..    sample_count x (I f32, Q f32)

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "wimax60/bits.hpp"
#include "wimax60/dsp.hpp"

namespace wimax60 {

struct BitErrorCount {
  std::uint64_t bits_compared = 0;
  std::uint64_t bit_errors = 0;
  double ber() const noexcept {
    return bits_compared ? static_cast<double>(bit_errors) / static_cast<double>(bits_compared) : 0.0;
  }
};

BitErrorCount ber_count(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits);

// Errors over bit pairs: a pair counts once if either bit differs.
BitErrorCount qpsk_symbol_errors(std::span<const std::uint8_t> tx_bits,
                                 std::span<const std::uint8_t> rx_bits);

// RMS error over RMS reference, in percent.
double evm_rms(std::span<const cplx> equalized, std::span<const cplx> reference);

// Q(x) = P(N(0,1) > x).
double q_function(double x);
// Uncoded QPSK/BPSK bit error rate Q(sqrt(2 Eb/N0)).
double qpsk_theory_ber(double ebn0_db);
// Eb/N0 in dB at which the theoretical curve reaches `ber` (0 < ber < 0.5).
double qpsk_theory_ebn0_db(double ber);

struct LinkReport {
  std::uint64_t bits_compared = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
  std::uint64_t symbols_compared = 0;
  std::uint64_t symbol_errors = 0;
  double ser = 0.0;
  double evm_pct = 0.0;
  std::uint64_t erasures = 0;
  std::uint64_t pdus_sent = 0;
  std::uint64_t pdus_ok = 0;
  std::uint64_t hcs_failures = 0;
  std::uint64_t crc_failures = 0;
  std::uint64_t ofdm_symbols = 0;

  // Config echo.
  std::uint64_t seed = 0;
  std::string profile;
  std::string estimator;
  std::optional<double> ebn0_db;
  double noise_variance = 0.0;

  // SER >= BER and SER <= 2 BER, which holds for Gray-mapped QPSK.
  bool ser_ber_consistent() const noexcept;

  void write_text(std::ostream& out) const;
  static std::string csv_header();
  std::string csv_row() const;
};

inline constexpr std::array<char, 8> kCaptureMagic = {'I', 'Q', 'C', 'A', 'P', '\0', '\0', '\0'};
inline constexpr std::uint32_t kCaptureVersion = 1;
inline constexpr std::size_t kCaptureHeaderBytes = 36;

struct IqCapture {
  SampleBuffer buffer;
  double center_freq = 0.0;
};

// Samples are stored as f32, so the round trip is exact for values that are
// representable in single precision.
void capture_write(std::ostream& out, const SampleBuffer& buf, double center_freq = 0.0);
void capture_write(const std::string& path, const SampleBuffer& buf, double center_freq = 0.0);
IqCapture capture_read(std::istream& in);
IqCapture capture_read(const std::string& path);

// Rounds every sample to single precision, i.e. what a capture stores.
SampleBuffer to_capture_precision(const SampleBuffer& buf);

}  // namespace wimax60
