#pragma once

// QPSK mapping, subcarrier packing with pilots, IFFT + cyclic prefix
// synthesis and the FFT receive path.
//
// Subcarriers are addressed two ways: the logical index runs from -n_fft/2 to
// n_fft/2 - 1 with DC at 0, and the FFT bin q = logical mod n_fft is what the
// demodulator grid columns use.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "wimax60/bits.hpp"
#include "wimax60/dsp.hpp"
#include "wimax60/grid.hpp"

namespace wimax60 {

enum class PilotMode { fixed, prbs };

class FrameConfig {
 public:
  // 256-point layout: 192 data and 8 pilots at +-13, +-38, +-63, +-88,
  // used band -100..100 with DC null, G = 64, 2.24 MHz.
  static FrameConfig standard();

  // Generic layout: the used band spans -(n_data+n_pilots)/2..+(n_data+n_pilots)/2
  // without DC. An empty pilot list selects the standard positions for
  // n_fft = 256 and evenly spaced pilots otherwise.
  static FrameConfig make(std::size_t n_fft, std::size_t n_data, std::vector<int> pilot_indices,
                          std::size_t guard_len, double sample_rate,
                          PilotMode pilot_mode = PilotMode::fixed);

  std::size_t n_fft() const noexcept { return n_fft_; }
  std::size_t n_data() const noexcept { return data_indices_.size(); }
  std::size_t n_pilots() const noexcept { return pilot_indices_.size(); }
  std::size_t guard_len() const noexcept { return guard_len_; }
  std::size_t symbol_len() const noexcept { return n_fft_ + guard_len_; }
  double sample_rate() const noexcept { return sample_rate_; }
  // Useful symbol duration T = n_fft / sample_rate.
  double symbol_time() const noexcept { return static_cast<double>(n_fft_) / sample_rate_; }
  PilotMode pilot_mode() const noexcept { return pilot_mode_; }

  const std::vector<int>& pilot_indices() const noexcept { return pilot_indices_; }
  const std::vector<int>& data_indices() const noexcept { return data_indices_; }
  std::size_t n_null() const noexcept { return n_fft_ - n_data() - n_pilots(); }

  std::size_t bin(int logical) const noexcept;

  // Known pilot value for symbol k (BPSK +-1).
  double pilot_value(std::size_t k) const;

  FrameConfig with_guard(std::size_t guard_len) const;

 private:
  FrameConfig() = default;
  void validate() const;

  std::size_t n_fft_ = 256;
  std::size_t guard_len_ = 64;
  double sample_rate_ = kDefaultSampleRate;
  PilotMode pilot_mode_ = PilotMode::fixed;
  std::vector<int> pilot_indices_;
  std::vector<int> data_indices_;
  std::vector<std::uint8_t> pilot_prbs_;
};

struct OfdmSymbol {
  CVec freq_bins;     // n_fft, FFT bin order
  CVec time_samples;  // guard_len + n_fft
  std::size_t symbol_index = 0;
};

struct DemodOutput {
  ComplexGrid s;                      // demodulator outputs s_{k,q}
  ComplexGrid c;                      // transmitted bins c_{k,q}
  std::optional<ComplexGrid> h_used;  // channel response when known
};

// Gray map: (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
CVec qpsk_map(std::span<const std::uint8_t> bits);
// Hard decision by quadrant; a zero real or imaginary part decides bit 0.
Bits qpsk_demap(std::span<const cplx> symbols);

CVec pack_subcarriers(std::span<const cplx> data, const FrameConfig& cfg, std::size_t k);
CVec unpack_subcarriers(std::span<const cplx> bins, const FrameConfig& cfg);

OfdmSymbol ofdm_modulate(std::span<const cplx> packed, const FrameConfig& cfg,
                         std::size_t k = 0);

// Assumes ideal timing: symbol k starts at offset + k * (n_fft + G).
DemodOutput ofdm_demodulate(const SampleBuffer& received, const FrameConfig& cfg,
                            std::size_t n_symbols, std::size_t offset = 0);

// Concatenates symbols into one stream.
SampleBuffer concat_symbols(std::span<const OfdmSymbol> symbols, const FrameConfig& cfg);

// CSV rows "k,q,re_s,im_s,re_c,im_c" over all bins.
void write_constellation_csv(std::ostream& out, const DemodOutput& demod);

}  // namespace wimax60
