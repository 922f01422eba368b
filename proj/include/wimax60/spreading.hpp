#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>

#include "wimax60/bits.hpp"

namespace wimax60 {

// Fibonacci LFSR. Stage i (1-based) lives in state bit i-1; `taps` has bit
// i-1 set for every x^i term of the feedback polynomial except x^0. Each step
// emits the parity of the tapped stages and shifts it into stage 1.
class PnGenerator {
 public:
  PnGenerator(unsigned degree, std::uint32_t taps, std::uint32_t seed);

  // x^15 + x^14 + 1, all-ones seed.
  static PnGenerator standard();

  std::uint8_t next_bit();
  Bits next(std::size_t n);

  unsigned degree() const noexcept { return degree_; }
  std::uint32_t taps() const noexcept { return taps_; }
  std::uint32_t state() const noexcept { return state_; }
  std::uint32_t seed() const noexcept { return seed_; }

  // Fresh generator at the original seed.
  PnGenerator reset() const { return PnGenerator(degree_, taps_, seed_); }

 private:
  unsigned degree_;
  std::uint32_t taps_;
  std::uint32_t seed_;
  std::uint32_t state_;
  std::uint32_t mask_;
};

inline constexpr unsigned kPnDefaultDegree = 15;
inline constexpr std::uint32_t kPnDefaultTaps = (1U << 14) | (1U << 13);
inline constexpr std::size_t kDefaultChipFrameLen = 288;
inline constexpr double kDefaultChipRate = 1000.0;

struct ChipFrame {
  Bits chips;
  double chip_rate = kDefaultChipRate;
  std::size_t payload_len = 0;

  bool operator==(const ChipFrame&) const = default;
};

// XOR with the generator output, then zero-pad to frame_len.
ChipFrame spread(std::span<const std::uint8_t> data, PnGenerator& gen,
                 std::size_t frame_len = kDefaultChipFrameLen, double chip_rate = kDefaultChipRate);

Bits despread(const ChipFrame& frame, PnGenerator& gen);

// Fixture text: "frame_len payload_len chip_rate_hz" then the chips as hex,
// four chips per digit, first chip in the most significant position.
void write_chip_frame(std::ostream& out, const ChipFrame& frame);
ChipFrame read_chip_frame(std::istream& in);

}  // namespace wimax60
