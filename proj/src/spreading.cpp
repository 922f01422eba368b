#include "wimax60/spreading.hpp"

#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "wimax60/error.hpp"

namespace wimax60 {

PnGenerator::PnGenerator(unsigned degree, std::uint32_t taps, std::uint32_t seed)
    : degree_(degree), taps_(taps), seed_(seed), state_(seed) {
  if (degree < 2 || degree > 32) throw GeometryError("LFSR degree must lie in [2, 32]");
  mask_ = degree == 32 ? 0xFFFFFFFFU : (1U << degree) - 1U;
  if ((taps & ~mask_) != 0 || (taps & (1U << (degree - 1))) == 0) {
    throw GeometryError("feedback taps must include x^degree and stay within the register");
  }
  if ((seed & mask_) == 0) throw DegenerateSeedError("LFSR seed must be nonzero");
  if ((seed & ~mask_) != 0) throw GeometryError("LFSR seed wider than the register");
}

PnGenerator PnGenerator::standard() {
  return PnGenerator(kPnDefaultDegree, kPnDefaultTaps, (1U << kPnDefaultDegree) - 1U);
}

std::uint8_t PnGenerator::next_bit() {
  const auto fb = static_cast<std::uint32_t>(std::popcount(state_ & taps_) & 1);
  state_ = ((state_ << 1) | fb) & mask_;
  return static_cast<std::uint8_t>(fb);
}

Bits PnGenerator::next(std::size_t n) {
  Bits out(n);
  for (auto& b : out) b = next_bit();
  return out;
}

ChipFrame spread(std::span<const std::uint8_t> data, PnGenerator& gen, std::size_t frame_len,
                 double chip_rate) {
  if (data.size() > frame_len) {
    throw GeometryError("data of " + std::to_string(data.size()) + " bits exceeds frame length " +
                        std::to_string(frame_len));
  }
  ChipFrame frame;
  frame.chip_rate = chip_rate;
  frame.payload_len = data.size();
  frame.chips.assign(frame_len, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    frame.chips[i] = static_cast<std::uint8_t>((data[i] & 1U) ^ gen.next_bit());
  }
  return frame;
}

Bits despread(const ChipFrame& frame, PnGenerator& gen) {
  if (frame.payload_len > frame.chips.size()) {
    throw GeometryError("payload length exceeds the chip frame");
  }
  Bits out(frame.payload_len);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((frame.chips[i] & 1U) ^ gen.next_bit());
  }
  return out;
}

void write_chip_frame(std::ostream& out, const ChipFrame& frame) {
  static constexpr char digits[] = "0123456789abcdef";
  out << frame.chips.size() << ' ' << frame.payload_len << ' ' << frame.chip_rate << '\n';
  std::string hex;
  for (std::size_t i = 0; i < frame.chips.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nibble <<= 1;
      if (i + j < frame.chips.size()) nibble |= frame.chips[i + j] & 1U;
    }
    hex.push_back(digits[nibble]);
  }
  out << hex << '\n';
}

ChipFrame read_chip_frame(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw TruncatedInputError("chip frame fixture is empty");
  std::istringstream head(line);
  std::size_t frame_len = 0;
  ChipFrame frame;
  if (!(head >> frame_len >> frame.payload_len >> frame.chip_rate)) {
    throw GeometryError("malformed chip frame header: '" + line + "'");
  }
  if (frame.payload_len > frame_len) throw GeometryError("payload length exceeds the chip frame");

  std::string hex;
  while (std::getline(in, line)) {
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) hex.push_back(c);
    }
  }
  if (hex.size() != (frame_len + 3) / 4) {
    throw TruncatedInputError("expected " + std::to_string((frame_len + 3) / 4) +
                              " hex digits of chips, got " + std::to_string(hex.size()));
  }
  frame.chips.assign(frame_len, 0);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(hex[i])));
    unsigned v = 0;
    if (c >= '0' && c <= '9') {
      v = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v = static_cast<unsigned>(c - 'a' + 10);
    } else {
      throw GeometryError(std::string("invalid hex digit '") + hex[i] + "'");
    }
    for (std::size_t j = 0; j < 4 && 4 * i + j < frame_len; ++j) {
      frame.chips[4 * i + j] = static_cast<std::uint8_t>((v >> (3 - j)) & 1U);
    }
  }
  for (std::size_t i = frame.payload_len; i < frame_len; ++i) {
    if (frame.chips[i] != 0) throw GeometryError("nonzero chip in the pad region");
  }
  return frame;
}

}  // namespace wimax60
