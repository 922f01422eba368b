#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wimax60 {

// One element per bit, each 0 or 1.
using Bits = std::vector<std::uint8_t>;
using Bytes = std::vector<std::uint8_t>;

// MSB-first within each byte.
Bits bytes_to_bits(std::span<const std::uint8_t> bytes);
// Bit count must be a multiple of 8.
Bytes bits_to_bytes(std::span<const std::uint8_t> bits);

// Lower-case hex, no separators. Odd-length or non-hex input throws.
std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view text);

}  // namespace wimax60
