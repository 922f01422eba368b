#include "wimax60/error.hpp"

#include <cstdio>

namespace wimax60 {

namespace {

std::string hex_string(std::uint32_t value, int width) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%0*X", width, value);
  return buf;
}

}  // namespace

HcsMismatchError::HcsMismatchError(std::uint8_t expected, std::uint8_t actual)
    : Error("header check sequence mismatch: expected " + hex_string(expected, 2) +
            ", got " + hex_string(actual, 2)),
      expected_(expected),
      actual_(actual) {}

CrcMismatchError::CrcMismatchError(std::uint32_t expected, std::uint32_t actual)
    : Error("payload CRC-32 mismatch: expected " + hex_string(expected, 8) + ", got " +
            hex_string(actual, 8)),
      expected_(expected),
      actual_(actual) {}

CaptureError::CaptureError(const std::string& what, std::uint64_t offset)
    : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

ConfigError::ConfigError(const std::string& what, std::size_t line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

}  // namespace wimax60
