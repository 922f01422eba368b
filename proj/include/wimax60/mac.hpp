#pragma once

// Generic MAC PDU: the 48-bit header (HT, EC, Type, RSV, CI, EKS, RSV, LEN,
// CID, HCS), the payload, and the optional trailing CRC-32.
//
// Header layout, MSB-first:
//   byte 0  HT(1) EC(1) Type(6)
//   byte 1  RSV(1) CI(1) EKS(2) RSV(1) LEN[10:8](3)
//   byte 2  LEN[7:0]
//   byte 3-4 CID
//   byte 5  HCS = CRC-8 (x^8+x^2+x+1, init 0) over bytes 0-4
// When CI is set, a CRC-32 over header and payload follows the payload,
// most significant byte first.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wimax60/bits.hpp"

namespace wimax60 {

inline constexpr std::size_t kMacHeaderBytes = 6;
inline constexpr std::size_t kMacHeaderBits = kMacHeaderBytes * 8;
inline constexpr std::size_t kMacCrcBytes = 4;
inline constexpr std::uint16_t kMacMaxLength = 2047;

struct MacFlags {
  bool ht = false;
  bool ec = false;
  std::uint8_t ptype = 0;  // 6 bits
  std::uint8_t eks = 0;    // 2 bits
  bool ci = false;
};

struct MacHeader {
  bool ht = false;
  bool ec = false;
  std::uint8_t ptype = 0;
  bool rsv1 = false;
  bool ci = false;
  std::uint8_t eks = 0;
  bool rsv2 = false;
  std::uint16_t len = 0;
  std::uint16_t cid = 0;
  std::uint8_t hcs = 0;

  // First five bytes, i.e. everything covered by the HCS.
  std::array<std::uint8_t, 5> covered_bytes() const;
  std::array<std::uint8_t, kMacHeaderBytes> to_bytes() const;

  bool operator==(const MacHeader&) const = default;
};

struct MacPdu {
  MacHeader header;
  Bytes payload;
  std::optional<std::uint32_t> payload_crc;

  Bytes to_bytes() const;
  bool operator==(const MacPdu&) const = default;
};

// CRC-8, generator x^8 + x^2 + x + 1, initial value 0, no reflection.
std::uint8_t crc8_hcs(std::span<const std::uint8_t> data);
// Reflected CRC-32 (IEEE 802.3 polynomial), init and final XOR all ones.
std::uint32_t crc32(std::span<const std::uint8_t> data);

MacPdu build_pdu(std::span<const std::uint8_t> payload, std::uint16_t cid, const MacFlags& flags);

Bits serialize_pdu(const MacPdu& pdu);

// Parses one PDU from the front of `bits`; trailing bits are ignored.
MacPdu parse_pdu(std::span<const std::uint8_t> bits);

// Total serialized size in bytes for a payload of the given length.
std::size_t pdu_length(std::size_t payload_bytes, bool ci) noexcept;

}  // namespace wimax60
