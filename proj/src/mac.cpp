#include "wimax60/mac.hpp"

#include <array>

#include "wimax60/error.hpp"

namespace wimax60 {

namespace {

constexpr std::array<std::uint32_t, 256> make_crc32_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1U) ? 0xEDB88320U ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

constexpr auto kCrc32Table = make_crc32_table();

}  // namespace

std::uint8_t crc8_hcs(std::span<const std::uint8_t> data) {
  std::uint8_t crc = 0;
  for (std::uint8_t byte : data) {
    crc ^= byte;
    for (int k = 0; k < 8; ++k) {
      crc = (crc & 0x80U) ? static_cast<std::uint8_t>((crc << 1) ^ 0x07U)
                          : static_cast<std::uint8_t>(crc << 1);
    }
  }
  return crc;
}

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  std::uint32_t crc = 0xFFFFFFFFU;
  for (std::uint8_t byte : data) crc = kCrc32Table[(crc ^ byte) & 0xFFU] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFU;
}

std::array<std::uint8_t, 5> MacHeader::covered_bytes() const {
  std::array<std::uint8_t, 5> b{};
  b[0] = static_cast<std::uint8_t>((ht ? 0x80U : 0U) | (ec ? 0x40U : 0U) | (ptype & 0x3FU));
  b[1] = static_cast<std::uint8_t>((rsv1 ? 0x80U : 0U) | (ci ? 0x40U : 0U) | ((eks & 0x3U) << 4) |
                                   (rsv2 ? 0x08U : 0U) | ((len >> 8) & 0x07U));
  b[2] = static_cast<std::uint8_t>(len & 0xFFU);
  b[3] = static_cast<std::uint8_t>(cid >> 8);
  b[4] = static_cast<std::uint8_t>(cid & 0xFFU);
  return b;
}

std::array<std::uint8_t, kMacHeaderBytes> MacHeader::to_bytes() const {
  const auto c = covered_bytes();
  return {c[0], c[1], c[2], c[3], c[4], hcs};
}

Bytes MacPdu::to_bytes() const {
  Bytes out;
  out.reserve(header.len);
  const auto h = header.to_bytes();
  out.insert(out.end(), h.begin(), h.end());
  out.insert(out.end(), payload.begin(), payload.end());
  if (payload_crc) {
    const std::uint32_t crc = *payload_crc;
    for (int shift = 24; shift >= 0; shift -= 8) {
      out.push_back(static_cast<std::uint8_t>((crc >> shift) & 0xFFU));
    }
  }
  return out;
}

std::size_t pdu_length(std::size_t payload_bytes, bool ci) noexcept {
  return kMacHeaderBytes + payload_bytes + (ci ? kMacCrcBytes : 0);
}

MacPdu build_pdu(std::span<const std::uint8_t> payload, std::uint16_t cid, const MacFlags& flags) {
  if (flags.ptype > 0x3F) throw GeometryError("payload type exceeds 6 bits");
  if (flags.eks > 0x3) throw GeometryError("encryption key sequence exceeds 2 bits");
  const std::size_t total = pdu_length(payload.size(), flags.ci);
  if (total > kMacMaxLength) {
    throw LengthOverflowError("PDU length " + std::to_string(total) +
                              " bytes does not fit the 11-bit LEN field");
  }

  MacPdu pdu;
  auto& h = pdu.header;
  h.ht = flags.ht;
  h.ec = flags.ec;
  h.ptype = flags.ptype;
  h.ci = flags.ci;
  h.eks = flags.eks;
  h.len = static_cast<std::uint16_t>(total);
  h.cid = cid;
  h.hcs = crc8_hcs(h.covered_bytes());
  // EC only marks the payload as encrypted; the bytes pass through unchanged.
  pdu.payload.assign(payload.begin(), payload.end());
  if (flags.ci) {
    Bytes covered;
    covered.reserve(kMacHeaderBytes + payload.size());
    const auto hb = h.to_bytes();
    covered.insert(covered.end(), hb.begin(), hb.end());
    covered.insert(covered.end(), payload.begin(), payload.end());
    pdu.payload_crc = crc32(covered);
  }
  return pdu;
}

Bits serialize_pdu(const MacPdu& pdu) { return bytes_to_bits(pdu.to_bytes()); }

MacPdu parse_pdu(std::span<const std::uint8_t> bits) {
  if (bits.size() < kMacHeaderBits) {
    throw TruncatedInputError("MAC header needs 48 bits, got " + std::to_string(bits.size()));
  }
  const Bytes hb = bits_to_bytes(bits.first(kMacHeaderBits));

  MacPdu pdu;
  auto& h = pdu.header;
  h.ht = (hb[0] & 0x80U) != 0;
  h.ec = (hb[0] & 0x40U) != 0;
  h.ptype = hb[0] & 0x3FU;
  h.rsv1 = (hb[1] & 0x80U) != 0;
  h.ci = (hb[1] & 0x40U) != 0;
  h.eks = (hb[1] >> 4) & 0x3U;
  h.rsv2 = (hb[1] & 0x08U) != 0;
  h.len = static_cast<std::uint16_t>(((hb[1] & 0x07U) << 8) | hb[2]);
  h.cid = static_cast<std::uint16_t>((hb[3] << 8) | hb[4]);
  h.hcs = hb[5];

  const std::uint8_t expected_hcs = crc8_hcs(std::span(hb).first(5));
  if (expected_hcs != h.hcs) throw HcsMismatchError(expected_hcs, h.hcs);

  const std::size_t min_len = pdu_length(0, h.ci);
  if (h.len < min_len) {
    throw GeometryError("LEN field " + std::to_string(h.len) + " is below the minimum of " +
                        std::to_string(min_len));
  }
  if (bits.size() < std::size_t{h.len} * 8) {
    throw TruncatedInputError("PDU declares " + std::to_string(h.len) + " bytes but only " +
                              std::to_string(bits.size()) + " bits were supplied");
  }
  const Bytes all = bits_to_bytes(bits.first(std::size_t{h.len} * 8));
  const std::size_t payload_len = h.len - min_len;
  pdu.payload.assign(all.begin() + kMacHeaderBytes,
                     all.begin() + static_cast<std::ptrdiff_t>(kMacHeaderBytes + payload_len));
  if (h.ci) {
    const std::size_t at = kMacHeaderBytes + payload_len;
    const std::uint32_t received = (std::uint32_t{all[at]} << 24) | (std::uint32_t{all[at + 1]} << 16) |
                                   (std::uint32_t{all[at + 2]} << 8) | std::uint32_t{all[at + 3]};
    const std::uint32_t computed = crc32(std::span(all).first(at));
    if (computed != received) throw CrcMismatchError(computed, received);
    pdu.payload_crc = received;
  }
  return pdu;
}

}  // namespace wimax60
