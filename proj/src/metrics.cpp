#include "wimax60/metrics.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <vector>

#include "wimax60/error.hpp"

namespace wimax60 {

BitErrorCount ber_count(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits) {
  if (tx_bits.size() != rx_bits.size()) {
    throw GeometryError("bit streams differ in length: " + std::to_string(tx_bits.size()) + " vs " +
                        std::to_string(rx_bits.size()));
  }
  BitErrorCount c;
  c.bits_compared = tx_bits.size();
  for (std::size_t i = 0; i < tx_bits.size(); ++i) c.bit_errors += ((tx_bits[i] ^ rx_bits[i]) & 1U);
  return c;
}

BitErrorCount qpsk_symbol_errors(std::span<const std::uint8_t> tx_bits,
                                 std::span<const std::uint8_t> rx_bits) {
  if (tx_bits.size() != rx_bits.size()) throw GeometryError("bit streams differ in length");
  if (tx_bits.size() % 2 != 0) throw GeometryError("QPSK symbol count needs an even bit count");
  BitErrorCount c;
  c.bits_compared = tx_bits.size() / 2;
  for (std::size_t i = 0; i < tx_bits.size(); i += 2) {
    if (((tx_bits[i] ^ rx_bits[i]) | (tx_bits[i + 1] ^ rx_bits[i + 1])) & 1U) ++c.bit_errors;
  }
  return c;
}

double evm_rms(std::span<const cplx> equalized, std::span<const cplx> reference) {
  if (equalized.empty()) throw GeometryError("EVM of an empty vector");
  if (equalized.size() != reference.size()) throw GeometryError("EVM inputs differ in length");
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < equalized.size(); ++i) {
    err += std::norm(equalized[i] - reference[i]);
    ref += std::norm(reference[i]);
  }
  if (!(ref > 0.0)) throw GeometryError("EVM reference has zero power");
  return 100.0 * std::sqrt(err / ref);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double qpsk_theory_ber(double ebn0_db) { return q_function(std::sqrt(2.0 * std::pow(10.0, ebn0_db / 10.0))); }

double qpsk_theory_ebn0_db(double ber) {
  if (!(ber > 0.0 && ber < 0.5)) throw GeometryError("BER must lie in (0, 0.5)");
  // The curve is monotone in Eb/N0; bisect on [-30, 40] dB.
  double lo = -30.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (qpsk_theory_ber(mid) > ber) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool LinkReport::ser_ber_consistent() const noexcept {
  // Exact in integers: SER >= BER <=> 2 e_s >= e_b, SER <= 2 BER <=> e_s <= e_b
  // (two bits per symbol).
  if (bits_compared != 2 * symbols_compared) return ser >= ber && ser <= 2.0 * ber;
  return 2 * symbol_errors >= bit_errors && symbol_errors <= bit_errors;
}

void LinkReport::write_text(std::ostream& out) const {
  std::ostringstream s;
  s << std::setprecision(12);
  s << "seed=" << seed << '\n';
  s << "profile=" << profile << '\n';
  s << "estimator=" << estimator << '\n';
  if (ebn0_db) s << "ebn0_db=" << *ebn0_db << '\n';
  s << "noise_variance=" << noise_variance << '\n';
  s << "ofdm_symbols=" << ofdm_symbols << '\n';
  s << "bits_compared=" << bits_compared << '\n';
  s << "bit_errors=" << bit_errors << '\n';
  s << "ber=" << ber << '\n';
  s << "symbols_compared=" << symbols_compared << '\n';
  s << "symbol_errors=" << symbol_errors << '\n';
  s << "ser=" << ser << '\n';
  s << "evm_pct=" << evm_pct << '\n';
  s << "erasures=" << erasures << '\n';
  s << "pdus_sent=" << pdus_sent << '\n';
  s << "pdus_ok=" << pdus_ok << '\n';
  s << "hcs_failures=" << hcs_failures << '\n';
  s << "crc_failures=" << crc_failures << '\n';
  out << s.str();
}

std::string LinkReport::csv_header() {
  return "ebn0_db,noise_variance,bits,bit_errors,ber,ber_theory,symbols,symbol_errors,ser,evm_pct,"
         "pdus_sent,pdus_ok";
}

std::string LinkReport::csv_row() const {
  std::ostringstream s;
  s << std::setprecision(12);
  if (ebn0_db) {
    s << *ebn0_db;
  } else {
    s << "nan";
  }
  s << ',' << noise_variance << ',' << bits_compared << ',' << bit_errors << ',' << ber << ',';
  if (ebn0_db) {
    s << qpsk_theory_ber(*ebn0_db);
  } else {
    s << "nan";
  }
  s << ',' << symbols_compared << ',' << symbol_errors << ',' << ser << ',' << evm_pct << ','
    << pdus_sent << ',' << pdus_ok;
  return s.str();
}

namespace {

template <typename T>
void put_le(std::vector<char>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFU));
}

template <typename T>
T get_le(const char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

void capture_write(std::ostream& out, const SampleBuffer& buf, double center_freq) {
  std::vector<char> bytes;
  bytes.reserve(kCaptureHeaderBytes + 8 * buf.size());
  bytes.insert(bytes.end(), kCaptureMagic.begin(), kCaptureMagic.end());
  put_le<std::uint32_t>(bytes, kCaptureVersion);
  put_le<double>(bytes, buf.sample_rate());
  put_le<double>(bytes, center_freq);
  put_le<std::uint64_t>(bytes, buf.size());
  for (const cplx& s : buf.samples()) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw GeometryError("capture samples must be finite");
    }
    put_le<float>(bytes, static_cast<float>(s.real()));
    put_le<float>(bytes, static_cast<float>(s.imag()));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed to write capture");
}

void capture_write(const std::string& path, const SampleBuffer& buf, double center_freq) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  capture_write(out, buf, center_freq);
}

IqCapture capture_read(std::istream& in) {
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t matched = 0;
  while (matched < bytes.size() && matched < kCaptureMagic.size() &&
         bytes[matched] == kCaptureMagic[matched]) {
    ++matched;
  }
  if (matched < kCaptureMagic.size()) {
    if (matched == bytes.size()) throw TruncatedPayloadError("capture header truncated", matched);
    throw BadMagicError("not an IQCAP capture: bad magic", matched);
  }
  if (bytes.size() < kCaptureHeaderBytes) {
    throw TruncatedPayloadError("capture header truncated", bytes.size());
  }
  const auto version = get_le<std::uint32_t>(bytes.data() + 8);
  if (version != kCaptureVersion) {
    throw VersionMismatchError("unsupported capture version " + std::to_string(version), 8);
  }
  const auto rate = get_le<double>(bytes.data() + 12);
  const auto center = get_le<double>(bytes.data() + 20);
  const auto count = get_le<std::uint64_t>(bytes.data() + 28);
  if (!(rate > 0.0) || !std::isfinite(rate)) throw CaptureError("invalid sample rate in capture", 12);

  const std::uint64_t payload = bytes.size() - kCaptureHeaderBytes;
  if (count > payload / 8) {
    throw TruncatedPayloadError("capture declares " + std::to_string(count) + " samples but holds " +
                                    std::to_string(payload / 8),
                                bytes.size());
  }
  if (payload != count * 8) {
    throw CaptureError("trailing bytes after the declared samples", kCaptureHeaderBytes + count * 8);
  }
  CVec samples(count);
  const char* p = bytes.data() + kCaptureHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, p += 8) {
    samples[i] = {static_cast<double>(get_le<float>(p)), static_cast<double>(get_le<float>(p + 4))};
  }
  return IqCapture{SampleBuffer(std::move(samples), rate), center};
}

IqCapture capture_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open capture '" + path + "'");
  return capture_read(in);
}

SampleBuffer to_capture_precision(const SampleBuffer& buf) {
  CVec out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    out[i] = {static_cast<double>(static_cast<float>(buf[i].real())),
              static_cast<double>(static_cast<float>(buf[i].imag()))};
  }
  return SampleBuffer(std::move(out), buf.sample_rate());
}

}  // namespace wimax60
