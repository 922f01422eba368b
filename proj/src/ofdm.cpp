#include "wimax60/ofdm.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "wimax60/error.hpp"
#include "wimax60/spreading.hpp"

namespace wimax60 {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

FrameConfig FrameConfig::standard() { return make(256, 192, {}, 64, kDefaultSampleRate); }

FrameConfig FrameConfig::make(std::size_t n_fft, std::size_t n_data, std::vector<int> pilot_indices,
                              std::size_t guard_len, double sample_rate, PilotMode pilot_mode) {
  if (!is_power_of_two(n_fft) || n_fft < 8) {
    throw GeometryError("n_fft must be a power of two >= 8");
  }
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw GeometryError("sample rate must be positive");
  }
  FrameConfig cfg;
  cfg.n_fft_ = n_fft;
  cfg.guard_len_ = guard_len;
  cfg.sample_rate_ = sample_rate;
  cfg.pilot_mode_ = pilot_mode;

  if (pilot_indices.empty()) {
    // Pilots at the centres of P equal slices of the used band; for the
    // 256-point layout this gives +-13, +-38, +-63, +-88.
    constexpr std::size_t kDefaultPilots = 8;
    const std::size_t used = n_data + kDefaultPilots;
    if (used % 2 != 0) throw GeometryError("n_data must be even for the default pilot layout");
    const double half_band = static_cast<double>(used / 2);
    for (std::size_t i = 0; i < kDefaultPilots / 2; ++i) {
      const int p = static_cast<int>(std::lround(half_band * static_cast<double>(2 * i + 1) /
                                                 static_cast<double>(kDefaultPilots)));
      pilot_indices.push_back(p);
      pilot_indices.push_back(-p);
    }
  }
  std::sort(pilot_indices.begin(), pilot_indices.end());
  cfg.pilot_indices_ = std::move(pilot_indices);

  const std::size_t used = n_data + cfg.pilot_indices_.size();
  if (used % 2 != 0) throw GeometryError("data plus pilot count must be even");
  const int half = static_cast<int>(used / 2);
  const std::set<int> pilots(cfg.pilot_indices_.begin(), cfg.pilot_indices_.end());
  for (int i = -half; i <= half; ++i) {
    if (i == 0 || pilots.count(i)) continue;
    cfg.data_indices_.push_back(i);
  }

  if (pilot_mode == PilotMode::prbs) {
    // x^11 + x^9 + 1, all-ones seed; one bit per symbol.
    PnGenerator gen(11, (1U << 10) | (1U << 8), 0x7FFU);
    cfg.pilot_prbs_ = gen.next(2047);
  }
  cfg.validate();
  return cfg;
}

void FrameConfig::validate() const {
  if (guard_len_ >= n_fft_) throw GeometryError("guard length must be below n_fft");
  const int lo = -static_cast<int>(n_fft_ / 2);
  const int hi = static_cast<int>(n_fft_ / 2) - 1;
  std::set<int> seen;
  for (int p : pilot_indices_) {
    if (p == 0) throw GeometryError("pilot on the DC subcarrier");
    if (p < lo || p > hi) throw GeometryError("pilot index " + std::to_string(p) + " out of range");
    if (!seen.insert(p).second) throw GeometryError("duplicate pilot index");
  }
  for (int d : data_indices_) {
    if (d < lo || d > hi) throw GeometryError("used band exceeds n_fft");
    if (seen.count(d)) throw GeometryError("pilot and data indices overlap");
  }
  // Pilots must sit inside the used band, otherwise data would spill over.
  const std::size_t used = data_indices_.size() + pilot_indices_.size();
  const int half = static_cast<int>(used / 2);
  for (int p : pilot_indices_) {
    if (p < -half || p > half) throw GeometryError("pilot index outside the used band");
  }
  if (data_indices_.size() + pilot_indices_.size() + 1 > n_fft_) {
    throw GeometryError("used band exceeds n_fft");
  }
}

std::size_t FrameConfig::bin(int logical) const noexcept {
  const auto n = static_cast<long long>(n_fft_);
  return static_cast<std::size_t>(((logical % n) + n) % n);
}

double FrameConfig::pilot_value(std::size_t k) const {
  if (pilot_mode_ == PilotMode::fixed) return 1.0;
  return pilot_prbs_[k % pilot_prbs_.size()] ? -1.0 : 1.0;
}

FrameConfig FrameConfig::with_guard(std::size_t guard_len) const {
  FrameConfig cfg = *this;
  cfg.guard_len_ = guard_len;
  cfg.validate();
  return cfg;
}

CVec qpsk_map(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) throw GeometryError("QPSK mapping needs an even number of bits");
  CVec out(bits.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double re = (bits[2 * i] & 1U) ? -kInvSqrt2 : kInvSqrt2;
    const double im = (bits[2 * i + 1] & 1U) ? -kInvSqrt2 : kInvSqrt2;
    out[i] = {re, im};
  }
  return out;
}

Bits qpsk_demap(std::span<const cplx> symbols) {
  Bits out(symbols.size() * 2);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    out[2 * i] = symbols[i].real() < 0.0 ? 1 : 0;
    out[2 * i + 1] = symbols[i].imag() < 0.0 ? 1 : 0;
  }
  return out;
}

CVec pack_subcarriers(std::span<const cplx> data, const FrameConfig& cfg, std::size_t k) {
  if (data.size() != cfg.n_data()) {
    throw GeometryError("expected " + std::to_string(cfg.n_data()) + " data symbols, got " +
                        std::to_string(data.size()));
  }
  CVec bins(cfg.n_fft(), cplx{0.0, 0.0});
  const auto& idx = cfg.data_indices();
  for (std::size_t i = 0; i < idx.size(); ++i) bins[cfg.bin(idx[i])] = data[i];
  const double pv = cfg.pilot_value(k);
  for (int p : cfg.pilot_indices()) bins[cfg.bin(p)] = {pv, 0.0};
  return bins;
}

CVec unpack_subcarriers(std::span<const cplx> bins, const FrameConfig& cfg) {
  if (bins.size() != cfg.n_fft()) throw GeometryError("bin vector length differs from n_fft");
  CVec out;
  out.reserve(cfg.n_data());
  for (int d : cfg.data_indices()) out.push_back(bins[cfg.bin(d)]);
  return out;
}

OfdmSymbol ofdm_modulate(std::span<const cplx> packed, const FrameConfig& cfg, std::size_t k) {
  if (packed.size() != cfg.n_fft()) throw GeometryError("packed vector length differs from n_fft");
  OfdmSymbol sym;
  sym.symbol_index = k;
  sym.freq_bins.assign(packed.begin(), packed.end());
  const CVec body = ifft(packed);
  const std::size_t g = cfg.guard_len();
  sym.time_samples.reserve(cfg.symbol_len());
  sym.time_samples.insert(sym.time_samples.end(), body.end() - static_cast<std::ptrdiff_t>(g), body.end());
  sym.time_samples.insert(sym.time_samples.end(), body.begin(), body.end());
  return sym;
}

DemodOutput ofdm_demodulate(const SampleBuffer& received, const FrameConfig& cfg,
                            std::size_t n_symbols, std::size_t offset) {
  const std::size_t need = offset + n_symbols * cfg.symbol_len();
  if (received.size() < need) {
    throw TruncatedInputError("received stream holds " + std::to_string(received.size()) +
                              " samples, " + std::to_string(need) + " required");
  }
  DemodOutput out;
  out.s = ComplexGrid(n_symbols, cfg.n_fft());
  const auto& x = received.samples();
  for (std::size_t k = 0; k < n_symbols; ++k) {
    auto row = out.s.row(k);
    const std::size_t body = offset + k * cfg.symbol_len() + cfg.guard_len();
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(body), cfg.n_fft(), row.begin());
    fft_inplace(row);
  }
  return out;
}

SampleBuffer concat_symbols(std::span<const OfdmSymbol> symbols, const FrameConfig& cfg) {
  CVec samples;
  samples.reserve(symbols.size() * cfg.symbol_len());
  for (const auto& s : symbols) samples.insert(samples.end(), s.time_samples.begin(), s.time_samples.end());
  return SampleBuffer(std::move(samples), cfg.sample_rate());
}

void write_constellation_csv(std::ostream& out, const DemodOutput& demod) {
  const bool have_ref = demod.c.same_shape(demod.s);
  const auto old_precision = out.precision(12);
  out << "k,q,re_s,im_s,re_c,im_c\n";
  for (std::size_t k = 0; k < demod.s.rows(); ++k) {
    for (std::size_t q = 0; q < demod.s.cols(); ++q) {
      const cplx s = demod.s(k, q);
      const cplx c = have_ref ? demod.c(k, q) : cplx{};
      out << k << ',' << q << ',' << s.real() << ',' << s.imag() << ',' << c.real() << ','
          << c.imag() << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace wimax60
