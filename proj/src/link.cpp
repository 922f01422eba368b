#include "wimax60/link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <mutex>
#include <thread>

#include "wimax60/error.hpp"

namespace wimax60 {

namespace {

// Stream indices for RandomSource::derive.
constexpr std::uint64_t kPayloadStream = 0;
constexpr std::uint64_t kFadingStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kSweepPointBase = 1000;

std::string describe_profile(const RunConfig& cfg) {
  if (!cfg.taps.empty()) return "inline:" + std::to_string(cfg.taps.size()) + "-tap";
  if (!cfg.profile_path.empty()) return cfg.profile_path;
  return "identity";
}

}  // namespace

LinkSimulator::LinkSimulator(RunConfig cfg)
    : cfg_(std::move(cfg)), frame_((cfg_.validate(), cfg_.frame_config())), profile_(cfg_.channel_profile()) {
  if (!cfg_.payload_file.empty()) {
    std::ifstream in(cfg_.payload_file, std::ios::binary);
    if (!in) throw ConfigError("cannot open payload file '" + cfg_.payload_file + "'");
    file_payload_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (file_payload_.empty()) throw ConfigError("payload file '" + cfg_.payload_file + "' is empty");
  }
}

double LinkSimulator::noise_variance(std::optional<double> ebn0_db) const {
  if (!ebn0_db) ebn0_db = cfg_.ebn0_db;
  if (ebn0_db) return noise_variance_for_ebn0(*ebn0_db, frame_, cfg_.energy);
  if (cfg_.noise_variance) return *cfg_.noise_variance;
  return profile_.noise_variance;
}

std::size_t LinkSimulator::pdu_bits() const noexcept {
  return 8 * pdu_length(cfg_.payload_bytes, cfg_.flags.ci);
}

std::size_t LinkSimulator::pdus_for_bits(std::uint64_t bits) const {
  const std::size_t per = pdu_bits();
  return static_cast<std::size_t>((bits + per - 1) / per);
}

Bytes LinkSimulator::next_payload(RandomSource& rng, std::size_t index) const {
  Bytes payload(cfg_.payload_bytes);
  if (file_payload_.empty()) {
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next_u64() >> 56);
  } else {
    // File bytes are cycled; each PDU continues where the previous stopped.
    const std::size_t start = (index * cfg_.payload_bytes) % file_payload_.size();
    for (std::size_t i = 0; i < payload.size(); ++i) {
      payload[i] = file_payload_[(start + i) % file_payload_.size()];
    }
  }
  return payload;
}

BurstResult LinkSimulator::run_burst(std::size_t n_pdus, double noise_variance,
                                     const RandomSource& rng) const {
  BurstResult r;
  RandomSource payload_rng = rng.derive(kPayloadStream);
  RandomSource fading_rng = rng.derive(kFadingStream);
  RandomSource noise_rng = rng.derive(kNoiseStream);

  std::vector<MacPdu> pdus;
  pdus.reserve(n_pdus);
  for (std::size_t i = 0; i < n_pdus; ++i) {
    pdus.push_back(build_pdu(next_payload(payload_rng, i), cfg_.cid, cfg_.flags));
    const Bits b = serialize_pdu(pdus.back());
    r.tx_bits.insert(r.tx_bits.end(), b.begin(), b.end());
  }

  // Transmit.
  const std::size_t n_frames = (r.tx_bits.size() + cfg_.bits_per_frame - 1) / cfg_.bits_per_frame;
  const std::size_t chip_syms = cfg_.chip_frame_len / 2;
  const cplx pad_point = qpsk_map(Bits{0, 0}).front();
  const PnGenerator pn = cfg_.pn_generator();

  std::vector<OfdmSymbol> symbols;
  symbols.reserve(n_frames);
  std::vector<std::size_t> payload_lens(n_frames);
  r.demod.c = ComplexGrid(n_frames, frame_.n_fft());
  CVec data_ref;
  data_ref.reserve(n_frames * frame_.n_data());
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t begin = f * cfg_.bits_per_frame;
    const std::size_t end = std::min(begin + cfg_.bits_per_frame, r.tx_bits.size());
    PnGenerator gen = pn.reset();
    const ChipFrame chips =
        spread(std::span(r.tx_bits).subspan(begin, end - begin), gen, cfg_.chip_frame_len, cfg_.chip_rate);
    payload_lens[f] = chips.payload_len;
    CVec data = qpsk_map(chips.chips);
    data.resize(frame_.n_data(), pad_point);
    data_ref.insert(data_ref.end(), data.begin(), data.end());
    OfdmSymbol sym = ofdm_modulate(pack_subcarriers(data, frame_, f), frame_, f);
    std::copy(sym.freq_bins.begin(), sym.freq_bins.end(), r.demod.c.row(f).begin());
    symbols.push_back(std::move(sym));
  }
  r.tx = concat_symbols(symbols, frame_);

  // Channel.
  ChannelProfile channel = profile_;
  channel.noise_variance = noise_variance;
  const std::size_t out_len = r.tx.size() + channel.max_delay_samples(frame_.sample_rate());
  // Without a configured profile the channel is a fixed unit gain (AWGN only).
  const FadingTrajectory trajectory =
      cfg_.has_channel_profile() ? fading_process(channel, out_len, frame_.sample_rate(), fading_rng)
                                 : FadingTrajectory::constant(CVec{1.0}, out_len, frame_.sample_rate());
  r.rx = channel_apply(r.tx, channel, trajectory, noise_rng);

  // Receive.
  DemodOutput demod = ofdm_demodulate(r.rx, frame_, n_frames);
  r.demod.s = std::move(demod.s);
  r.truth = effective_channel(channel, trajectory, frame_, n_frames);
  r.demod.h_used = r.truth;
  r.estimate = cfg_.estimator == EstimatorMethod::genie ? estimate_genie(r.demod, r.truth, frame_)
                                                        : estimate_ls(r.demod, frame_, cfg_.estimator);
  const EqualizedSymbols eq = equalize(r.demod, r.estimate, frame_);

  auto& rep = r.report;
  r.rx_bits.reserve(r.tx_bits.size());
  for (std::size_t f = 0; f < n_frames; ++f) {
    const auto syms = std::span(eq.symbols).subspan(f * frame_.n_data(), chip_syms);
    ChipFrame rx_frame{qpsk_demap(syms), cfg_.chip_rate, payload_lens[f]};
    PnGenerator gen = pn.reset();
    const Bits bits = despread(rx_frame, gen);
    r.rx_bits.insert(r.rx_bits.end(), bits.begin(), bits.end());
  }
  for (std::size_t i = 0; i < eq.symbols.size(); ++i) {
    r.evm_err += std::norm(eq.symbols[i] - data_ref[i]);
    r.evm_ref += std::norm(data_ref[i]);
  }

  // Despreading XORs the same PN sequence on both sides, so bit pairs here
  // line up with the QPSK symbols that carried them.
  const BitErrorCount be = ber_count(r.tx_bits, r.rx_bits);
  const BitErrorCount se = qpsk_symbol_errors(r.tx_bits, r.rx_bits);
  rep.bits_compared = be.bits_compared;
  rep.bit_errors = be.bit_errors;
  rep.ber = be.ber();
  rep.symbols_compared = se.bits_compared;
  rep.symbol_errors = se.bit_errors;
  rep.ser = se.ber();
  rep.evm_pct = r.evm_ref > 0.0 ? 100.0 * std::sqrt(r.evm_err / r.evm_ref) : 0.0;
  rep.erasures = eq.erasures;
  rep.ofdm_symbols = n_frames;
  rep.noise_variance = noise_variance;
  rep.estimator = to_string(cfg_.estimator);
  rep.profile = describe_profile(cfg_);

  const std::size_t per = pdu_bits();
  rep.pdus_sent = pdus.size();
  for (std::size_t i = 0; i < pdus.size(); ++i) {
    try {
      const MacPdu parsed = parse_pdu(std::span(r.rx_bits).subspan(i * per, per));
      if (parsed == pdus[i]) ++rep.pdus_ok;
    } catch (const HcsMismatchError&) {
      ++rep.hcs_failures;
    } catch (const CrcMismatchError&) {
      ++rep.crc_failures;
    } catch (const Error&) {
      // A corrupted LEN field can make the PDU look truncated or too short.
      ++rep.hcs_failures;
    }
  }
  return r;
}

LoopbackResult run_loopback(const RunConfig& cfg) {
  const LinkSimulator sim(cfg);
  LoopbackResult out;
  const RandomSource rng(cfg.seed);
  out.burst = sim.run_burst(sim.pdus_for_bits(cfg.bits), sim.noise_variance(std::nullopt), rng);
  out.burst.report.seed = cfg.seed;
  out.burst.report.ebn0_db = cfg.ebn0_db;
  const std::size_t seg = std::min(cfg.spectrum_segment, std::size_t{1} << static_cast<unsigned>(
                                                             std::floor(std::log2(out.burst.tx.size()))));
  out.tx_spectrum = psd_estimate(out.burst.tx, seg, 0.5, Window::hann);
  out.occupied_bw_hz = occupied_bandwidth(out.tx_spectrum, 0.99);
  return out;
}

namespace {

SweepPoint run_point(const LinkSimulator& sim, double ebn0_db, const RandomSource& point_rng) {
  const RunConfig& cfg = sim.config();
  SweepPoint point;
  LinkReport& total = point.report;
  const double nv = sim.noise_variance(ebn0_db);
  double evm_err = 0.0;
  double evm_ref = 0.0;
  for (std::uint64_t burst = 0; total.bits_compared < cfg.bits; ++burst) {
    BurstResult r = sim.run_burst(cfg.pdus_per_burst, nv, point_rng.derive(burst));
    if (burst == 0) point.first_rx = std::move(r.rx);
    const LinkReport& b = r.report;
    total.bits_compared += b.bits_compared;
    total.bit_errors += b.bit_errors;
    total.symbols_compared += b.symbols_compared;
    total.symbol_errors += b.symbol_errors;
    total.erasures += b.erasures;
    total.pdus_sent += b.pdus_sent;
    total.pdus_ok += b.pdus_ok;
    total.hcs_failures += b.hcs_failures;
    total.crc_failures += b.crc_failures;
    total.ofdm_symbols += b.ofdm_symbols;
    evm_err += r.evm_err;
    evm_ref += r.evm_ref;
    total.profile = b.profile;
    total.estimator = b.estimator;
  }
  total.ber = static_cast<double>(total.bit_errors) / static_cast<double>(total.bits_compared);
  total.ser = static_cast<double>(total.symbol_errors) / static_cast<double>(total.symbols_compared);
  total.evm_pct = evm_ref > 0.0 ? 100.0 * std::sqrt(evm_err / evm_ref) : 0.0;
  total.noise_variance = nv;
  total.ebn0_db = ebn0_db;
  total.seed = cfg.seed;
  return point;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const RunConfig& cfg, std::span<const double> ebn0_db) {
  if (ebn0_db.empty()) throw ConfigError("sweep needs at least one Eb/N0 value");
  const LinkSimulator sim(cfg);
  const RandomSource master(cfg.seed);
  std::vector<SweepPoint> points(ebn0_db.size());

  std::size_t threads = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, points.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      points[i] = run_point(sim, ebn0_db[i], master.derive(kSweepPointBase + i));
    }
    return points;
  }

  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = 0;
        {
          std::lock_guard lock(mu);
          if (next >= points.size() || failure) return;
          i = next++;
        }
        try {
          points[i] = run_point(sim, ebn0_db[i], master.derive(kSweepPointBase + i));
        } catch (...) {
          std::lock_guard lock(mu);
          failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return points;
}

}  // namespace wimax60
