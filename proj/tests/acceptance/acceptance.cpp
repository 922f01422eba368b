// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wimax60/bits.hpp"
#include "wimax60/channel.hpp"
#include "wimax60/config.hpp"
#include "wimax60/error.hpp"
#include "wimax60/link.hpp"
#include "wimax60/mac.hpp"
#include "wimax60/metrics.hpp"
#include "wimax60/ofdm.hpp"
#include "wimax60/spreading.hpp"

using namespace wimax60;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = limit_s <= 0.0 || secs < limit_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2f s", secs);
  std::printf("%s criterion %d: %s [%s%s%s] %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), timing,
              limit_s > 0.0 ? " / limit " : "", limit_s > 0.0 ? std::to_string(static_cast<int>(limit_s)).append(" s").c_str() : "",
              o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

CVec random_qpsk(std::size_t n, RandomSource& rng) {
  Bits b(2 * n);
  for (auto& v : b) v = rng.bit();
  return qpsk_map(b);
}

// Eb/N0 (dB) at which Q(sqrt(2 x)) equals ber, by bisection on the oracle Q.
double oracle_ebn0_for_ber(double ber) {
  double lo = -5.0;
  double hi = 15.0;
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (oracle::q_function(std::sqrt(2.0 * std::pow(10.0, mid / 10.0))) > ber) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string capture_bytes(const SampleBuffer& buf) {
  std::ostringstream out(std::ios::binary);
  capture_write(out, buf);
  return out.str();
}

Outcome lossless_loopback() {
  RunConfig cfg;
  // The bit budget counts whole PDUs; size it so the payloads alone reach 1e5 bits.
  const std::uint64_t pdu_bits = 8 * pdu_length(cfg.payload_bytes, cfg.flags.ci);
  const std::uint64_t n_pdus = (100000 + 8 * cfg.payload_bytes - 1) / (8 * cfg.payload_bytes);
  cfg.bits = n_pdus * pdu_bits;
  const LoopbackResult r = run_loopback(cfg);
  const auto& rep = r.burst.report;
  const std::uint64_t payload_bits = rep.pdus_ok * 8 * cfg.payload_bytes;
  const bool ok = payload_bits >= 100000 && rep.bit_errors == 0 && rep.pdus_ok == rep.pdus_sent &&
                  r.burst.tx_bits == r.burst.rx_bits;
  return {ok, "payload_bits=" + std::to_string(payload_bits) + " pdu_bits=" + std::to_string(rep.bits_compared) +
                  " errors=" + std::to_string(rep.bit_errors) + " pdus=" + std::to_string(rep.pdus_ok) + "/" +
                  std::to_string(rep.pdus_sent)};
}

Outcome factorization() {
  const FrameConfig cfg = FrameConfig::standard();
  const double fs = cfg.sample_rate();
  RandomSource rng(2024);
  const std::size_t n_sym = 6;
  double worst = 0.0;
  double worst_oracle = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> delays;
    while (delays.size() < 3) {
      const auto d = static_cast<std::size_t>(rng.uniform() * static_cast<double>(cfg.guard_len()));
      if (std::find(delays.begin(), delays.end(), d) == delays.end()) delays.push_back(d);
    }
    std::sort(delays.begin(), delays.end());
    ChannelProfile p;
    CVec gains;
    for (auto d : delays) {
      p.taps.push_back(Tap{static_cast<double>(d) / fs, 1.0 / 3.0, 0.0});
      gains.push_back(rng.complex_gaussian(1.0 / 3.0));
    }
    std::vector<OfdmSymbol> syms;
    for (std::size_t k = 0; k < n_sym; ++k) {
      syms.push_back(ofdm_modulate(pack_subcarriers(random_qpsk(cfg.n_data(), rng), cfg, k), cfg, k));
    }
    const SampleBuffer tx = concat_symbols(syms, cfg);
    const auto traj = FadingTrajectory::constant(gains, tx.size() + delays.back(), fs);
    const SampleBuffer rx = channel_apply(tx, p, traj, rng);
    const DemodOutput d = ofdm_demodulate(rx, cfg, n_sym);
    const ComplexGrid h = effective_channel(p, traj, cfg, n_sym);

    std::vector<cplx> impulse(cfg.n_fft());
    for (std::size_t l = 0; l < 3; ++l) impulse[delays[l]] += gains[l];
    const auto h_ref = oracle::dft(impulse);

    double ref = 0.0;
    for (std::size_t k = 0; k < n_sym; ++k) {
      for (std::size_t q = 0; q < cfg.n_fft(); ++q) ref += std::norm(syms[k].freq_bins[q] * h(k, q));
    }
    ref = std::sqrt(ref / static_cast<double>(n_sym * cfg.n_fft()));
    for (std::size_t k = 0; k < n_sym; ++k) {
      for (std::size_t q = 0; q < cfg.n_fft(); ++q) {
        worst = std::max(worst, std::abs(d.s(k, q) - syms[k].freq_bins[q] * h(k, q)) / ref);
        worst_oracle = std::max(worst_oracle, std::abs(h(k, q) - h_ref[q]));
      }
    }
  }
  return {worst < 1e-9 && worst_oracle < 1e-9,
          fmt("max_rel_err=%.3g", worst) + fmt(" max|H-DFT(h)|=%.3g", worst_oracle)};
}

Outcome guard_interval() {
  RunConfig cfg;
  cfg.bits = 1'000'000;
  cfg.seed = 31;
  const double fs = cfg.sample_rate;
  cfg.taps = {Tap{0.0, 0.5, 0.0}, Tap{30.0 / fs, 0.3, 0.0}, Tap{60.0 / fs, 0.2, 0.0}};
  cfg.guard_len = 64;
  const LoopbackResult wide = run_loopback(cfg);
  cfg.guard_len = 16;
  const LoopbackResult narrow = run_loopback(cfg);
  const auto& a = wide.burst.report;
  const auto& b = narrow.burst.report;
  const bool ok = a.bits_compared >= 1'000'000 && a.bit_errors == 0 && b.bits_compared >= 1'000'000 &&
                  b.ber > 1e-3;
  return {ok, "tau_max=60 G=64: ber=" + fmt("%.3g", a.ber) + " over " + std::to_string(a.bits_compared) +
                  "; G=16: ber=" + fmt("%.3g", b.ber) + " over " + std::to_string(b.bits_compared)};
}

Outcome fading_statistics() {
  const double fs = kDefaultSampleRate;
  ChannelProfile p{{Tap{0.0, 0.5, 2000.0}, Tap{1.0 / fs, 0.3, 2000.0}, Tap{2.0 / fs, 0.2, 50000.0}}, 0.0};
  const std::size_t n = 32768;
  const std::size_t realizations = 300;
  const std::size_t n_lags = 40;
  const std::size_t n_taps = p.taps.size();

  std::vector<std::vector<std::size_t>> lags(n_taps);
  for (std::size_t l = 0; l < n_taps; ++l) {
    const double max_lag = 0.5 / p.taps[l].doppler_hz * fs;
    for (std::size_t i = 0; i <= n_lags; ++i) {
      lags[l].push_back(static_cast<std::size_t>(std::lround(max_lag * static_cast<double>(i) / n_lags)));
    }
  }
  std::vector<std::vector<cplx>> acc(n_taps, std::vector<cplx>(n_lags + 1));
  std::vector<double> power(n_taps, 0.0);
  std::vector<std::vector<cplx>> cross(n_taps, std::vector<cplx>(n_taps));

  RandomSource rng(4);
  for (std::size_t r = 0; r < realizations; ++r) {
    const auto traj = fading_process(p, n, fs, rng);
    for (std::size_t l = 0; l < n_taps; ++l) {
      const CVec& h = traj.tap(l);
      for (const auto& v : h) power[l] += std::norm(v);
      for (std::size_t i = 0; i < lags[l].size(); ++i) {
        const std::size_t lag = lags[l][i];
        cplx s{};
        std::size_t cnt = 0;
        for (std::size_t t = 0; t + lag < n; t += 4, ++cnt) s += h[t + lag] * std::conj(h[t]);
        acc[l][i] += s / static_cast<double>(cnt);
      }
      for (std::size_t m = l + 1; m < n_taps; ++m) {
        cplx s{};
        for (std::size_t t = 0; t < n; ++t) s += h[t] * std::conj(traj.tap(m)[t]);
        cross[l][m] += s;
      }
    }
  }

  double worst_rms = 0.0;
  double worst_power = 0.0;
  double worst_cross = 0.0;
  for (std::size_t l = 0; l < n_taps; ++l) {
    const double s2 = p.taps[l].power;
    double sq = 0.0;
    for (std::size_t i = 0; i < lags[l].size(); ++i) {
      const double dt = static_cast<double>(lags[l][i]) / fs;
      const double expect = s2 * oracle::bessel_j0(2.0 * std::numbers::pi * p.taps[l].doppler_hz * dt);
      const double got = acc[l][i].real() / static_cast<double>(realizations);
      sq += (got - expect) * (got - expect);
    }
    worst_rms = std::max(worst_rms, std::sqrt(sq / static_cast<double>(lags[l].size())) / s2);
    const double pw = power[l] / static_cast<double>(realizations * n);
    worst_power = std::max(worst_power, std::abs(pw / s2 - 1.0));
    for (std::size_t m = l + 1; m < n_taps; ++m) {
      const double pm = power[m];
      worst_cross = std::max(worst_cross, std::abs(cross[l][m]) / std::sqrt(power[l] * pm));
    }
  }
  const bool ok = worst_rms < 0.05 && worst_power < 0.02 && worst_cross < 0.02;
  return {ok, fmt("acf_rms/sigma2=%.4f", worst_rms) + fmt(" power_dev=%.4f", worst_power) +
                  fmt(" cross=%.4f", worst_cross) + " realizations=" + std::to_string(realizations)};
}

Outcome awgn_curve() {
  RunConfig cfg;
  cfg.bits = 10'000'000;
  cfg.seed = 5;
  const std::vector<double> ebn0{0, 2, 4, 6, 8, 10};
  const auto points = run_sweep(cfg, ebn0);
  bool ok = true;
  std::size_t in_range = 0;
  double worst = 0.0;
  std::string detail;
  for (const auto& pt : points) {
    const auto& r = pt.report;
    ok = ok && r.bits_compared >= 10'000'000;
    detail += fmt(" %.0fdB:", *r.ebn0_db) + fmt("%.3g", r.ber);
    if (r.ber >= 1e-4 && r.ber <= 1e-2) {
      ++in_range;
      const double offset = *r.ebn0_db - oracle_ebn0_for_ber(r.ber);
      worst = std::max(worst, std::abs(offset));
      detail += fmt("(offset %+.3f dB)", offset);
    }
  }
  ok = ok && in_range >= 2 && worst <= 0.5;
  return {ok, "max_offset=" + fmt("%.3f dB", worst) + " points_in_range=" + std::to_string(in_range) + detail};
}

Outcome occupied_bandwidth_check() {
  RunConfig cfg;
  cfg.bits = 100000;
  const LoopbackResult r = run_loopback(cfg);
  const double bw = r.occupied_bw_hz;
  return {std::abs(bw - 1.75e6) <= 0.175e6, fmt("occupied_bw=%.4f MHz (target 1.75 +-0.175)", bw / 1e6)};
}

Outcome header_integrity() {
  std::size_t flips = 0;
  std::size_t detected = 0;
  RandomSource rng(77);
  const std::vector<std::pair<std::size_t, bool>> shapes{{0, false}, {0, true}, {10, true}, {100, false}, {1500, true}};
  for (const auto& [len, ci] : shapes) {
    Bytes payload(len);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next_u64() & 0xFFU);
    const auto cid = static_cast<std::uint16_t>(rng.next_u64() & 0xFFFFU);
    const Bits good = bytes_to_bits(build_pdu(payload, cid, MacFlags{false, false, 0, 0, ci}).to_bytes());
    for (std::size_t i = 0; i < kMacHeaderBits; ++i) {
      Bits bad = good;
      bad[i] ^= 1U;
      ++flips;
      try {
        (void)parse_pdu(bad);
      } catch (const HcsMismatchError&) {
        ++detected;
      }
    }
  }

  PnGenerator g = PnGenerator::standard();
  oracle::StageLfsr ref(15, {14, 15});
  const std::uint32_t seed = g.state();
  std::size_t period = 0;
  std::size_t ones = 0;
  bool matches_oracle = true;
  do {
    const int b = g.next_bit();
    matches_oracle = matches_oracle && b == ref.next();
    ones += static_cast<std::size_t>(b);
    ++period;
  } while (g.state() != seed && period < 40000);
  const bool ok = flips > 0 && detected == flips && period == 32767 && ones == 16384 && matches_oracle;
  return {ok, "hcs_detected=" + std::to_string(detected) + "/" + std::to_string(flips) +
                  " pn_period=" + std::to_string(period) + " ones=" + std::to_string(ones) +
                  (matches_oracle ? "" : " (differs from stage-array LFSR)")};
}

Outcome capture_format() {
  RandomSource rng(8);
  CVec x(100000);
  for (auto& v : x) v = rng.complex_gaussian(1.0);
  const SampleBuffer buf = to_capture_precision(SampleBuffer(x, 2.24e6));
  const std::string bytes = capture_bytes(buf);
  std::istringstream in(bytes, std::ios::binary);
  const IqCapture back = capture_read(in);
  const bool round_trip = back.buffer.samples() == buf.samples() && back.buffer.sample_rate() == 2.24e6;

  std::ifstream hex_in(std::string(WIMAX60_FIXTURE_DIR) + "/one_sample.iqcap.hex");
  std::string hex;
  hex_in >> hex;
  std::ostringstream one(std::ios::binary);
  capture_write(one, SampleBuffer(CVec{{1.0, -0.5}}, 2.24e6), 60e9);
  const std::string written = one.str();
  const bool layout = !hex.empty() && to_hex(Bytes(written.begin(), written.end())) == hex;

  const std::string small = capture_bytes(SampleBuffer(CVec{{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}}, 1e6));
  std::size_t truncations = 0;
  std::size_t rejected = 0;
  for (std::size_t cut = 0; cut < small.size(); ++cut) {
    ++truncations;
    std::istringstream t(small.substr(0, cut), std::ios::binary);
    try {
      (void)capture_read(t);
    } catch (const TruncatedPayloadError&) {
      ++rejected;
    }
  }
  std::size_t magic_rejected = 0;
  for (std::size_t i = 0; i < kCaptureMagic.size(); ++i) {
    std::string bad = small;
    bad[i] = static_cast<char>(bad[i] ^ 0x20);
    std::istringstream t(bad, std::ios::binary);
    try {
      (void)capture_read(t);
    } catch (const BadMagicError&) {
      ++magic_rejected;
    }
  }
  const bool ok = round_trip && layout && rejected == truncations && magic_rejected == kCaptureMagic.size();
  return {ok, std::string("round_trip=") + (round_trip ? "exact" : "MISMATCH") + " fixture=" +
                  (layout ? "match" : "MISMATCH") + " truncations_rejected=" + std::to_string(rejected) + "/" +
                  std::to_string(truncations) + " bad_magic_rejected=" + std::to_string(magic_rejected) + "/8"};
}

std::string render_sweep(const std::vector<SweepPoint>& pts) {
  std::string out = LinkReport::csv_header() + "\n";
  for (const auto& p : pts) out += p.report.csv_row() + "\n";
  for (const auto& p : pts) out += capture_bytes(p.first_rx);
  return out;
}

Outcome determinism() {
  RunConfig cfg;
  cfg.bits = 200000;
  cfg.seed = 99;
  cfg.taps = {Tap{0.0, 0.7, 300.0}, Tap{4.0 / cfg.sample_rate, 0.3, 300.0}};
  cfg.estimator = EstimatorMethod::ls_linear;
  const std::vector<double> ebn0{0, 5, 10};
  cfg.threads = 4;
  const std::string a = render_sweep(run_sweep(cfg, ebn0));
  const std::string b = render_sweep(run_sweep(cfg, ebn0));
  cfg.threads = 1;
  const std::string c = render_sweep(run_sweep(cfg, ebn0));
  cfg.seed = 100;
  const std::string d = render_sweep(run_sweep(cfg, ebn0));
  const bool ok = a == b && a == c && a != d;
  return {ok, "artifact_bytes=" + std::to_string(a.size()) + (a == b ? " repeat=identical" : " repeat=DIFFERENT") +
                  (a == c ? " threads1=identical" : " threads1=DIFFERENT") +
                  (a != d ? " other_seed=differs" : " other_seed=SAME")};
}

}  // namespace

int main() {
  criterion(1, "lossless loopback, >=1e5 payload bits, BER 0", 5.0, lossless_loopback);
  criterion(2, "per-subcarrier factorization, 20 static 3-tap profiles", 10.0, factorization);
  criterion(3, "guard interval longer than the delay spread", 30.0, guard_interval);
  criterion(4, "fading autocorrelation, power and tap independence", 60.0, fading_statistics);
  criterion(5, "AWGN QPSK BER within 0.5 dB of theory", 300.0, awgn_curve);
  criterion(6, "99% occupied bandwidth 1.75 MHz +-10%", 5.0, occupied_bandwidth_check);
  criterion(7, "header bit-flip detection and PN period", 5.0, header_integrity);
  criterion(8, "capture round trip, layout and rejection", 1.0, capture_format);
  criterion(9, "sweep artifacts are deterministic", 0.0, determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
