#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "wimax60/bits.hpp"
#include "wimax60/chanest.hpp"
#include "wimax60/channel.hpp"
#include "wimax60/config.hpp"
#include "wimax60/dsp.hpp"
#include "wimax60/error.hpp"
#include "wimax60/link.hpp"
#include "wimax60/mac.hpp"
#include "wimax60/metrics.hpp"
#include "wimax60/ofdm.hpp"
#include "wimax60/spreading.hpp"

namespace py = pybind11;
using namespace wimax60;

namespace {

using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using BitArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

CVec to_cvec(const ComplexArray& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D complex array");
  return CVec(a.data(), a.data() + a.size());
}

Bits to_bits(const BitArray& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D bit array");
  return Bits(a.data(), a.data() + a.size());
}

ComplexArray from_cvec(const CVec& v) {
  ComplexArray out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

BitArray from_bits(const Bits& b) {
  BitArray out(static_cast<py::ssize_t>(b.size()));
  std::copy(b.begin(), b.end(), out.mutable_data());
  return out;
}

ComplexArray from_grid(const ComplexGrid& g) {
  ComplexArray out({static_cast<py::ssize_t>(g.rows()), static_cast<py::ssize_t>(g.cols())});
  std::copy(g.data().begin(), g.data().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const LinkReport& r) {
  py::dict d;
  d["bits_compared"] = r.bits_compared;
  d["bit_errors"] = r.bit_errors;
  d["ber"] = r.ber;
  d["symbols_compared"] = r.symbols_compared;
  d["symbol_errors"] = r.symbol_errors;
  d["ser"] = r.ser;
  d["evm_pct"] = r.evm_pct;
  d["erasures"] = r.erasures;
  d["pdus_sent"] = r.pdus_sent;
  d["pdus_ok"] = r.pdus_ok;
  d["hcs_failures"] = r.hcs_failures;
  d["crc_failures"] = r.crc_failures;
  d["ofdm_symbols"] = r.ofdm_symbols;
  d["seed"] = r.seed;
  d["ebn0_db"] = r.ebn0_db ? py::cast(*r.ebn0_db) : py::none();
  d["noise_variance"] = r.noise_variance;
  return d;
}

RunConfig config_from_text(const std::string& text, const std::string& base_dir) {
  std::istringstream in(text);
  return parse_run_config(in, base_dir);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "OFDM link-level simulator core";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<CaptureError>(m, "CaptureError", base.ptr());
  py::register_exception<HcsMismatchError>(m, "HcsMismatchError", base.ptr());
  py::register_exception<CrcMismatchError>(m, "CrcMismatchError", base.ptr());

  m.def("fft", [](const ComplexArray& x) { return from_cvec(fft(to_cvec(x))); }, py::arg("x"));
  m.def("ifft", [](const ComplexArray& x) { return from_cvec(ifft(to_cvec(x))); }, py::arg("x"));

  m.def(
      "psd",
      [](const ComplexArray& x, double sample_rate, std::size_t segment) {
        const auto s = psd_estimate(SampleBuffer(to_cvec(x), sample_rate), segment);
        return py::make_tuple(py::array_t<double>(static_cast<py::ssize_t>(s.bin_freqs.size()), s.bin_freqs.data()),
                              py::array_t<double>(static_cast<py::ssize_t>(s.power_db.size()), s.power_db.data()));
      },
      py::arg("x"), py::arg("sample_rate") = kDefaultSampleRate, py::arg("segment") = 1024,
      "Welch PSD with a Hann window; returns (freqs_hz, power_db).");
  m.def(
      "occupied_bandwidth",
      [](const ComplexArray& x, double sample_rate, std::size_t segment, double fraction) {
        return occupied_bandwidth(psd_estimate(SampleBuffer(to_cvec(x), sample_rate), segment), fraction);
      },
      py::arg("x"), py::arg("sample_rate") = kDefaultSampleRate, py::arg("segment") = 1024,
      py::arg("fraction") = 0.99);

  m.def("crc8_hcs", [](const py::bytes& b) {
    const std::string s = b;
    return crc8_hcs(Bytes(s.begin(), s.end()));
  });
  m.def("crc32", [](const py::bytes& b) {
    const std::string s = b;
    return crc32(Bytes(s.begin(), s.end()));
  });
  m.def(
      "build_pdu",
      [](const py::bytes& payload, std::uint16_t cid, bool ci, bool ht, bool ec, unsigned ptype, unsigned eks) {
        const std::string s = payload;
        const MacFlags flags{ht, ec, static_cast<std::uint8_t>(ptype), static_cast<std::uint8_t>(eks), ci};
        const Bytes out = build_pdu(Bytes(s.begin(), s.end()), cid, flags).to_bytes();
        return py::bytes(reinterpret_cast<const char*>(out.data()), out.size());
      },
      py::arg("payload"), py::arg("cid"), py::arg("ci") = true, py::arg("ht") = false, py::arg("ec") = false,
      py::arg("ptype") = 0, py::arg("eks") = 0, "Serialized MAC PDU bytes.");
  m.def(
      "parse_pdu",
      [](const py::bytes& pdu) {
        const std::string s = pdu;
        const MacPdu p = parse_pdu(bytes_to_bits(Bytes(s.begin(), s.end())));
        py::dict d;
        d["cid"] = p.header.cid;
        d["len"] = p.header.len;
        d["ci"] = p.header.ci;
        d["hcs"] = p.header.hcs;
        d["payload"] = py::bytes(reinterpret_cast<const char*>(p.payload.data()), p.payload.size());
        return d;
      },
      py::arg("pdu"));

  m.def(
      "pn_sequence",
      [](std::size_t n, unsigned degree, std::uint32_t taps, std::uint32_t seed) {
        PnGenerator g(degree, taps, seed);
        return from_bits(g.next(n));
      },
      py::arg("n"), py::arg("degree") = kPnDefaultDegree, py::arg("taps") = kPnDefaultTaps,
      py::arg("seed") = (1U << kPnDefaultDegree) - 1U);
  m.def(
      "spread",
      [](const BitArray& data, std::size_t frame_len) {
        PnGenerator g = PnGenerator::standard();
        return from_bits(spread(to_bits(data), g, frame_len).chips);
      },
      py::arg("data"), py::arg("frame_len") = kDefaultChipFrameLen);

  m.def("qpsk_map", [](const BitArray& b) { return from_cvec(qpsk_map(to_bits(b))); }, py::arg("bits"));
  m.def("qpsk_demap", [](const ComplexArray& s) { return from_bits(qpsk_demap(to_cvec(s))); }, py::arg("symbols"));
  m.def("qpsk_theory_ber", &qpsk_theory_ber, py::arg("ebn0_db"));

  m.def(
      "effective_channel",
      [](const std::vector<double>& delays_s, const std::vector<std::complex<double>>& gains, std::size_t n_symbols) {
        if (delays_s.size() != gains.size()) throw py::value_error("delays and gains differ in length");
        const FrameConfig cfg = FrameConfig::standard();
        ChannelProfile p;
        for (double d : delays_s) p.taps.push_back(Tap{d, 1.0, 0.0});
        const auto traj = FadingTrajectory::constant(CVec(gains.begin(), gains.end()),
                                                     n_symbols * cfg.symbol_len(), cfg.sample_rate());
        return from_grid(effective_channel(p, traj, cfg, n_symbols));
      },
      py::arg("delays_s"), py::arg("gains"), py::arg("n_symbols") = 1,
      "Per-subcarrier response of a static channel on the standard frame, [symbol, bin].");

  m.def(
      "capture_write",
      [](const std::string& path, const ComplexArray& x, double sample_rate, double center_freq) {
        capture_write(path, SampleBuffer(to_cvec(x), sample_rate), center_freq);
      },
      py::arg("path"), py::arg("samples"), py::arg("sample_rate") = kDefaultSampleRate, py::arg("center_freq") = 0.0);
  m.def(
      "capture_read",
      [](const std::string& path) {
        const IqCapture c = capture_read(path);
        return py::make_tuple(from_cvec(c.buffer.samples()), c.buffer.sample_rate(), c.center_freq);
      },
      py::arg("path"), "Returns (samples, sample_rate, center_freq).");

  m.def(
      "loopback",
      [](const std::string& config_text, std::optional<std::uint64_t> seed, const std::string& base_dir) {
        RunConfig cfg = config_from_text(config_text, base_dir);
        if (seed) cfg.seed = *seed;
        LoopbackResult r;
        {
          py::gil_scoped_release release;
          r = run_loopback(cfg);
        }
        py::dict d = report_dict(r.burst.report);
        d["occupied_bw_hz"] = r.occupied_bw_hz;
        d["tx"] = from_cvec(r.burst.tx.samples());
        d["rx"] = from_cvec(r.burst.rx.samples());
        d["h_true"] = from_grid(r.burst.truth);
        d["h_est"] = from_grid(r.burst.estimate.h_hat);
        return d;
      },
      py::arg("config_text") = "", py::arg("seed") = py::none(), py::arg("base_dir") = "",
      "Runs one burst from a config given as text and returns the report with signals.");
  m.def(
      "sweep",
      [](const std::vector<double>& ebn0_db, const std::string& config_text, std::optional<std::uint64_t> seed,
         const std::string& base_dir) {
        RunConfig cfg = config_from_text(config_text, base_dir);
        if (seed) cfg.seed = *seed;
        std::vector<SweepPoint> pts;
        {
          py::gil_scoped_release release;
          pts = run_sweep(cfg, ebn0_db);
        }
        py::list out;
        for (const auto& p : pts) out.append(report_dict(p.report));
        return out;
      },
      py::arg("ebn0_db"), py::arg("config_text") = "", py::arg("seed") = py::none(), py::arg("base_dir") = "");
  m.def(
      "canonical_config",
      [](const std::string& config_text) { return config_from_text(config_text, "").to_text(); },
      py::arg("config_text") = "");
}
