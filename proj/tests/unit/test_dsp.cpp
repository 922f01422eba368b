#include <cmath>
#include <numbers>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "wimax60/dsp.hpp"
#include "wimax60/error.hpp"

using namespace wimax60;

namespace {

CVec random_vector(std::size_t n, RandomSource& rng) {
  CVec x(n);
  for (auto& v : x) v = rng.complex_gaussian(1.0);
  return x;
}

double max_rel_error(const CVec& a, const CVec& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

}  // namespace

TEST_CASE("fft of an impulse is flat") {
  const CVec x{1.0, 0.0, 0.0, 0.0};
  const CVec y = fft(x);
  for (const auto& v : y) CHECK(v == cplx{1.0, 0.0});
}

TEST_CASE("fft of a constant concentrates at DC") {
  const CVec x{1.0, 1.0, 1.0, 1.0};
  const CVec y = fft(x);
  const auto ref = oracle::dft(x);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(y[i] - ref[i]) < 1e-15);
  CHECK(std::abs(y[0] - cplx{4.0, 0.0}) < 1e-15);
  CHECK(std::abs(y[1]) < 1e-15);
}

TEST_CASE("fft matches the direct DFT") {
  RandomSource rng(7);
  for (std::size_t n : {2u, 8u, 64u, 256u}) {
    const CVec x = random_vector(n, rng);
    CHECK(max_rel_error(fft(x), oracle::dft(x)) < 1e-12);
    CHECK(max_rel_error(fft(x, true), oracle::dft(x, true)) < 1e-12);
  }
}

TEST_CASE("fft round trip and Parseval") {
  RandomSource rng(11);
  for (std::size_t n : {64u, 256u, 1024u}) {
    const CVec x = random_vector(n, rng);
    const CVec X = fft(x);
    CHECK(max_rel_error(ifft(X), x) < 1e-12);

    double et = 0.0;
    double ef = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      et += std::norm(x[i]);
      ef += std::norm(X[i]);
    }
    CHECK(std::abs(et - ef / static_cast<double>(n)) / et < 1e-10);
  }
}

TEST_CASE("fft rejects non power of two lengths") {
  CVec x(6);
  CHECK_THROWS_AS(fft(x), GeometryError);
  CVec empty;
  CHECK_THROWS_AS(fft(empty), GeometryError);
}

TEST_CASE("sample buffer validates its rate") {
  CHECK_THROWS_AS(SampleBuffer(CVec(4), 0.0), GeometryError);
  CHECK_THROWS_AS(SampleBuffer(CVec(4), -1.0), GeometryError);
  const SampleBuffer b(CVec{{1.0, 1.0}, {0.0, 0.0}}, 10.0);
  CHECK(b.mean_power() == doctest::Approx(1.0));
}

TEST_CASE("psd locates a tone") {
  const double fs = 1.0e6;
  const std::size_t seg = 256;
  const double f0 = 40.0 * fs / seg;
  CVec x(seg * 32);
  for (std::size_t n = 0; n < x.size(); ++n) {
    x[n] = std::polar(1.0, 2.0 * std::numbers::pi * f0 * static_cast<double>(n) / fs);
  }
  const auto spec = psd_estimate(SampleBuffer(x, fs), seg);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec.power_db[i] > spec.power_db[peak]) peak = i;
  }
  CHECK(std::abs(spec.bin_freqs[peak] - f0) <= spec.resolution_bw);
  // A bin-centred Hann-windowed tone occupies three bins.
  CHECK(occupied_bandwidth(spec) <= 2.0 * spec.resolution_bw);
}

TEST_CASE("psd of white noise is flat and preserves power") {
  RandomSource rng(3);
  const std::size_t seg = 256;
  const std::size_t n_segments = 400;
  CVec x(seg * (n_segments + 1) / 2 * 2);
  for (auto& v : x) v = rng.complex_gaussian(2.0);
  const SampleBuffer buf(x, 1.0e6);
  const auto spec = psd_estimate(buf, seg, 0.5);

  double total = 0.0;
  double mean_db = 0.0;
  for (double p : spec.power_db) {
    total += std::pow(10.0, p / 10.0);
    mean_db += p;
  }
  mean_db /= static_cast<double>(spec.size());
  for (double p : spec.power_db) CHECK(std::abs(p - mean_db) < 1.5);
  CHECK(std::abs(total - buf.mean_power()) / buf.mean_power() < 0.05);
}

TEST_CASE("psd bins are uniform and increasing") {
  RandomSource rng(5);
  const auto spec = psd_estimate(SampleBuffer(random_vector(4096, rng), 2.0e6), 512);
  for (std::size_t i = 1; i < spec.size(); ++i) {
    CHECK(spec.bin_freqs[i] - spec.bin_freqs[i - 1] == doctest::Approx(spec.resolution_bw));
  }
  CHECK(spec.bin_freqs.front() == doctest::Approx(-1.0e6));
}

TEST_CASE("psd of zeros sits at the floor") {
  const auto spec = psd_estimate(SampleBuffer(CVec(1024), 1.0), 256);
  for (double p : spec.power_db) CHECK(p == kPowerFloorDb);
  CHECK_THROWS_AS(occupied_bandwidth(spec), GeometryError);
}

TEST_CASE("psd argument checks") {
  CHECK_THROWS_AS(psd_estimate(SampleBuffer(CVec{}, 1.0), 16), GeometryError);
  CHECK_THROWS_AS(psd_estimate(SampleBuffer(CVec(64), 1.0), 128), GeometryError);
  CHECK_THROWS_AS(psd_estimate(SampleBuffer(CVec(64), 1.0), 32, 1.0), GeometryError);
}

TEST_CASE("occupied bandwidth of a brick-wall band") {
  // Flat band of W Hz synthesized directly as a spectrum, integrated numerically.
  SpectrumEstimate spec;
  const std::size_t n = 1024;
  const double bw = 1000.0;
  spec.resolution_bw = bw;
  const double width = 300.0 * bw;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = (static_cast<double>(i) - 512.0) * bw;
    spec.bin_freqs.push_back(f);
    const bool inside = f >= -width / 2 && f < width / 2;
    spec.power_db.push_back(inside ? 0.0 : kPowerFloorDb);
  }
  // 297 of the 300 in-band bins hold 99%; width runs centre to centre.
  const double got = occupied_bandwidth(spec, 0.99);
  CHECK(got == doctest::Approx(width - 4.0 * bw));
}

TEST_CASE("occupied bandwidth argument checks") {
  SpectrumEstimate one;
  one.bin_freqs = {0.0};
  one.power_db = {0.0};
  one.resolution_bw = 1.0;
  CHECK_THROWS_AS(occupied_bandwidth(one), GeometryError);
  SpectrumEstimate two = one;
  two.bin_freqs.push_back(1.0);
  two.power_db.push_back(0.0);
  CHECK_THROWS_AS(occupied_bandwidth(two, 0.0), GeometryError);
  CHECK_THROWS_AS(occupied_bandwidth(two, 1.0), GeometryError);
}

TEST_CASE("spectrum csv layout") {
  SpectrumEstimate spec;
  spec.bin_freqs = {-1.0, 0.0};
  spec.power_db = {-3.5, 0.0};
  std::ostringstream out;
  write_spectrum_csv(out, spec);
  CHECK(out.str() == "freq_hz,power_db\n-1,-3.5\n0,0\n");
}

TEST_CASE("random source determinism") {
  RandomSource a(42);
  RandomSource b(42);
  bool same = true;
  for (int i = 0; i < 1'000'000; ++i) same = same && (a.next_u64() == b.next_u64());
  CHECK(same);
  RandomSource c(42);
  RandomSource d(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = c.gaussian();
    const double y = d.gaussian();
    CHECK(std::memcmp(&x, &y, sizeof x) == 0);
  }
  CHECK(RandomSource(1).derive(3).next_u64() == RandomSource(1).derive(3).next_u64());
  CHECK(RandomSource(1).derive(3).next_u64() != RandomSource(1).derive(4).next_u64());
}

TEST_CASE("gaussian draws have the requested moments") {
  RandomSource rng(9);
  const int n = 200000;
  double m = 0.0;
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx z = rng.complex_gaussian(3.0);
    m += z.real();
    v += std::norm(z);
  }
  CHECK(std::abs(m / n) < 0.02);
  CHECK(v / n == doctest::Approx(3.0).epsilon(0.02));
}
