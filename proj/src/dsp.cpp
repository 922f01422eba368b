#include "wimax60/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "wimax60/error.hpp"

namespace wimax60 {

SampleBuffer::SampleBuffer(CVec samples, double sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw GeometryError("sample rate must be positive and finite");
  }
}

double SampleBuffer::mean_power() const {
  if (samples_.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : samples_) acc += std::norm(s);
  return acc / static_cast<double>(samples_.size());
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

namespace {

struct FftPlan {
  std::vector<std::size_t> bitrev;
  CVec twiddles;  // exp(-j 2 pi k / n), k < n/2
};

const FftPlan& plan_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, FftPlan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  FftPlan plan;
  plan.bitrev.resize(n);
  unsigned bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (unsigned b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    }
    plan.bitrev[i] = r;
  }
  plan.twiddles.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    plan.twiddles[k] = {std::cos(a), std::sin(a)};
  }
  return cache.emplace(n, std::move(plan)).first->second;
}

}  // namespace

void fft_inplace(std::span<cplx> data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) {
    throw GeometryError("FFT length " + std::to_string(n) + " is not a power of two");
  }
  if (n == 1) return;
  const FftPlan& plan = plan_for(n);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = plan.bitrev[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx w = plan.twiddles[k * stride];
        if (inverse) w = std::conj(w);
        const cplx u = data[start + k];
        const cplx v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& x : data) x *= scale;
  }
}

CVec fft(std::span<const cplx> data, bool inverse) {
  CVec out(data.begin(), data.end());
  fft_inplace(out, inverse);
  return out;
}

SpectrumEstimate psd_estimate(const SampleBuffer& buf, std::size_t segment_len, double overlap,
                              Window window) {
  if (buf.empty()) throw GeometryError("cannot estimate the spectrum of an empty buffer");
  if (segment_len == 0 || segment_len > buf.size()) {
    throw GeometryError("segment length must be in [1, buffer length]");
  }
  if (!is_power_of_two(segment_len)) {
    throw GeometryError("segment length must be a power of two");
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) throw GeometryError("overlap must lie in [0, 1)");

  std::vector<double> w(segment_len, 1.0);
  if (window == Window::hann) {
    // Periodic Hann, so 50% overlapped windows sum to a constant.
    for (std::size_t i = 0; i < segment_len; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                   static_cast<double>(segment_len));
    }
  }
  double w_energy = 0.0;
  for (double v : w) w_energy += v * v;

  auto hop = static_cast<std::size_t>(std::floor(static_cast<double>(segment_len) * (1.0 - overlap)));
  hop = std::max<std::size_t>(hop, 1);

  std::vector<double> acc(segment_len, 0.0);
  std::size_t segments = 0;
  CVec seg(segment_len);
  const auto& x = buf.samples();
  for (std::size_t start = 0; start + segment_len <= x.size(); start += hop) {
    for (std::size_t i = 0; i < segment_len; ++i) seg[i] = x[start + i] * w[i];
    fft_inplace(seg);
    for (std::size_t i = 0; i < segment_len; ++i) acc[i] += std::norm(seg[i]);
    ++segments;
  }

  const double n = static_cast<double>(segment_len);
  const double scale = 1.0 / (static_cast<double>(segments) * n * w_energy);
  const double bin_bw = buf.sample_rate() / n;

  SpectrumEstimate spec;
  spec.resolution_bw = bin_bw;
  spec.bin_freqs.resize(segment_len);
  spec.power_db.resize(segment_len);
  const std::size_t half = segment_len / 2;
  for (std::size_t i = 0; i < segment_len; ++i) {
    // fftshift: output index i holds FFT bin (i + half) mod n.
    const std::size_t bin = (i + half) % segment_len;
    spec.bin_freqs[i] = (static_cast<double>(i) - static_cast<double>(half)) * bin_bw;
    const double p = acc[bin] * scale;
    spec.power_db[i] = p > 0.0 ? std::max(10.0 * std::log10(p), kPowerFloorDb) : kPowerFloorDb;
  }
  return spec;
}

double occupied_bandwidth(const SpectrumEstimate& spec, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw GeometryError("fraction must lie in (0, 1)");
  const std::size_t n = spec.size();
  if (n < 2) throw GeometryError("occupied bandwidth needs at least two spectrum bins");

  std::vector<double> p(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = spec.power_db[i] <= kPowerFloorDb ? 0.0 : std::pow(10.0, spec.power_db[i] / 10.0);
    total += p[i];
  }
  if (!(total > 0.0)) throw GeometryError("spectrum carries no power");

  const double target = fraction * total;
  // Two-pointer scan for the narrowest window reaching the target.
  std::size_t best_lo = 0;
  std::size_t best_hi = n - 1;
  double window = 0.0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < n; ++hi) {
    window += p[hi];
    while (lo < hi && window - p[lo] >= target) {
      window -= p[lo];
      ++lo;
    }
    if (window >= target && hi - lo < best_hi - best_lo) {
      best_lo = lo;
      best_hi = hi;
    }
  }
  return spec.bin_freqs[best_hi] - spec.bin_freqs[best_lo];
}

void write_spectrum_csv(std::ostream& out, const SpectrumEstimate& spec) {
  const auto old_precision = out.precision(12);
  out << "freq_hz,power_db\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out << spec.bin_freqs[i] << ',' << spec.power_db[i] << '\n';
  }
  out.precision(old_precision);
}

std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double RandomSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

cplx RandomSource::complex_gaussian(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = gaussian();
  const double im = gaussian();
  return {s * re, s * im};
}

RandomSource RandomSource::derive(std::uint64_t index) const {
  return RandomSource(mix_seed(seed_ ^ mix_seed(index + 0x5851F42D4C957F2DULL)));
}

}  // namespace wimax60
