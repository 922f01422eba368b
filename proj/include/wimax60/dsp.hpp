#pragma once

// Complex sample containers, radix-2 FFT, Welch spectra and the seeded random
// source shared by the rest of the simulator.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace wimax60 {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// Default baseband rate. 200 occupied bins out of 256 then span 1.75 MHz.
inline constexpr double kDefaultSampleRate = 2.24e6;

class SampleBuffer {
 public:
  SampleBuffer() = default;
  SampleBuffer(CVec samples, double sample_rate);

  const CVec& samples() const noexcept { return samples_; }
  CVec& samples() noexcept { return samples_; }
  double sample_rate() const noexcept { return sample_rate_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const cplx& operator[](std::size_t i) const { return samples_[i]; }

  // Mean of |x|^2; zero for an empty buffer.
  double mean_power() const;

 private:
  CVec samples_;
  double sample_rate_ = kDefaultSampleRate;
};

bool is_power_of_two(std::size_t n) noexcept;

// Unnormalized forward DFT; the inverse carries the 1/N factor so that
// inverse(forward(x)) == x. Length must be a power of two.
void fft_inplace(std::span<cplx> data, bool inverse = false);
CVec fft(std::span<const cplx> data, bool inverse = false);
inline CVec ifft(std::span<const cplx> data) { return fft(data, true); }

enum class Window { hann, rectangular };

struct SpectrumEstimate {
  std::vector<double> bin_freqs;  // Hz, increasing, centred on DC
  std::vector<double> power_db;   // dB relative to unit power, per bin
  double resolution_bw = 0.0;     // bin spacing in Hz

  std::size_t size() const noexcept { return bin_freqs.size(); }
};

// Value reported for bins carrying no power at all.
inline constexpr double kPowerFloorDb = -300.0;

// Averaged windowed periodogram. Per-bin powers are scaled so that their
// linear sum estimates the mean power of the buffer.
SpectrumEstimate psd_estimate(const SampleBuffer& buf, std::size_t segment_len,
                              double overlap = 0.5, Window window = Window::hann);

// Smallest contiguous span holding `fraction` of the total power, measured
// between the centres of its outermost bins.
double occupied_bandwidth(const SpectrumEstimate& spec, double fraction = 0.99);

void write_spectrum_csv(std::ostream& out, const SpectrumEstimate& spec);

// Deterministic random source: mt19937_64 for raw draws, a fixed 53-bit
// uniform mapping and Box-Muller for Gaussians, so a seed reproduces the
// same stream on every platform.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed = 1);

  std::uint64_t seed() const noexcept { return seed_; }
  static constexpr const char* algorithm_id() noexcept { return "mt19937_64+box-muller"; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1).
  double uniform();
  // Standard normal.
  double gaussian();
  // Circular complex Gaussian with E|z|^2 = variance.
  cplx complex_gaussian(double variance = 1.0);
  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

  // Independent child source for stream `index`, derived from this seed only.
  RandomSource derive(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer, used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

}  // namespace wimax60
