#pragma once

// Tapped-delay-line fading channel with wide-sense stationary, uncorrelated
// scattering taps, additive Gaussian noise, and the per-subcarrier response
// seen by the demodulator.
//
// Fading: each tap is an independent circular complex Gaussian process with
// variance sigma_l^2 and autocorrelation sigma_l^2 * J0(2 pi f_D dt). It is
// produced by shaping a block of white Gaussian noise with the square root of
// the Jakes spectrum on an N-point frequency grid (a circular FIR whose
// response samples the spectrum; the band-edge bin uses the integrated value).
// N is the next power of two covering the trajectory and at least
// 256 / (f_D * step), so the Doppler band always spans >= 256 bins and the
// autocorrelation error stays below 1e-2 for lags up to 0.5 / f_D. Slow
// processes (f_D / sample_rate < 1/64) are generated on a grid 64x faster
// than f_D and linearly interpolated to the sample grid.
//
// Noise calibration: noise_variance is the variance of one complex sample.
// With the unnormalized-forward FFT, a unit QPSK point on one data subcarrier
// carries 1/n_fft energy in the time domain, so the energy per channel bit is
//   Eb = E_symbol / (2 * n_data),
//   E_symbol = (n_data [+ n_pilots]) / n_fft [* (n_fft + G) / n_fft],
// with the bracketed pilot and guard terms optional. The default (both off)
// measures Eb at the demodulator, where uncoded QPSK follows
// Q(sqrt(2 Eb/N0)); noise_variance = Eb / (Eb/N0).

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "wimax60/dsp.hpp"
#include "wimax60/grid.hpp"
#include "wimax60/ofdm.hpp"

namespace wimax60 {

struct Tap {
  double delay_s = 0.0;
  double power = 1.0;  // linear sigma_l^2
  double doppler_hz = 0.0;

  bool operator==(const Tap&) const = default;
};

struct ChannelProfile {
  std::vector<Tap> taps;
  double noise_variance = 0.0;

  // Throws ProfileError on an empty tap list, non-increasing or negative
  // delays, non-positive powers, or negative Doppler.
  void validate() const;

  // Delays rounded to the nearest sample.
  std::vector<std::size_t> delay_samples(double sample_rate) const;
  std::size_t max_delay_samples(double sample_rate) const;

  // Non-fatal issues: off-grid delays (> 1% of a sample) and total power
  // away from 1.
  std::vector<std::string> warnings(double sample_rate) const;

  // One tap, unit power, no Doppler.
  static ChannelProfile identity();

  bool operator==(const ChannelProfile&) const = default;
};

// Line-oriented "key = value" text with '#' comments:
//   tap = delay_ns,power_db,doppler_hz   (repeatable)
//   noise_variance = <linear>
ChannelProfile read_profile(std::istream& in);
ChannelProfile load_profile(const std::string& path);
void write_profile(std::ostream& out, const ChannelProfile& profile);

// Complex gains h_l[n] for every tap on the sample grid.
class FadingTrajectory {
 public:
  FadingTrajectory() = default;
  FadingTrajectory(std::vector<CVec> gains, double sample_rate);

  // Gains frozen at the given values for n samples.
  static FadingTrajectory constant(const CVec& gains, std::size_t n_samples, double sample_rate);

  std::size_t n_taps() const noexcept { return gains_.size(); }
  std::size_t n_samples() const noexcept { return gains_.empty() ? 0 : gains_.front().size(); }
  double sample_rate() const noexcept { return sample_rate_; }
  const cplx& gain(std::size_t tap, std::size_t n) const { return gains_[tap][n]; }
  const CVec& tap(std::size_t l) const { return gains_[l]; }

 private:
  std::vector<CVec> gains_;
  double sample_rate_ = kDefaultSampleRate;
};

// A single zero-mean process with unit variance and Jakes autocorrelation
// at normalized Doppler rho = f_D * step (0 < rho <= 0.25).
CVec jakes_process(std::size_t n, double rho, RandomSource& rng);

FadingTrajectory fading_process(const ChannelProfile& profile, std::size_t n_samples,
                                double sample_rate, RandomSource& rng);

// r[n] = sum_l h_l[n] tx[n - d_l] + w[n]; output is longer than the input
// by the largest tap delay.
SampleBuffer channel_apply(const SampleBuffer& tx, const ChannelProfile& profile,
                           const FadingTrajectory& trajectory, RandomSource& rng);

// H[k][q] = sum_l h_l(kT) exp(-j 2 pi q d_l / n_fft), with h_l sampled at
// the first sample of symbol k's body (after its prefix).
ComplexGrid effective_channel(const ChannelProfile& profile, const FadingTrajectory& trajectory,
                              const FrameConfig& cfg, std::size_t n_symbols,
                              std::size_t offset = 0);

struct EnergyAccounting {
  bool include_guard = false;
  bool include_pilots = false;
};

double energy_per_bit(const FrameConfig& cfg, EnergyAccounting acc = {});
double noise_variance_for_ebn0(double ebn0_db, const FrameConfig& cfg, EnergyAccounting acc = {});

}  // namespace wimax60
