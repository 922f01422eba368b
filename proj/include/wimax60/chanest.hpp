#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wimax60/grid.hpp"
#include "wimax60/ofdm.hpp"

namespace wimax60 {

enum class EstimatorMethod { genie, ls_linear, ls_hold };

std::string to_string(EstimatorMethod m);
EstimatorMethod parse_estimator(const std::string& name);

struct ChannelEstimate {
  ComplexGrid h_hat;  // [k][q], FFT bin order
  EstimatorMethod method = EstimatorMethod::genie;
  // Per symbol: mean |s - h_hat * pilot|^2 over the pilot bins.
  std::vector<double> pilot_mse;
};

// |H_hat| below this marks the bin as an erasure instead of dividing.
inline constexpr double kConditioningFloor = 1e-6;

// Least squares at the pilots, then per symbol across frequency: linear
// interpolation between neighbouring pilots (ls_linear) or the nearest pilot
// (ls_hold). Bins outside the outermost pilots take that pilot's value.
ChannelEstimate estimate_ls(const DemodOutput& demod, const FrameConfig& cfg,
                            EstimatorMethod method = EstimatorMethod::ls_linear);

// Ground truth passed through unchanged.
ChannelEstimate estimate_genie(const DemodOutput& demod, const ComplexGrid& truth,
                               const FrameConfig& cfg);

struct EqualizedSymbols {
  CVec symbols;                      // data bins, pack order, symbol after symbol
  std::vector<std::uint8_t> erased;  // 1 where |H_hat| fell below the floor
  std::size_t erasures = 0;
};

// Zero-forcing: s / H_hat on the data subcarriers. Erased bins emit 0, which
// the QPSK demapper decides as bits (0, 0).
EqualizedSymbols equalize(const DemodOutput& demod, const ChannelEstimate& est,
                          const FrameConfig& cfg);

// Rows "k,q,re_H,im_H".
void write_estimate_csv(std::ostream& out, const ComplexGrid& h);

}  // namespace wimax60
