#pragma once

// Reference implementations used only by tests. Each one takes a different
// route from the library code it checks.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// O(N^2) DFT, unnormalized forward.
inline std::vector<cplx> dft(const std::vector<cplx>& x, bool inverse = false) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{};
    for (std::size_t t = 0; t < n; ++t) {
      const double a = sign * 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += x[t] * cplx{std::cos(a), std::sin(a)};
    }
    out[k] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

// y[n] = sum_l h_l x[n - d_l], full length.
inline std::vector<cplx> convolve_taps(const std::vector<cplx>& x, const std::vector<cplx>& gains,
                                       const std::vector<std::size_t>& delays) {
  std::size_t max_d = 0;
  for (auto d : delays) max_d = std::max(max_d, d);
  std::vector<cplx> y(x.size() + max_d);
  for (std::size_t n = 0; n < y.size(); ++n) {
    cplx acc{};
    for (std::size_t l = 0; l < gains.size(); ++l) {
      if (n >= delays[l] && n - delays[l] < x.size()) acc += gains[l] * x[n - delays[l]];
    }
    y[n] = acc;
  }
  return y;
}

// Bessel J0 by its power series, sum_m (-1)^m (x/2)^{2m} / (m!)^2.
inline double bessel_j0(double x) {
  const double q = x * x / 4.0;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 80; ++m) {
    term *= -q / (static_cast<double>(m) * static_cast<double>(m));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && m > 5) break;
  }
  return sum;
}

// Q(x) by composite Simpson integration of the normal density over [x, x+12].
inline double q_function(double x) {
  const int n = 200000;
  const double a = x;
  const double b = x + 12.0;
  const double h = (b - a) / n;
  auto pdf = [](double t) { return std::exp(-t * t / 2.0) / std::sqrt(2.0 * std::numbers::pi); };
  double s = pdf(a) + pdf(b);
  for (int i = 1; i < n; ++i) s += pdf(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Shift register held as an array of stages s[1..degree]; each step emits
// the XOR of the listed stages and shifts it into stage 1.
class StageLfsr {
 public:
  StageLfsr(int degree, std::vector<int> feedback_stages)
      : degree_(degree), fb_(std::move(feedback_stages)), s_(static_cast<std::size_t>(degree) + 1, 1) {}

  int next() {
    int o = 0;
    for (int st : fb_) o ^= s_[static_cast<std::size_t>(st)];
    for (int i = degree_; i > 1; --i) s_[static_cast<std::size_t>(i)] = s_[static_cast<std::size_t>(i) - 1];
    s_[1] = o;
    return o;
  }
  std::vector<int> stages() const { return {s_.begin() + 1, s_.end()}; }

 private:
  int degree_;
  std::vector<int> fb_;
  std::vector<int> s_;
};

// Bitwise CRC-8, generator 0x107, processing one message bit at a time.
inline std::uint8_t crc8_bitwise(const std::vector<std::uint8_t>& data) {
  unsigned c = 0;
  for (auto byte : data) {
    for (int i = 7; i >= 0; --i) {
      const unsigned bit = (byte >> i) & 1U;
      const unsigned top = (c >> 7) & 1U;
      c = (c << 1) & 0xFFU;
      if (top ^ bit) c ^= 0x07U;
    }
  }
  return static_cast<std::uint8_t>(c);
}

// CRC-32 by polynomial long division on the reflected register, one bit at a time.
inline std::uint32_t crc32_bitwise(const std::vector<std::uint8_t>& data) {
  std::uint32_t c = 0xFFFFFFFFU;
  for (auto byte : data) {
    for (int i = 0; i < 8; ++i) {
      const std::uint32_t bit = ((byte >> i) ^ c) & 1U;
      c >>= 1;
      if (bit) c ^= 0xEDB88320U;
    }
  }
  return ~c;
}

}  // namespace oracle
