#include "wimax60/chanest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wimax60/error.hpp"

namespace wimax60 {

std::string to_string(EstimatorMethod m) {
  switch (m) {
    case EstimatorMethod::genie:
      return "genie";
    case EstimatorMethod::ls_linear:
      return "ls-linear";
    case EstimatorMethod::ls_hold:
      return "ls-hold";
  }
  return "unknown";
}

EstimatorMethod parse_estimator(const std::string& name) {
  if (name == "genie") return EstimatorMethod::genie;
  if (name == "ls-linear" || name == "ls") return EstimatorMethod::ls_linear;
  if (name == "ls-hold") return EstimatorMethod::ls_hold;
  throw ConfigError("unknown estimator '" + name + "' (genie, ls-linear, ls-hold)");
}

namespace {

std::vector<double> pilot_residuals(const DemodOutput& demod, const ComplexGrid& h,
                                    const FrameConfig& cfg) {
  std::vector<double> mse(demod.s.rows(), 0.0);
  if (cfg.n_pilots() == 0) return mse;
  for (std::size_t k = 0; k < demod.s.rows(); ++k) {
    const double pv = cfg.pilot_value(k);
    double acc = 0.0;
    for (int p : cfg.pilot_indices()) {
      const std::size_t q = cfg.bin(p);
      acc += std::norm(demod.s(k, q) - h(k, q) * pv);
    }
    mse[k] = acc / static_cast<double>(cfg.n_pilots());
  }
  return mse;
}

}  // namespace

ChannelEstimate estimate_ls(const DemodOutput& demod, const FrameConfig& cfg, EstimatorMethod method) {
  if (method == EstimatorMethod::genie) {
    throw ConfigError("genie estimation needs the ground-truth response");
  }
  if (demod.s.cols() != cfg.n_fft()) throw GeometryError("demodulator grid width differs from n_fft");
  const auto& pilots = cfg.pilot_indices();  // sorted ascending
  if (pilots.empty()) throw GeometryError("least-squares estimation needs pilots");

  ChannelEstimate est;
  est.method = method;
  est.h_hat = ComplexGrid(demod.s.rows(), demod.s.cols());
  const int half = static_cast<int>(cfg.n_fft() / 2);
  std::vector<cplx> at_pilot(pilots.size());

  for (std::size_t k = 0; k < demod.s.rows(); ++k) {
    const double pv = cfg.pilot_value(k);
    if (pv == 0.0) throw GeometryError("pilot value of zero");
    for (std::size_t i = 0; i < pilots.size(); ++i) at_pilot[i] = demod.s(k, cfg.bin(pilots[i])) / pv;

    std::size_t seg = 0;  // first pilot with index >= logical
    for (int logical = -half; logical < half; ++logical) {
      while (seg < pilots.size() && pilots[seg] < logical) ++seg;
      cplx v;
      if (seg == 0) {
        v = at_pilot.front();
      } else if (seg == pilots.size()) {
        v = at_pilot.back();
      } else if (pilots[seg] == logical) {
        v = at_pilot[seg];
      } else {
        const int lo = pilots[seg - 1];
        const int hi = pilots[seg];
        if (method == EstimatorMethod::ls_linear) {
          const double a = static_cast<double>(logical - lo) / static_cast<double>(hi - lo);
          v = at_pilot[seg - 1] * (1.0 - a) + at_pilot[seg] * a;
        } else {
          // Ties go to the lower pilot.
          v = (logical - lo <= hi - logical) ? at_pilot[seg - 1] : at_pilot[seg];
        }
      }
      est.h_hat(k, cfg.bin(logical)) = v;
    }
  }
  est.pilot_mse = pilot_residuals(demod, est.h_hat, cfg);
  return est;
}

ChannelEstimate estimate_genie(const DemodOutput& demod, const ComplexGrid& truth,
                               const FrameConfig& cfg) {
  if (!truth.same_shape(demod.s)) throw GeometryError("ground-truth grid shape differs from demodulator grid");
  ChannelEstimate est;
  est.method = EstimatorMethod::genie;
  est.h_hat = truth;
  est.pilot_mse = pilot_residuals(demod, truth, cfg);
  return est;
}

EqualizedSymbols equalize(const DemodOutput& demod, const ChannelEstimate& est, const FrameConfig& cfg) {
  if (!est.h_hat.same_shape(demod.s)) throw GeometryError("estimate grid shape differs from demodulator grid");
  EqualizedSymbols out;
  const std::size_t total = demod.s.rows() * cfg.n_data();
  out.symbols.reserve(total);
  out.erased.reserve(total);
  for (std::size_t k = 0; k < demod.s.rows(); ++k) {
    for (int d : cfg.data_indices()) {
      const std::size_t q = cfg.bin(d);
      const cplx h = est.h_hat(k, q);
      if (!(std::abs(h) >= kConditioningFloor)) {
        out.symbols.emplace_back(0.0, 0.0);
        out.erased.push_back(1);
        ++out.erasures;
      } else {
        out.symbols.push_back(demod.s(k, q) / h);
        out.erased.push_back(0);
      }
    }
  }
  return out;
}

void write_estimate_csv(std::ostream& out, const ComplexGrid& h) {
  const auto old_precision = out.precision(12);
  out << "k,q,re_H,im_H\n";
  for (std::size_t k = 0; k < h.rows(); ++k) {
    for (std::size_t q = 0; q < h.cols(); ++q) {
      out << k << ',' << q << ',' << h(k, q).real() << ',' << h(k, q).imag() << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace wimax60
