#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hqn/errors.hpp"

namespace hqn {

// Finite-key security scenario around a conditional collision entropy value.
// h2_bits is treated as already smoothed; delta is the relative estimation
// error, so the estimated entropy is (1 + delta) * h2_bits.
struct QkdScenario {
  double h2_bits = 100.0;
  double delta = -0.1;
  double leak_ec_bits = 30.0;
  double eps_s = 1e-10;
  double eps_pa = 1e-10;

  void validate() const {
    if (!std::isfinite(h2_bits) || h2_bits <= 0.0) throw ParameterError("QkdScenario: h2_bits must be positive");
    if (!std::isfinite(delta) || delta <= -1.0 || delta >= 1.0) throw ParameterError("QkdScenario: delta must lie in (-1,1)");
    if (!std::isfinite(leak_ec_bits) || leak_ec_bits < 0.0) throw ParameterError("QkdScenario: leak_ec_bits must be >= 0");
    if (!(eps_s > 0.0 && eps_s < 1.0)) throw ParameterError("QkdScenario: eps_s must lie in (0,1)");
    if (!(eps_pa > 0.0 && eps_pa < 1.0)) throw ParameterError("QkdScenario: eps_pa must lie in (0,1)");
  }
};

// Eve's optimal success probability p <= 2^{-H2}. Kept in log2 so bounds
// beyond the double underflow threshold are still reported exactly;
// `probability` is 0 with `underflowed` set in that regime.
struct EveBound {
  double log2_probability = 0.0;
  double probability = 1.0;
  bool underflowed = false;
};

inline EveBound eve_success_bound(double h2_bits) {
  if (!std::isfinite(h2_bits) || h2_bits <= 0.0) throw ParameterError("eve_success_bound: h2_bits must be positive");
  const double log2p = -h2_bits;
  const double p = std::exp2(log2p);
  return {log2p, p, p == 0.0};
}

// Ratio of the estimated to the true Eve bound, 2^{-delta * H2}. A 10%
// underestimation at H2 = 100 bits loosens the bound by 2^10.
inline double degradation_ratio(double delta, double h2_bits) {
  if (!std::isfinite(delta)) throw ParameterError("degradation_ratio: delta must be finite");
  if (!std::isfinite(h2_bits) || h2_bits <= 0.0) throw ParameterError("degradation_ratio: h2_bits must be positive");
  return std::exp2(-delta * h2_bits);
}

// Leftover-hash key length l = (1 + delta) H2 - leak_EC - 2 log2(1/(2 eps_PA)),
// returned signed so deviation identities stay exact; callers clamp for
// operational rates. penalty = leak_EC + 2 log2(1/(2 eps_PA)); margin uses
// the true (uninflated) entropy.
struct KeyLengthResult {
  double length_bits = 0.0;
  double penalty_bits = 0.0;
  double margin_bits = 0.0;
};

inline KeyLengthResult key_length(const QkdScenario& s) {
  s.validate();
  const double penalty = s.leak_ec_bits + 2.0 * std::log2(1.0 / (2.0 * s.eps_pa));
  return {(1.0 + s.delta) * s.h2_bits - penalty, penalty, s.h2_bits - penalty};
}

// Key-length error introduced by the entropy error: absolute = delta * H2,
// relative = delta * H2 / (H2 - penalty). A zero margin makes the relative
// form unbounded; that is flagged instead of thrown.
struct KeyLengthDeviation {
  double absolute_bits = 0.0;
  double relative = 0.0;
  bool relative_unbounded = false;
};

inline KeyLengthDeviation key_length_deviation(const QkdScenario& s) {
  s.validate();
  const KeyLengthResult kl = key_length(s);
  const double absolute = s.delta * s.h2_bits;
  if (kl.margin_bits == 0.0) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double rel = absolute > 0.0 ? inf : absolute < 0.0 ? -inf : std::numeric_limits<double>::quiet_NaN();
    return {absolute, rel, true};
  }
  return {absolute, absolute / kl.margin_bits, false};
}

inline std::vector<std::uint64_t> default_block_sizes() {
  // 10^4 .. 10^12, 8 points per decade.
  std::vector<std::uint64_t> out;
  out.reserve(65);
  for (int k = 0; k <= 64; ++k) {
    out.push_back(std::uint64_t(std::llround(std::pow(10.0, 4.0 + double(k) / 8.0))));
  }
  return out;
}

// Per-symbol key-rate curve parameters. entropy_rate_bits and leak_rate are
// bits per symbol; fs_coefficient scales the sqrt(N) finite-size correction.
struct RateCurveParams {
  double entropy_rate_bits = 1.0;
  double delta = -0.1;
  double leak_rate = 0.3;
  double eps_s = 1e-10;
  double eps_pa = 1e-10;
  double fs_coefficient = 4.0;
  std::vector<std::uint64_t> block_sizes = default_block_sizes();

  void validate() const {
    if (!std::isfinite(entropy_rate_bits) || entropy_rate_bits <= 0.0) {
      throw ParameterError("RateCurveParams: entropy_rate_bits must be positive");
    }
    if (!std::isfinite(delta) || delta <= -1.0 || delta >= 1.0) throw ParameterError("RateCurveParams: delta must lie in (-1,1)");
    if (!std::isfinite(leak_rate) || leak_rate < 0.0) throw ParameterError("RateCurveParams: leak_rate must be >= 0");
    if (entropy_rate_bits <= leak_rate) {
      throw ParameterError("RateCurveParams: entropy_rate_bits must exceed leak_rate");
    }
    if (!(eps_s > 0.0 && eps_s < 1.0)) throw ParameterError("RateCurveParams: eps_s must lie in (0,1)");
    if (!(eps_pa > 0.0 && eps_pa < 1.0)) throw ParameterError("RateCurveParams: eps_pa must lie in (0,1)");
    if (!std::isfinite(fs_coefficient) || fs_coefficient <= 0.0) {
      throw ParameterError("RateCurveParams: fs_coefficient must be positive");
    }
    if (block_sizes.empty()) throw ParameterError("RateCurveParams: block_sizes must be non-empty");
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
      if (block_sizes[i] == 0) throw ParameterError("RateCurveParams: block sizes must be positive");
      if (i > 0 && block_sizes[i] <= block_sizes[i - 1]) {
        throw ParameterError("RateCurveParams: block sizes must be strictly increasing");
      }
    }
  }
};

struct RatePoint {
  std::uint64_t block_size = 0;
  double rate_true = 0.0;
  double rate_estimated = 0.0;
};

// l(N, h) = max(0, N (h - leak) - 2 log2(1/(2 eps_PA)) - c sqrt(N) log2(1/eps_s)),
// rate = l / N. rate_true uses h; rate_estimated uses (1 + delta) h. The
// correction terms are identical for both curves, so wherever both rates are
// positive their gap is exactly -delta * h.
inline std::vector<RatePoint> finite_key_rate_curve(const RateCurveParams& p) {
  p.validate();
  const double pa_penalty = 2.0 * std::log2(1.0 / (2.0 * p.eps_pa));
  const double fs_log = std::log2(1.0 / p.eps_s);
  const auto rate = [&](std::uint64_t n, double h) {
    const double nd = double(n);
    const double length = nd * (h - p.leak_rate) - pa_penalty - p.fs_coefficient * std::sqrt(nd) * fs_log;
    return std::max(0.0, length) / nd;
  };
  std::vector<RatePoint> out;
  out.reserve(p.block_sizes.size());
  const double h_est = p.entropy_rate_bits * (1.0 + p.delta);
  for (std::uint64_t n : p.block_sizes) {
    out.push_back({n, rate(n, p.entropy_rate_bits), rate(n, h_est)});
  }
  return out;
}

}  // namespace hqn
