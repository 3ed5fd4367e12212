#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hqn/errors.hpp"

namespace hqn {

inline constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)
inline constexpr double kLog2E = 1.4426950408889634074;     // log2(e)

// log(sum_i exp(a_i)) with the maximum factored out, so a sum of terms far
// below the exp underflow threshold still returns a finite log value.
inline double log_sum_exp(std::span<const double> terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

// Kahan-Neumaier compensated accumulator.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Composite trapezoid weights for a strictly increasing (not necessarily
// uniform) axis: w_0 = (x_1-x_0)/2, w_i = (x_{i+1}-x_{i-1})/2, symmetric end.
inline Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& axis) {
  const Eigen::Index n = axis.size();
  if (n < 2) throw ParameterError("trapezoid_weights: axis needs at least 2 points");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(axis(i) > axis(i - 1))) throw ParameterError("trapezoid_weights: axis must be strictly increasing");
  }
  Eigen::VectorXd w(n);
  w(0) = 0.5 * (axis(1) - axis(0));
  w(n - 1) = 0.5 * (axis(n - 1) - axis(n - 2));
  for (Eigen::Index i = 1; i + 1 < n; ++i) w(i) = 0.5 * (axis(i + 1) - axis(i - 1));
  return w;
}

inline double trapezoid(const Eigen::VectorXd& axis, const Eigen::VectorXd& values) {
  if (axis.size() != values.size()) throw ParameterError("trapezoid: axis/value size mismatch");
  return trapezoid_weights(axis).dot(values);
}

// values(i, j) sampled at (p_axis(i), q_axis(j)).
inline double trapezoid_2d(const Eigen::VectorXd& q_axis, const Eigen::VectorXd& p_axis,
                           const Eigen::MatrixXd& values) {
  if (values.rows() != p_axis.size() || values.cols() != q_axis.size()) {
    throw ParameterError("trapezoid_2d: value matrix does not match axes");
  }
  return trapezoid_weights(p_axis).transpose() * values * trapezoid_weights(q_axis);
}

// Geometric grid 10^{e_lo}, ..., 10^{e_hi} with points_per_decade steps per decade.
inline std::vector<double> geometric_grid(double exp10_lo, double exp10_hi, int points_per_decade) {
  if (!(exp10_hi > exp10_lo)) throw ParameterError("geometric_grid: empty exponent range");
  if (points_per_decade < 1) throw ParameterError("geometric_grid: points_per_decade must be >= 1");
  const int steps = int(std::ceil((exp10_hi - exp10_lo) * points_per_decade - 1e-9));
  std::vector<double> out;
  out.reserve(std::size_t(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    const double e = std::min(exp10_lo + double(k) / points_per_decade, exp10_hi);
    out.push_back(std::pow(10.0, e));
  }
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed of the RNG substream owning one sampling chunk. Depends only on
// (seed, chunk), never on which thread executes the chunk.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t chunk) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull + chunk * 0x9E3779B97F4A7C15ull);
  splitmix64(s);
  return splitmix64(s);
}

}  // namespace hqn
