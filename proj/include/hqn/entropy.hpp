#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hqn/errors.hpp"
#include "hqn/mixture.hpp"
#include "hqn/numeric.hpp"

namespace hqn {

enum class EntropyMethod {
  closed_form,
  grid_quadrature,
  monte_carlo,
  approximation_paper,
  approximation_exact,
};

inline const char* to_string(EntropyMethod m) {
  switch (m) {
    case EntropyMethod::closed_form: return "closed_form";
    case EntropyMethod::grid_quadrature: return "grid_quadrature";
    case EntropyMethod::monte_carlo: return "monte_carlo";
    case EntropyMethod::approximation_paper: return "approximation_paper";
    case EntropyMethod::approximation_exact: return "approximation_exact";
  }
  return "unknown";
}

// Entropy value in nats. std_error/samples are present exactly when the
// estimate is Monte Carlo.
struct EntropyEstimate {
  double value_nats = 0.0;
  EntropyMethod method = EntropyMethod::closed_form;
  std::optional<double> std_error_nats;
  std::optional<std::int64_t> samples;
};

inline EntropyEstimate exact_estimate(double value_nats, EntropyMethod method) {
  if (method == EntropyMethod::monte_carlo) throw ParameterError("exact_estimate: monte_carlo needs a std error");
  if (!std::isfinite(value_nats)) throw ParameterError("exact_estimate: value is not finite");
  return {value_nats, method, std::nullopt, std::nullopt};
}

inline EntropyEstimate mc_estimate(double value_nats, double std_error_nats, std::int64_t samples) {
  if (!std::isfinite(value_nats)) throw ParameterError("mc_estimate: value is not finite");
  if (!(std_error_nats >= 0.0)) throw ParameterError("mc_estimate: std error must be >= 0");
  return {value_nats, EntropyMethod::monte_carlo, std_error_nats, samples};
}

// H(N) = (d/2) log(2*pi*e) + (1/2) log|Sigma|, exact for a Gaussian.
inline double gaussian_entropy(const Eigen::MatrixXd& cov) {
  auto llt = cholesky_spd(cov, "gaussian_entropy");
  const double d = double(cov.rows());
  return 0.5 * d * (kLogTwoPi + 1.0) + 0.5 * log_det_from_cholesky(llt);
}

// -1/n sum_k log f(z_k) over z_k ~ f, with the CLT standard error.
inline EntropyEstimate differential_entropy_mc(const MixtureModel& model, std::int64_t n, std::uint64_t seed) {
  if (n < 1000) throw ParameterError("differential_entropy_mc: n must be >= 1000");
  const Eigen::MatrixXd zs = model.sample(n, seed);
  // Accumulate around the first draw's value to keep the variance sum well conditioned.
  const double shift = -model.log_pdf(zs.col(0));
  double acc = 0.0;
  double acc_sq = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = -model.log_pdf(zs.col(i)) - shift;
    acc += x;
    acc_sq += x * x;
  }
  const double mean = acc / double(n);
  const double var = std::max(0.0, (acc_sq - double(n) * mean * mean) / double(n - 1));
  return mc_estimate(shift + mean, std::sqrt(var / double(n)), n);
}

inline Eigen::VectorXd model_axis(const MixtureModel& model, int axis, double half_width_sigmas, int points) {
  if (axis < 0 || axis >= model.dimension()) throw ParameterError("model_axis: axis out of range");
  double lo = model.means()[0](axis);
  double hi = lo;
  double sigma = 0.0;
  for (std::size_t i = 0; i < model.component_count(); ++i) {
    lo = std::min(lo, model.means()[i](axis));
    hi = std::max(hi, model.means()[i](axis));
    sigma = std::max(sigma, std::sqrt(model.covariances()[i](axis, axis)));
  }
  return Eigen::VectorXd::LinSpaced(points, lo - half_width_sigmas * sigma, hi + half_width_sigmas * sigma);
}

enum class SurfaceKind { density, diff_integrand, renyi_integrand, collision_integrand };

inline const char* to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::density: return "density";
    case SurfaceKind::diff_integrand: return "diff";
    case SurfaceKind::renyi_integrand: return "renyi";
    case SurfaceKind::collision_integrand: return "collision";
  }
  return "unknown";
}

// Pointwise values over a rectangular (q, p) grid; values(i, j) is taken at
// q = q_axis(j), p = p_axis(i).
struct GridSurface {
  Eigen::VectorXd q_axis;
  Eigen::VectorXd p_axis;
  Eigen::MatrixXd values;
  SurfaceKind kind = SurfaceKind::density;
};

// Pointwise entropic surfaces: density f, differential integrand -f log f
// (defined as 0 where f underflows, matching lim x log x = 0), Renyi
// integrand f^alpha and collision integrand f^2.
inline GridSurface surface(const MixtureModel& model, SurfaceKind kind, Eigen::VectorXd q_axis,
                           Eigen::VectorXd p_axis, double alpha = 2.0) {
  if (model.dimension() != 2) throw UnsupportedDimensionError("surface: model dimension must be 2");
  if (q_axis.size() < 2 || p_axis.size() < 2) throw ParameterError("surface: axes need at least 2 points");
  for (Eigen::Index i = 1; i < q_axis.size(); ++i) {
    if (!(q_axis(i) > q_axis(i - 1))) throw ParameterError("surface: q_axis must be strictly increasing");
  }
  for (Eigen::Index i = 1; i < p_axis.size(); ++i) {
    if (!(p_axis(i) > p_axis(i - 1))) throw ParameterError("surface: p_axis must be strictly increasing");
  }
  if (kind == SurfaceKind::renyi_integrand && !(alpha > 0.0)) {
    throw ParameterError("surface: alpha must be positive");
  }

  Eigen::MatrixXd values(p_axis.size(), q_axis.size());
  Eigen::VectorXd z(2);
  for (Eigen::Index ip = 0; ip < p_axis.size(); ++ip) {
    for (Eigen::Index iq = 0; iq < q_axis.size(); ++iq) {
      z(0) = q_axis(iq);
      z(1) = p_axis(ip);
      const double lp = model.log_pdf(z);
      double v = 0.0;
      switch (kind) {
        case SurfaceKind::density: v = std::exp(lp); break;
        case SurfaceKind::diff_integrand: {
          const double f = std::exp(lp);
          v = f > 0.0 ? -f * lp : 0.0;
          break;
        }
        case SurfaceKind::renyi_integrand: v = std::exp(alpha * lp); break;
        case SurfaceKind::collision_integrand: v = std::exp(2.0 * lp); break;
      }
      values(ip, iq) = v;
    }
  }
  return {std::move(q_axis), std::move(p_axis), std::move(values), kind};
}

// Deterministic trapezoid integration of -f log f over a box reaching
// half_width_sigmas past the extreme component means (d <= 2 only).
inline EntropyEstimate differential_entropy_grid(const MixtureModel& model, double half_width_sigmas,
                                                 int points_per_axis) {
  if (model.dimension() > 2) throw UnsupportedDimensionError("differential_entropy_grid: dimension must be <= 2");
  if (points_per_axis < 64) throw ParameterError("differential_entropy_grid: points_per_axis must be >= 64");
  if (!std::isfinite(half_width_sigmas) || half_width_sigmas <= 0.0) {
    throw ParameterError("differential_entropy_grid: half_width_sigmas must be positive");
  }

  if (model.dimension() == 1) {
    const Eigen::VectorXd axis = model_axis(model, 0, half_width_sigmas, points_per_axis);
    Eigen::VectorXd integrand(axis.size());
    Eigen::VectorXd z(1);
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
      z(0) = axis(i);
      const double lp = model.log_pdf(z);
      const double f = std::exp(lp);
      integrand(i) = f > 0.0 ? -f * lp : 0.0;
    }
    return exact_estimate(trapezoid(axis, integrand), EntropyMethod::grid_quadrature);
  }

  const Eigen::VectorXd q = model_axis(model, 0, half_width_sigmas, points_per_axis);
  const Eigen::VectorXd p = model_axis(model, 1, half_width_sigmas, points_per_axis);
  const GridSurface surf = surface(model, SurfaceKind::diff_integrand, q, p);
  return exact_estimate(trapezoid_2d(surf.q_axis, surf.p_axis, surf.values), EntropyMethod::grid_quadrature);
}

// H_alpha = 1/(1-alpha) log E_f[f^{alpha-1}], estimated from draws of f.
// The sample mean of exp((alpha-1) log f) is formed with the max log term
// factored out; the factor cancels in the delta-method standard error.
inline EntropyEstimate renyi_entropy_mc(const MixtureModel& model, double alpha, std::int64_t n,
                                        std::uint64_t seed) {
  if (!std::isfinite(alpha) || alpha <= 0.0) throw ParameterError("renyi_entropy_mc: alpha must be positive");
  if (alpha == 1.0) throw ParameterError("renyi_entropy_mc: alpha = 1 is the differential entropy; use differential_entropy_mc");
  if (n < 1000) throw ParameterError("renyi_entropy_mc: n must be >= 1000");

  const Eigen::MatrixXd zs = model.sample(n, seed);
  std::vector<double> t(static_cast<std::size_t>(n));
  double t_max = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < n; ++i) {
    t[std::size_t(i)] = (alpha - 1.0) * model.log_pdf(zs.col(i));
    t_max = std::max(t_max, t[std::size_t(i)]);
  }
  double s1 = 0.0;
  double s2 = 0.0;
  for (double ti : t) {
    const double e = std::exp(ti - t_max);
    s1 += e;
    s2 += e * e;
  }
  const double mean_scaled = s1 / double(n);
  const double log_mean = t_max + std::log(mean_scaled);
  const double value = log_mean / (1.0 - alpha);
  const double var_scaled = std::max(0.0, (s2 - double(n) * mean_scaled * mean_scaled) / double(n - 1));
  const double se = std::sqrt(var_scaled / double(n)) / (std::abs(1.0 - alpha) * mean_scaled);
  return mc_estimate(value, se, n);
}

// Exact collision entropy H_2 = -log sum_{i,j} w_i w_j N(mu_i; mu_j, Sigma_i + Sigma_j).
// Every pair term, including i = j (which carries |Sigma_i + Sigma_i|), is
// accumulated in log space.
inline EntropyEstimate collision_entropy_closed(const MixtureModel& model) {
  const auto& w = model.weights();
  const auto& mu = model.means();
  const auto& cov = model.covariances();
  const double d = double(model.dimension());
  const std::size_t k = w.size();

  std::vector<double> terms;
  terms.reserve(k * k);
  Eigen::MatrixXd sum_cov;
  Eigen::VectorXd diff;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      sum_cov = cov[i] + cov[j];
      Eigen::LLT<Eigen::MatrixXd> llt(sum_cov);
      if (llt.info() != Eigen::Success) throw ParameterError("collision_entropy_closed: covariance sum is not SPD");
      diff = mu[i] - mu[j];
      llt.matrixL().solveInPlace(diff);
      terms.push_back(std::log(w[i]) + std::log(w[j]) - 0.5 * d * kLogTwoPi -
                      0.5 * log_det_from_cholesky(llt) - 0.5 * diff.squaredNorm());
    }
  }
  return exact_estimate(-log_sum_exp(terms), EntropyMethod::closed_form);
}

// Well-separated collision entropy, self-overlap terms only, evaluated
// exactly as the source formula prints it:
//   H_2 ~ -log sum_i w_i^2 (2*pi)^{-d/2} |Sigma_i|^{-1/2}.
// Note this uses |Sigma_i| where the i = j term of the exact double sum
// carries |2 Sigma_i|; the discrepancy is intentional and kept under the
// approximation_paper tag. Requires equal component covariances.
inline EntropyEstimate collision_entropy_separated_paper(const MixtureModel& model) {
  const auto& cov = model.covariances();
  for (std::size_t i = 1; i < cov.size(); ++i) {
    if ((cov[i] - cov[0]).cwiseAbs().maxCoeff() > 1e-12) {
      throw ParameterError("collision_entropy_separated_paper: equal component covariances required");
    }
  }
  const double d = double(model.dimension());
  std::vector<double> terms;
  terms.reserve(model.component_count());
  for (std::size_t i = 0; i < model.component_count(); ++i) {
    terms.push_back(2.0 * std::log(model.weights()[i]) - 0.5 * d * kLogTwoPi - 0.5 * model.log_det_cov(i));
  }
  return {-log_sum_exp(terms), EntropyMethod::approximation_paper, std::nullopt, std::nullopt};
}

// -sum_i w_i log w_i, the discrete Shannon entropy of the weights.
inline double weight_entropy(std::span<const double> weights) {
  if (weights.empty()) throw ParameterError("weight_entropy: empty weight vector");
  double h = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w <= 0.0) throw ParameterError("weight_entropy: weights must be positive");
    h -= w * std::log(w);
  }
  return h;
}

// Effective number of components: 1 / sum_i w_i^2.
inline double effective_rank(std::span<const double> weights) {
  if (weights.empty()) throw ParameterError("effective_rank: empty weight vector");
  double s = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w <= 0.0) throw ParameterError("effective_rank: weights must be positive");
    s += w * w;
  }
  return 1.0 / s;
}

// Well-separated differential entropy, sum_i w_i H(N_i) + H(w). Exact
// decomposition of the low-overlap limit; valid for unequal covariances.
inline EntropyEstimate differential_entropy_separated(const MixtureModel& model) {
  const double d = double(model.dimension());
  double h = weight_entropy(model.weights());
  for (std::size_t i = 0; i < model.component_count(); ++i) {
    h += model.weights()[i] * (0.5 * d * (kLogTwoPi + 1.0) + 0.5 * model.log_det_cov(i));
  }
  return {h, EntropyMethod::approximation_exact, std::nullopt, std::nullopt};
}

// One point of the entropy-gap law in bits:
//   exact  = log2(R_eff) + (d/2) log2(e)
//   approx = log2(R_eff)
// relative_error is the literal ratio (exact - approx) / exact. This is the
// stated law, not a measurement of H - H_2 for a concrete model.
struct GapCurvePoint {
  double r_eff = 1.0;
  double exact_gap_bits = 0.0;
  double approx_gap_bits = 0.0;
  double relative_error = 0.0;
};

inline GapCurvePoint gap_law(double r_eff, int d) {
  if (!std::isfinite(r_eff) || r_eff < 1.0) throw ParameterError("gap_law: r_eff must be >= 1");
  if (d < 1) throw ParameterError("gap_law: d must be >= 1");
  const double approx = std::log2(r_eff);
  const double exact = approx + 0.5 * double(d) * kLog2E;
  return {r_eff, exact, approx, (exact - approx) / exact};
}

// Measured gap H - H_2 in nats for a concrete model: Monte Carlo
// differential entropy minus the closed-form collision entropy.
inline double entropy_gap_empirical(const MixtureModel& model, std::int64_t n, std::uint64_t seed) {
  return differential_entropy_mc(model, n, seed).value_nats - collision_entropy_closed(model).value_nats;
}

}  // namespace hqn
