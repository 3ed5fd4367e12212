#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hqn/errors.hpp"
#include "hqn/numeric.hpp"

namespace hqn {

// Symmetry + positive-definiteness check; returns the Cholesky factorization.
inline Eigen::LLT<Eigen::MatrixXd> cholesky_spd(const Eigen::MatrixXd& m, const std::string& what) {
  if (m.rows() < 1 || m.rows() != m.cols()) throw ParameterError(what + ": matrix must be square and non-empty");
  if (!m.allFinite()) throw ParameterError(what + ": matrix has non-finite entries");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ParameterError(what + ": matrix is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw ParameterError(what + ": matrix is not positive-definite");
  return llt;
}

inline double log_det_from_cholesky(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  double s = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

// Parameters of the hybrid noise mixture: a Poisson-distributed discrete
// component advances the mean along placement_direction in steps of spacing,
// on top of additive Gaussian noise (base_mean, base_cov). The 1-D case with
// direction (1) and spacing 1 recovers means i + base_mean.
struct HybridNoiseSpec {
  double lambda = 1.0;
  Eigen::VectorXd base_mean;
  Eigen::MatrixXd base_cov;
  int dimension = 2;
  Eigen::VectorXd placement_direction;
  double spacing = 1.0;
  double tail_epsilon = 1e-12;

  static HybridNoiseSpec defaults(int dimension = 2) {
    if (dimension < 1) throw ParameterError("HybridNoiseSpec: dimension must be >= 1");
    HybridNoiseSpec s;
    s.dimension = dimension;
    s.base_mean = Eigen::VectorXd::Zero(dimension);
    s.base_cov = Eigen::MatrixXd::Identity(dimension, dimension);
    s.placement_direction = Eigen::VectorXd::Ones(dimension) / std::sqrt(double(dimension));
    return s;
  }

  void validate() const {
    if (!std::isfinite(lambda) || lambda < 0.0) throw ParameterError("HybridNoiseSpec: lambda must be finite and >= 0");
    if (dimension < 1) throw ParameterError("HybridNoiseSpec: dimension must be >= 1");
    if (base_mean.size() != dimension) throw ParameterError("HybridNoiseSpec: base_mean length must equal dimension");
    if (!base_mean.allFinite()) throw ParameterError("HybridNoiseSpec: base_mean has non-finite entries");
    if (base_cov.rows() != dimension || base_cov.cols() != dimension) {
      throw ParameterError("HybridNoiseSpec: base_cov must be dimension x dimension");
    }
    cholesky_spd(base_cov, "HybridNoiseSpec base_cov");
    if (placement_direction.size() != dimension) {
      throw ParameterError("HybridNoiseSpec: placement_direction length must equal dimension");
    }
    if (std::abs(placement_direction.norm() - 1.0) > 1e-12) {
      throw ParameterError("HybridNoiseSpec: placement_direction must be a unit vector");
    }
    if (!std::isfinite(spacing) || spacing <= 0.0) throw ParameterError("HybridNoiseSpec: spacing must be positive");
    if (!(tail_epsilon > 0.0 && tail_epsilon < 1.0)) throw ParameterError("HybridNoiseSpec: tail_epsilon must lie in (0,1)");
  }
};

struct PoissonWeights {
  std::vector<double> weights;  // renormalized, sums to 1
  int r;                        // last retained Poisson index; weights.size() == r + 1
};

// Smallest R with Poisson tail mass 1 - sum_{i<=R} e^{-l} l^i / i! <= tail_epsilon.
// Terms are formed in log space so large lambda cannot overflow l^i / i!.
inline PoissonWeights poisson_weights(double lambda, double tail_epsilon) {
  if (!std::isfinite(lambda) || lambda < 0.0) throw ParameterError("poisson_weights: lambda must be finite and >= 0");
  if (!(tail_epsilon > 0.0 && tail_epsilon < 1.0)) throw ParameterError("poisson_weights: tail_epsilon must lie in (0,1)");
  if (lambda == 0.0) return {{1.0}, 0};

  const double log_lambda = std::log(lambda);
  std::vector<double> weights;
  KahanSum cum;
  for (std::int64_t i = 0;; ++i) {
    const double log_w = -lambda + double(i) * log_lambda - std::lgamma(double(i) + 1.0);
    const double w = std::exp(log_w);
    weights.push_back(w);
    cum.add(w);
    if (1.0 - cum.value() <= tail_epsilon) break;
    // Past the mode the terms decrease monotonically; once they underflow the
    // accumulated mass cannot move further and the FP tail is as small as it gets.
    if (w == 0.0 && double(i) > lambda) break;
    if (i > 100'000'000) throw ParameterError("poisson_weights: truncation did not converge");
  }
  const double total = cum.value();
  for (double& w : weights) w /= total;
  const int r = int(weights.size()) - 1;
  return {std::move(weights), r};
}

// Immutable Gaussian mixture f(z) = sum_i w_i N(z; mu_i, Sigma_i).
// Cholesky factors and log-normalizers are precomputed once; all evaluation
// is done in log space. Safe for concurrent read access.
class MixtureModel {
 public:
  MixtureModel(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
               std::vector<Eigen::MatrixXd> covariances)
      : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)) {
    const std::size_t k = weights_.size();
    if (k == 0) throw ParameterError("MixtureModel: at least one component required");
    if (means_.size() != k || covariances_.size() != k) {
      throw ParameterError("MixtureModel: weights/means/covariances lengths disagree");
    }
    dimension_ = int(means_[0].size());
    if (dimension_ < 1) throw ParameterError("MixtureModel: dimension must be >= 1");

    KahanSum total;
    for (double w : weights_) {
      if (!std::isfinite(w) || w <= 0.0) throw ParameterError("MixtureModel: weights must be positive");
      total.add(w);
    }
    if (std::abs(total.value() - 1.0) > 1e-12) throw ParameterError("MixtureModel: weights must sum to 1 within 1e-12");

    chol_lower_.reserve(k);
    log_det_.reserve(k);
    log_norm_.reserve(k);
    cum_weights_.reserve(k);
    double cum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (means_[i].size() != dimension_ || !means_[i].allFinite()) {
        throw ParameterError("MixtureModel: component mean has wrong length or non-finite entries");
      }
      auto llt = cholesky_spd(covariances_[i], "MixtureModel covariance");
      if (covariances_[i].rows() != dimension_) throw ParameterError("MixtureModel: covariance dimension mismatch");
      const double log_det = log_det_from_cholesky(llt);
      chol_lower_.push_back(llt.matrixL());
      log_det_.push_back(log_det);
      log_norm_.push_back(std::log(weights_[i]) - 0.5 * dimension_ * kLogTwoPi - 0.5 * log_det);
      cum += weights_[i];
      cum_weights_.push_back(cum);
    }
    cum_weights_.back() = 1.0;
  }

  int dimension() const { return dimension_; }
  std::size_t component_count() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& means() const { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const { return covariances_; }
  double log_det_cov(std::size_t i) const { return log_det_[i]; }

  // log f(z) via log-sum-exp over the per-component Gaussian log terms.
  double log_pdf(const Eigen::Ref<const Eigen::VectorXd>& z) const {
    if (z.size() != dimension_) throw ParameterError("log_pdf: point dimension mismatch");
    const std::size_t k = weights_.size();
    thread_local std::vector<double> terms;
    thread_local Eigen::VectorXd y;
    terms.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      y = z - means_[i];
      chol_lower_[i].triangularView<Eigen::Lower>().solveInPlace(y);
      terms[i] = log_norm_[i] - 0.5 * y.squaredNorm();
    }
    return log_sum_exp(terms);
  }

  // Direct-space density; may underflow to 0 where log_pdf stays finite.
  double pdf(const Eigen::Ref<const Eigen::VectorXd>& z) const { return std::exp(log_pdf(z)); }

  // n i.i.d. draws, one per column. The index range is split into fixed
  // chunks, each owning a counter-derived RNG substream, so serial and
  // parallel execution produce bit-identical output for a given seed.
  Eigen::MatrixXd sample(std::int64_t n, std::uint64_t seed, int threads = 1) const {
    if (n < 1) throw ParameterError("sample: n must be >= 1");
    Eigen::MatrixXd out(dimension_, n);
    constexpr std::int64_t kChunk = 8192;
    const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;
    if (threads < 1) threads = 1;
    threads = int(std::min<std::int64_t>(threads, n_chunks));

    auto worker = [&](std::int64_t first_chunk, std::int64_t stride) {
      Eigen::VectorXd g(dimension_);
      for (std::int64_t c = first_chunk; c < n_chunks; c += stride) {
        std::mt19937_64 rng(substream_seed(seed, std::uint64_t(c)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::int64_t begin = c * kChunk;
        const std::int64_t end = std::min(n, begin + kChunk);
        for (std::int64_t idx = begin; idx < end; ++idx) {
          const double u = unif(rng);
          auto it = std::upper_bound(cum_weights_.begin(), cum_weights_.end(), u);
          const auto comp = std::min<std::size_t>(std::size_t(it - cum_weights_.begin()), weights_.size() - 1);
          for (int j = 0; j < dimension_; ++j) g(j) = normal(rng);
          out.col(idx) = means_[comp];
          out.col(idx).noalias() += chol_lower_[comp].triangularView<Eigen::Lower>() * g;
        }
      }
    };

    if (threads == 1) {
      worker(0, 1);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(threads);
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
      for (auto& th : pool) th.join();
    }
    return out;
  }

  // Cov = sum_i w_i (Sigma_i + mu_i mu_i^T) - m m^T with m the mixture mean.
  Eigen::MatrixXd mixture_covariance() const {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(dimension_);
    for (std::size_t i = 0; i < weights_.size(); ++i) m += weights_[i] * means_[i];
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dimension_, dimension_);
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      cov += weights_[i] * (covariances_[i] + means_[i] * means_[i].transpose());
    }
    cov -= m * m.transpose();
    return cov;
  }

 private:
  int dimension_ = 0;
  std::vector<double> weights_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::vector<Eigen::MatrixXd> chol_lower_;
  std::vector<double> log_det_;
  std::vector<double> log_norm_;
  std::vector<double> cum_weights_;
};

// Materialize the mixture: Poisson weights truncated at tail_epsilon and
// renormalized, means mu_i = base_mean + i * spacing * placement_direction,
// shared covariance base_cov.
inline MixtureModel build_model(const HybridNoiseSpec& spec) {
  spec.validate();
  auto pw = poisson_weights(spec.lambda, spec.tail_epsilon);
  const std::size_t k = pw.weights.size();
  std::vector<Eigen::VectorXd> means;
  means.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    means.push_back(spec.base_mean + double(i) * spec.spacing * spec.placement_direction);
  }
  std::vector<Eigen::MatrixXd> covs(k, spec.base_cov);
  return MixtureModel(std::move(pw.weights), std::move(means), std::move(covs));
}

}  // namespace hqn
