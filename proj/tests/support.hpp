#pragma once

// Shared helpers for the test suites: an independently coded mixture density
// (plain inverses and determinants, no log-space path), quadrature oracles,
// seeded random model generation and small CSV/file utilities.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hqn/mixture.hpp"

namespace support {

struct OracleMixture {
  std::vector<double> w;
  std::vector<Eigen::VectorXd> mu;
  std::vector<Eigen::MatrixXd> cov;
  std::vector<Eigen::MatrixXd> cov_inv;
  std::vector<double> norm;  // (2 pi)^{-d/2} |Sigma|^{-1/2}

  static OracleMixture from(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                            std::vector<Eigen::MatrixXd> covs) {
    OracleMixture m;
    m.w = std::move(weights);
    m.mu = std::move(means);
    m.cov = std::move(covs);
    const double d = double(m.mu.at(0).size());
    for (const auto& c : m.cov) {
      m.cov_inv.push_back(c.inverse());
      m.norm.push_back(std::pow(2.0 * M_PI, -0.5 * d) / std::sqrt(c.determinant()));
    }
    return m;
  }

  double pdf(const Eigen::VectorXd& z) const {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const Eigen::VectorXd diff = z - mu[i];
      s += w[i] * norm[i] * std::exp(-0.5 * diff.dot(cov_inv[i] * diff));
    }
    return s;
  }

  // Per-axis integration bounds: extreme means +/- width * largest axis sigma.
  std::pair<double, double> bounds(int axis, double width) const {
    double lo = mu[0](axis);
    double hi = lo;
    double sigma = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      lo = std::min(lo, mu[i](axis));
      hi = std::max(hi, mu[i](axis));
      sigma = std::max(sigma, std::sqrt(cov[i](axis, axis)));
    }
    return {lo - width * sigma, hi + width * sigma};
  }
};

inline hqn::MixtureModel to_model(const OracleMixture& m) { return hqn::MixtureModel(m.w, m.mu, m.cov); }

// Random mixture with 1..max_k components, means in (-4,4)^d and SPD
// covariances A A^T + 0.3 I.
inline OracleMixture random_mixture(std::mt19937_64& rng, int d, int max_k = 6) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int k = 1 + int(rng() % std::uint64_t(max_k));
  std::vector<double> w(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& x : w) {
    x = 0.1 + unit(rng);
    total += x;
  }
  for (double& x : w) x /= total;

  std::vector<Eigen::VectorXd> mu;
  std::vector<Eigen::MatrixXd> cov;
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd m(d);
    for (int j = 0; j < d; ++j) m(j) = -4.0 + 8.0 * unit(rng);
    mu.push_back(m);
    Eigen::MatrixXd a(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) a(r, c) = -1.0 + 2.0 * unit(rng);
    }
    Eigen::MatrixXd s = a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(d, d);
    cov.push_back(0.5 * (s + s.transpose()));
  }
  return OracleMixture::from(std::move(w), std::move(mu), std::move(cov));
}

// Plain composite trapezoid of a callable on a uniform grid.
template <class F>
double trapz1(F&& f, double lo, double hi, int n) {
  const double h = (hi - lo) / double(n - 1);
  double s = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i + 1 < n; ++i) s += f(lo + double(i) * h);
  return s * h;
}

template <class F>
double trapz2(F&& f, double lo0, double hi0, double lo1, double hi1, int n) {
  const double h0 = (hi0 - lo0) / double(n - 1);
  const double h1 = (hi1 - lo1) / double(n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo0 + double(i) * h0;
    const double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    for (int j = 0; j < n; ++j) {
      const double y = lo1 + double(j) * h1;
      const double wy = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      s += wx * wy * f(x, y);
    }
  }
  return s * h0 * h1;
}

// integral of f^2 over the mixture support, oracle path.
inline double collision_integral(const OracleMixture& m, double width = 9.0) {
  const int d = int(m.mu[0].size());
  if (d == 1) {
    const auto [lo, hi] = m.bounds(0, width);
    Eigen::VectorXd z(1);
    return trapz1(
        [&](double x) {
          z(0) = x;
          const double f = m.pdf(z);
          return f * f;
        },
        lo, hi, 20001);
  }
  const auto [lo0, hi0] = m.bounds(0, width);
  const auto [lo1, hi1] = m.bounds(1, width);
  Eigen::VectorXd z(2);
  return trapz2(
      [&](double x, double y) {
        z(0) = x;
        z(1) = y;
        const double f = m.pdf(z);
        return f * f;
      },
      lo0, hi0, lo1, hi1, 1201);
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv '" + path + "'");
  Csv csv;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    if (line.empty()) continue;
    if (first) {
      csv.header = fields;
      first = false;
    } else {
      csv.rows.push_back(fields);
    }
  }
  return csv;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace support
