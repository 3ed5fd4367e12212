// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. argv[1] is the CLI binary path (needed by the determinism check).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hqn/hqn.hpp"
#include "support.hpp"

using namespace hqn;

namespace {

int g_failures = 0;

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      detail = msg;
    }
  }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int idx, const std::string& name, const Check& c, double elapsed, double budget) {
  const bool ok = c.ok && elapsed < budget;
  std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", idx, name.c_str(), elapsed,
              c.ok ? "" : (" — " + c.detail).c_str(),
              (c.ok && elapsed >= budget) ? " — exceeded runtime budget" : "");
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

constexpr double kH1 = 1.4189385332046727;       // (1/2) ln(2 pi e)
constexpr double kH2Gauss = 1.2655121234846454;  // (1/2) ln(4 pi)

MixtureModel model_1d(double lambda, double sigma2 = 1.0, double spacing = 1.0) {
  HybridNoiseSpec s = HybridNoiseSpec::defaults(1);
  s.lambda = lambda;
  s.base_cov(0, 0) = sigma2;
  s.spacing = spacing;
  return build_model(s);
}

// 1. Gaussian identities for differential and collision entropy.
void criterion1() {
  Timer timer;
  Check c;
  c.require(std::abs(gaussian_entropy(Eigen::MatrixXd::Identity(1, 1)) - kH1) < 1e-12,
            "closed-form gaussian entropy off");

  const MixtureModel g1 = model_1d(0.0);
  const double grid1 = differential_entropy_grid(g1, 8.0, 4096).value_nats;
  c.require(std::abs(grid1 - kH1) < 1e-6, "1-d grid entropy off: " + fmt(grid1));

  HybridNoiseSpec s2 = HybridNoiseSpec::defaults(2);
  s2.lambda = 0.0;
  const MixtureModel g2 = build_model(s2);
  const double grid2 = differential_entropy_grid(g2, 8.0, 512).value_nats;
  c.require(std::abs(grid2 - 2.0 * kH1) < 1e-6, "2-d grid entropy off: " + fmt(grid2));

  const auto mc = differential_entropy_mc(g1, 1'000'000, 42);
  c.require(std::abs(mc.value_nats - kH1) <= 3.0 * mc.std_error_nats.value(),
            "MC entropy outside 3 standard errors: " + fmt(mc.value_nats));

  const double h2_closed_1 = collision_entropy_closed(g1).value_nats;
  const double h2_closed_2 = collision_entropy_closed(g2).value_nats;
  c.require(std::abs(h2_closed_1 - kH2Gauss) < 1e-6, "1-d collision entropy off");
  c.require(std::abs(h2_closed_2 - 2.0 * kH2Gauss) < 1e-6, "2-d collision entropy off");

  const auto om = support::OracleMixture::from(g1.weights(), g1.means(), g1.covariances());
  const double h2_quad = -std::log(support::collision_integral(om));
  c.require(std::abs(h2_closed_1 - h2_quad) < 1e-6,
            "collision entropy vs quadrature: " + fmt(h2_closed_1 - h2_quad));
  report(1, "gaussian entropy identities", c, timer.seconds(), 5.0);
}

// 2. Closed-form collision entropy vs the quadrature oracle on 20 seeded
// random models.
void criterion2() {
  Timer timer;
  Check c;
  std::mt19937_64 rng(20250810);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 2;
    const auto om = support::random_mixture(rng, d);
    const MixtureModel m = support::to_model(om);
    const double closed = collision_entropy_closed(m).value_nats;
    const double oracle = -std::log(support::collision_integral(om));
    c.require(std::abs(closed - oracle) < 1e-5,
              "trial " + std::to_string(trial) + ": |closed - oracle| = " + fmt(std::abs(closed - oracle)));
  }
  report(2, "closed-form collision entropy vs quadrature oracle (20 random models)", c,
         timer.seconds(), 30.0);
}

// 3. Finite-key arithmetic: degradation factor, key-length deviation and the
// mutual-consistency identity of the bound formulas.
void criterion3() {
  Timer timer;
  Check c;
  c.require(degradation_ratio(-0.1, 100.0) == 1024.0, "degradation ratio not exactly 1024");

  QkdScenario s;
  s.h2_bits = 100.0;
  s.delta = -0.1;
  s.leak_ec_bits = 30.0;
  s.eps_pa = 1e-10;
  const auto dev = key_length_deviation(s);
  c.require(dev.absolute_bits == -10.0, "key-length deviation not exactly -10");
  QkdScenario truth = s;
  truth.delta = 0.0;
  c.require(std::abs((key_length(s).length_bits - key_length(truth).length_bits) - dev.absolute_bits) <
                1e-12,
            "deviation identity broken");

  // estimated bound = degradation * true bound (2^{-(1+d)h} = 2^{-dh} 2^{-h})
  const double deltas[] = {-0.5, -0.25, -0.1, -0.01, 0.0, 0.01, 0.1, 0.25, 0.5};
  const double h2s[] = {1.0, 10.0, 50.0, 100.0, 200.0, 500.0};
  for (double delta : deltas) {
    for (double h2 : h2s) {
      const double est = delta == 0.0 ? eve_success_bound(h2).probability
                                      : eve_success_bound(h2 * (1.0 + delta)).probability;
      const double composed = degradation_ratio(delta, h2) * eve_success_bound(h2).probability;
      c.require(std::abs(composed - est) <= 1e-12 * est,
                "bound consistency at delta=" + fmt(delta) + " h2=" + fmt(h2));
    }
  }
  report(3, "finite-key arithmetic identities", c, timer.seconds(), 1.0);
}

// 4. Gap-law curve structure for d = 2.
void criterion4() {
  Timer timer;
  Check c;
  const std::vector<double> grid = geometric_grid(0.0, 6.0, 50);
  double prev = 2.0;
  double first_below = -1.0;
  for (double r : grid) {
    const GapCurvePoint gp = gap_law(r, 2);
    const double expected_rel = kLog2E / (std::log2(r) + kLog2E);
    c.require(std::abs(gp.relative_error - expected_rel) < 1e-12, "relative error formula at r=" + fmt(r));
    c.require(gp.relative_error < prev, "relative error not strictly decreasing at r=" + fmt(r));
    prev = gp.relative_error;
    if (first_below < 0.0 && gp.relative_error <= 0.10) first_below = r;
  }
  c.require(first_below > 0.0, "no grid point below the 10% threshold");
  const double crossing = std::exp(9.0);  // solves (d/2)log2e / (log2 r + (d/2)log2e) = 0.1 at d=2
  c.require(std::abs(std::log10(first_below) - std::log10(crossing)) <= 1.0 / 50.0 + 1e-12,
            "threshold crossing at r=" + fmt(first_below) + ", expected near " + fmt(crossing));
  report(4, "entropy-gap law curve (d=2, 10% crossing)", c, timer.seconds(), 1.0);
}

// 5. Well-separated limit of the differential entropy.
void criterion5() {
  Timer timer;
  Check c;
  const MixtureModel m = model_1d(1.0, 1.0, 20.0);
  const auto mc = differential_entropy_mc(m, 1'000'000, 42);
  const auto sep = differential_entropy_separated(m);
  const double gap = std::abs(mc.value_nats - sep.value_nats);
  c.require(gap <= 0.01, "|MC - decomposition| = " + fmt(gap));
  report(5, "well-separated differential entropy limit", c, timer.seconds(), 10.0);
}

// 6. Renyi ordering across orders 0.5, 1, 2, 3 and continuity at alpha -> 1.
void criterion6() {
  Timer timer;
  Check c;
  std::vector<MixtureModel> models;
  models.push_back(model_1d(1.0));
  {
    HybridNoiseSpec s = HybridNoiseSpec::defaults(2);
    s.lambda = 2.0;
    models.push_back(build_model(s));
  }
  models.push_back(model_1d(0.5, 0.49, 2.0));

  const std::int64_t n = 1'000'000;
  const auto comb = [](const EntropyEstimate& a, const EntropyEstimate& b) {
    const double sa = a.std_error_nats.value_or(0.0);
    const double sb = b.std_error_nats.value_or(0.0);
    return std::sqrt(sa * sa + sb * sb);
  };
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& m = models[i];
    const auto h_half = renyi_entropy_mc(m, 0.5, n, 42);
    const auto h_one = differential_entropy_mc(m, n, 42);
    const auto h_two = collision_entropy_closed(m);
    const auto h_three = renyi_entropy_mc(m, 3.0, n, 42);
    const std::string tag = "model " + std::to_string(i);
    c.require(h_half.value_nats + 3.0 * comb(h_half, h_one) >= h_one.value_nats, tag + ": H_0.5 < H");
    c.require(h_one.value_nats + 3.0 * comb(h_one, h_two) >= h_two.value_nats, tag + ": H < H_2");
    c.require(h_two.value_nats + 3.0 * comb(h_two, h_three) >= h_three.value_nats, tag + ": H_2 < H_3");
    const auto h_near_one = renyi_entropy_mc(m, 1.01, n, 42);
    c.require(std::abs(h_near_one.value_nats - h_one.value_nats) <= 0.05,
              tag + ": |H_1.01 - H| = " + fmt(std::abs(h_near_one.value_nats - h_one.value_nats)));
  }
  report(6, "Renyi ordering and alpha->1 continuity (3 models)", c, timer.seconds(), 60.0);
}

// 7. Key-rate curve structure with default parameters.
void criterion7() {
  Timer timer;
  Check c;
  RateCurveParams params;
  const auto curve = finite_key_rate_curve(params);
  const double asymptote = params.entropy_rate_bits - params.leak_rate;
  c.require(curve.front().rate_true == 0.0, "rate at the smallest block is not 0");
  c.require(curve.back().block_size == 1'000'000'000'000ull, "sweep does not end at 1e12");
  bool positive_seen = false;
  double prev = 0.0;
  for (const auto& pt : curve) {
    if (pt.rate_true > 0.0) positive_seen = true;
    c.require(pt.rate_true >= prev - 1e-15, "rate decreases at N=" + std::to_string(pt.block_size));
    c.require(pt.rate_true <= asymptote + 1e-15, "rate exceeds the asymptote");
    if (pt.rate_true > 0.0 && pt.rate_estimated > 0.0) {
      const double gap = pt.rate_true - pt.rate_estimated;
      c.require(std::abs(gap - 0.1 * params.entropy_rate_bits) < 1e-12,
                "gap at N=" + std::to_string(pt.block_size) + " is " + fmt(gap));
    }
    prev = pt.rate_true;
  }
  c.require(positive_seen, "rate never becomes positive");
  c.require(std::abs(curve.back().rate_true - asymptote) < 1e-3,
            "asymptote miss: " + fmt(curve.back().rate_true));
  report(7, "finite-key rate curve structure", c, timer.seconds(), 1.0);
}

// 8. Property suite on randomized models: scaling, translation, max-entropy
// bound, weight-entropy vs effective rank, surface-integral consistency.
void criterion8() {
  Timer timer;
  Check c;
  std::mt19937_64 rng(314159);

  for (int trial = 0; trial < 4; ++trial) {
    const int d = 1 + trial % 2;
    const MixtureModel m = support::to_model(support::random_mixture(rng, d, 4));
    const int pts = d == 1 ? 4096 : 384;

    const double s = trial % 2 == 0 ? 2.3 : 0.5;
    std::vector<Eigen::VectorXd> mu_s;
    std::vector<Eigen::MatrixXd> cov_s;
    for (std::size_t i = 0; i < m.component_count(); ++i) {
      mu_s.push_back(s * m.means()[i]);
      cov_s.push_back(s * s * m.covariances()[i]);
    }
    const MixtureModel ms(m.weights(), mu_s, cov_s);
    const double shift = double(d) * std::log(s);
    c.require(std::abs(collision_entropy_closed(ms).value_nats - collision_entropy_closed(m).value_nats -
                       shift) < 1e-12,
              "collision scaling law");
    c.require(std::abs(differential_entropy_grid(ms, 8.0, pts).value_nats -
                       differential_entropy_grid(m, 8.0, pts).value_nats - shift) < 1e-5,
              "differential scaling law");

    Eigen::VectorXd t = Eigen::VectorXd::Constant(d, -2.75);
    std::vector<Eigen::VectorXd> mu_t;
    for (std::size_t i = 0; i < m.component_count(); ++i) mu_t.push_back(m.means()[i] + t);
    const MixtureModel mt(m.weights(), mu_t, m.covariances());
    c.require(std::abs(collision_entropy_closed(mt).value_nats -
                       collision_entropy_closed(m).value_nats) < 1e-12,
              "collision translation invariance");
    c.require(std::abs(differential_entropy_grid(mt, 8.0, pts).value_nats -
                       differential_entropy_grid(m, 8.0, pts).value_nats) < 1e-8,
              "differential translation invariance");
  }

  for (int trial = 0; trial < 8; ++trial) {
    const int d = 1 + trial % 2;
    const MixtureModel m = support::to_model(support::random_mixture(rng, d));
    const double h = differential_entropy_grid(m, 8.0, d == 1 ? 4096 : 384).value_nats;
    c.require(h <= gaussian_entropy(m.mixture_covariance()) + 1e-9, "max-entropy bound violated");
    c.require(weight_entropy(m.weights()) >= std::log(effective_rank(m.weights())) - 1e-12,
              "weight entropy below log effective rank");
  }

  for (int trial = 0; trial < 2; ++trial) {
    const MixtureModel m = support::to_model(support::random_mixture(rng, 2, 4));
    const Eigen::VectorXd q = model_axis(m, 0, 8.0, 384);
    const Eigen::VectorXd p = model_axis(m, 1, 8.0, 384);
    const GridSurface diff = surface(m, SurfaceKind::diff_integrand, q, p);
    c.require(std::abs(trapezoid_2d(diff.q_axis, diff.p_axis, diff.values) -
                       differential_entropy_grid(m, 8.0, 384).value_nats) < 1e-9,
              "surface/grid integral mismatch");
    const GridSurface coll = surface(m, SurfaceKind::collision_integrand, q, p);
    const double integral = trapezoid_2d(coll.q_axis, coll.p_axis, coll.values);
    const double expected = std::exp(-collision_entropy_closed(m).value_nats);
    c.require(std::abs(integral - expected) <= 1e-6 * expected, "collision surface integral mismatch");
  }
  report(8, "randomized property suite (scaling, translation, bounds, surfaces)", c, timer.seconds(),
         60.0);
}

// 9. Byte-identical CLI output under fixed seeds.
void criterion9(const std::string& cli) {
  Timer timer;
  Check c;
  if (cli.empty()) {
    c.require(false, "CLI binary path not supplied (argv[1])");
    report(9, "CLI determinism", c, timer.seconds(), 120.0);
    return;
  }
  const std::string dir = support::temp_dir("hqn_acceptance");
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"surface", "surface --grid 201 --seed 42"},
      {"entropies", "entropies --samples 100000 --seed 42"},
      {"gap-curve", "gap-curve --seed 42"},
      {"qkd-impact", "qkd-impact --seed 42"},
      {"qkd-rate", "qkd-rate --seed 42"},
  };
  for (const auto& [name, args] : runs) {
    const std::string out1 = dir + "/" + name + "_1.csv";
    const std::string out2 = dir + "/" + name + "_2.csv";
    for (const std::string& out : {out1, out2}) {
      const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + out + "\" 2>/dev/null";
      const int rc = std::system(cmd.c_str());
      c.require(rc == 0, name + ": exit code " + std::to_string(rc));
      if (rc != 0) break;
    }
    if (!c.ok) break;
    c.require(support::read_file(out1) == support::read_file(out2), name + ": output differs across runs");
  }
  report(9, "CLI determinism (byte-identical reruns)", c, timer.seconds(), 120.0);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9(cli);
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance suite aborted: %s\n", e.what());
    return 1;
  }
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
