#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hqn/entropy.hpp"
#include "hqn/errors.hpp"
#include "hqn/mixture.hpp"
#include "hqn/model_file.hpp"
#include "hqn/qkd.hpp"

namespace hqn {

enum class Subcommand { surface, entropies, gap_curve, qkd_impact, qkd_rate };

// One CLI invocation. Flags fill the dedicated fields; --set key=value pairs
// land in `overrides` and are applied last (last write wins).
struct RunConfig {
  Subcommand subcommand = Subcommand::entropies;
  std::string model_file;  // empty -> built-in default model
  std::string output_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 42;
  std::string kind = "density";
  std::vector<double> alphas = {2.0};
  std::int64_t samples = 1'000'000;
  int grid_points = 512;
  double half_width_sigmas = 8.0;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_short(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
  if (path.empty()) throw ParameterError("output path is required");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParameterError("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw ParameterError("failed writing output file '" + path + "'");
}

// Split --set pairs into model-file keys and subcommand parameters. Keys
// outside both sets are a hard config error.
struct Overrides {
  KeyValueList model;
  std::map<std::string, std::string> params;
};

inline Overrides collect_overrides(const RunConfig& cfg, bool model_keys_allowed,
                                   const std::set<std::string>& param_keys, std::ostream& diag) {
  Overrides out;
  for (const std::string& raw : cfg.overrides) {
    auto [key, value] = split_key_value(raw);
    if (model_keys_allowed && model_file_keys().count(key) != 0) {
      out.model.push_back({key, value});
    } else if (param_keys.count(key) != 0) {
      out.params[key] = value;
    } else {
      throw ParameterError("unknown --set key '" + key + "' for this subcommand");
    }
    diag << "override: " << key << "=" << value << "\n";
  }
  return out;
}

inline double param_or(const std::map<std::string, std::string>& params, const std::string& key,
                       double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_double(it->second, key);
}

inline long long param_or(const std::map<std::string, std::string>& params, const std::string& key,
                          long long fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_int(it->second, key);
}

inline SurfaceKind parse_kind(const std::string& kind) {
  if (kind == "density") return SurfaceKind::density;
  if (kind == "diff") return SurfaceKind::diff_integrand;
  if (kind == "renyi") return SurfaceKind::renyi_integrand;
  if (kind == "collision") return SurfaceKind::collision_integrand;
  throw ParameterError("unknown surface kind '" + kind + "' (expected density|diff|renyi|collision)");
}

}  // namespace detail

// CSV with columns q,p,value for one pointwise surface, row-major over the
// grid (p outer, q inner). The single header row carries kind, alpha and the
// grid parameters after the `value` column name.
inline void run_surface(const RunConfig& cfg, std::ostream& diag) {
  const auto ov = detail::collect_overrides(
      cfg, true, {"kind", "alpha", "grid", "halfwidth", "samples", "seed"}, diag);
  const std::string kind_name = ov.params.count("kind") ? ov.params.at("kind") : cfg.kind;
  const SurfaceKind kind = detail::parse_kind(kind_name);
  const double alpha = detail::param_or(ov.params, "alpha", cfg.alphas.empty() ? 2.0 : cfg.alphas.front());
  const int points = int(detail::param_or(ov.params, "grid", (long long)cfg.grid_points));
  const double half_width = detail::param_or(ov.params, "halfwidth", cfg.half_width_sigmas);
  if (points < 2) throw ParameterError("surface: grid must have at least 2 points per axis");

  const MixtureModel model = build_model(load_model_spec(cfg.model_file, ov.model));
  if (model.dimension() != 2) throw UnsupportedDimensionError("surface requires a 2-dimensional model");
  const Eigen::VectorXd q = model_axis(model, 0, half_width, points);
  const Eigen::VectorXd p = model_axis(model, 1, half_width, points);
  const GridSurface surf = surface(model, kind, q, p, alpha);

  std::ostringstream csv;
  csv << "q,p,value kind=" << to_string(kind) << " alpha=" << detail::format_short(alpha)
      << " points=" << points << "x" << points << " halfwidth=" << detail::format_short(half_width) << "\n";
  for (Eigen::Index ip = 0; ip < surf.p_axis.size(); ++ip) {
    for (Eigen::Index iq = 0; iq < surf.q_axis.size(); ++iq) {
      csv << detail::format_double(surf.q_axis(iq)) << "," << detail::format_double(surf.p_axis(ip))
          << "," << detail::format_double(surf.values(ip, iq)) << "\n";
    }
  }
  detail::write_file(cfg.output_path, csv.str());
}

// One row per entropy measure. value_bits is always value_nats * log2(e).
inline void run_entropies(const RunConfig& cfg, std::ostream& diag) {
  const auto ov = detail::collect_overrides(
      cfg, true, {"alpha", "samples", "grid", "halfwidth", "seed"}, diag);
  const std::int64_t n = detail::param_or(ov.params, "samples", (long long)cfg.samples);
  const int points = int(detail::param_or(ov.params, "grid", (long long)cfg.grid_points));
  const double half_width = detail::param_or(ov.params, "halfwidth", cfg.half_width_sigmas);
  const std::uint64_t seed = std::uint64_t(detail::param_or(ov.params, "seed", (long long)cfg.seed));
  std::vector<double> alphas = cfg.alphas;
  if (ov.params.count("alpha")) alphas = {detail::param_or(ov.params, "alpha", 2.0)};

  const MixtureModel model = build_model(load_model_spec(cfg.model_file, ov.model));

  std::ostringstream csv;
  csv << "name,value_nats,value_bits,method,std_error,samples\n";
  const auto emit = [&csv](const std::string& name, const EntropyEstimate& e) {
    csv << name << "," << detail::format_double(e.value_nats) << ","
        << detail::format_double(e.value_nats * kLog2E) << "," << to_string(e.method) << ",";
    if (e.std_error_nats) csv << detail::format_double(*e.std_error_nats);
    csv << ",";
    if (e.samples) csv << *e.samples;
    csv << "\n";
  };

  emit("differential_mc", differential_entropy_mc(model, n, seed));
  if (model.dimension() <= 2) {
    emit("differential_grid", differential_entropy_grid(model, half_width, points));
  }
  for (double alpha : alphas) {
    emit("renyi_alpha_" + detail::format_short(alpha), renyi_entropy_mc(model, alpha, n, seed));
  }
  emit("collision_closed", collision_entropy_closed(model));
  emit("collision_separated_paper", collision_entropy_separated_paper(model));
  emit("differential_separated", differential_entropy_separated(model));
  emit("effective_rank", exact_estimate(effective_rank(model.weights()), EntropyMethod::closed_form));
  emit("weight_entropy", exact_estimate(weight_entropy(model.weights()), EntropyMethod::closed_form));
  detail::write_file(cfg.output_path, csv.str());
}

// Gap-law sweep over effective rank. first_below_10pct marks the first grid
// point whose relative error drops to 0.10 or less.
inline void run_gap_curve(const RunConfig& cfg, std::ostream& diag) {
  const auto ov = detail::collect_overrides(
      cfg, false, {"dimension", "r_min", "r_max", "points_per_decade"}, diag);
  const int d = int(detail::param_or(ov.params, "dimension", 2ll));
  const double r_min = detail::param_or(ov.params, "r_min", 1.0);
  const double r_max = detail::param_or(ov.params, "r_max", 1e6);
  const int ppd = int(detail::param_or(ov.params, "points_per_decade", 50ll));
  if (!(r_min >= 1.0) || !(r_max > r_min)) throw ParameterError("gap-curve: need 1 <= r_min < r_max");

  const std::vector<double> r_values = geometric_grid(std::log10(r_min), std::log10(r_max), ppd);
  std::vector<GapCurvePoint> points;
  points.reserve(r_values.size());
  std::size_t first_below = r_values.size();
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    points.push_back(gap_law(r_values[i], d));
    if (first_below == r_values.size() && points.back().relative_error <= 0.10) first_below = i;
  }

  std::ostringstream csv;
  csv << "r_eff,exact_gap_bits,approx_gap_bits,relative_error,first_below_10pct\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& gp = points[i];
    csv << detail::format_double(gp.r_eff) << "," << detail::format_double(gp.exact_gap_bits) << ","
        << detail::format_double(gp.approx_gap_bits) << "," << detail::format_double(gp.relative_error)
        << "," << (i == first_below ? 1 : 0) << "\n";
  }
  detail::write_file(cfg.output_path, csv.str());
}

// Single-row summary of the finite-key impact of an entropy error.
inline void run_qkd_impact(const RunConfig& cfg, std::ostream& diag) {
  const auto ov = detail::collect_overrides(
      cfg, false, {"h2", "delta", "leak_ec", "eps_s", "eps_pa"}, diag);
  QkdScenario scenario;
  scenario.h2_bits = detail::param_or(ov.params, "h2", scenario.h2_bits);
  scenario.delta = detail::param_or(ov.params, "delta", scenario.delta);
  scenario.leak_ec_bits = detail::param_or(ov.params, "leak_ec", scenario.leak_ec_bits);
  scenario.eps_s = detail::param_or(ov.params, "eps_s", scenario.eps_s);
  scenario.eps_pa = detail::param_or(ov.params, "eps_pa", scenario.eps_pa);
  scenario.validate();

  QkdScenario truth = scenario;
  truth.delta = 0.0;
  const EveBound bound = eve_success_bound(scenario.h2_bits);
  const double ratio = degradation_ratio(scenario.delta, scenario.h2_bits);
  const KeyLengthResult kl_true = key_length(truth);
  const KeyLengthResult kl_est = key_length(scenario);
  const KeyLengthDeviation dev = key_length_deviation(scenario);

  std::ostringstream csv;
  csv << "h2_bits,delta,eve_bound_log2,degradation_ratio,key_length_true,key_length_est,"
         "deviation_abs,deviation_rel\n";
  csv << detail::format_double(scenario.h2_bits) << "," << detail::format_double(scenario.delta) << ","
      << detail::format_double(bound.log2_probability) << "," << detail::format_double(ratio) << ","
      << detail::format_double(kl_true.length_bits) << "," << detail::format_double(kl_est.length_bits)
      << "," << detail::format_double(dev.absolute_bits) << "," << detail::format_double(dev.relative)
      << "\n";
  detail::write_file(cfg.output_path, csv.str());
}

// Key rate vs block size for the true and error-inflated entropy rates.
inline void run_qkd_rate(const RunConfig& cfg, std::ostream& diag) {
  const auto ov = detail::collect_overrides(
      cfg, false,
      {"entropy_rate", "delta", "leak_rate", "eps_s", "eps_pa", "fs_coeff", "n_min", "n_max",
       "points_per_decade"},
      diag);
  RateCurveParams params;
  params.entropy_rate_bits = detail::param_or(ov.params, "entropy_rate", params.entropy_rate_bits);
  params.delta = detail::param_or(ov.params, "delta", params.delta);
  params.leak_rate = detail::param_or(ov.params, "leak_rate", params.leak_rate);
  params.eps_s = detail::param_or(ov.params, "eps_s", params.eps_s);
  params.eps_pa = detail::param_or(ov.params, "eps_pa", params.eps_pa);
  params.fs_coefficient = detail::param_or(ov.params, "fs_coeff", params.fs_coefficient);
  const double n_min = detail::param_or(ov.params, "n_min", 1e4);
  const double n_max = detail::param_or(ov.params, "n_max", 1e12);
  const int ppd = int(detail::param_or(ov.params, "points_per_decade", 8ll));
  if (!(n_min >= 1.0) || !(n_max > n_min)) throw ParameterError("qkd-rate: need 1 <= n_min < n_max");

  params.block_sizes.clear();
  for (double x : geometric_grid(std::log10(n_min), std::log10(n_max), ppd)) {
    const auto n = std::uint64_t(std::llround(x));
    if (params.block_sizes.empty() || n > params.block_sizes.back()) params.block_sizes.push_back(n);
  }

  std::ostringstream csv;
  csv << "N,rate_true,rate_estimated\n";
  for (const RatePoint& pt : finite_key_rate_curve(params)) {
    csv << pt.block_size << "," << detail::format_double(pt.rate_true) << ","
        << detail::format_double(pt.rate_estimated) << "\n";
  }
  detail::write_file(cfg.output_path, csv.str());
}

// Dispatch and map failures onto exit codes: 0 success, 1 input/config
// error, 2 unsupported dimension. Diagnostics go to `diag` only.
inline int run(const RunConfig& cfg, std::ostream& diag) {
  try {
    switch (cfg.subcommand) {
      case Subcommand::surface: run_surface(cfg, diag); break;
      case Subcommand::entropies: run_entropies(cfg, diag); break;
      case Subcommand::gap_curve: run_gap_curve(cfg, diag); break;
      case Subcommand::qkd_impact: run_qkd_impact(cfg, diag); break;
      case Subcommand::qkd_rate: run_qkd_rate(cfg, diag); break;
    }
  } catch (const UnsupportedDimensionError& e) {
    diag << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace hqn
