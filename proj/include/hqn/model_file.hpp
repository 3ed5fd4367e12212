#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hqn/errors.hpp"
#include "hqn/mixture.hpp"

namespace hqn {

// Ordered key=value assignments; later entries win.
using KeyValueList = std::vector<std::pair<std::string, std::string>>;

inline const std::set<std::string>& model_file_keys() {
  static const std::set<std::string> keys = {
      "lambda", "dimension", "base_mean", "base_cov", "direction", "spacing", "tail_epsilon",
  };
  return keys;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::pair<std::string, std::string> split_key_value(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ParameterError("expected key=value, got '" + text + "'");
  const std::string key = trim(text.substr(0, eq));
  const std::string value = trim(text.substr(eq + 1));
  if (key.empty()) throw ParameterError("empty key in '" + text + "'");
  return {key, value};
}

inline double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (trim(value.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ParameterError(key + ": cannot parse '" + value + "' as a number");
}

inline long long parse_int(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (trim(value.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ParameterError(key + ": cannot parse '" + value + "' as an integer");
}

inline std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), key));
  if (out.empty()) throw ParameterError(key + ": empty value");
  return out;
}

// Flat key=value model file. Blank lines and '#' comments are skipped;
// anything else must be `key = value` with a known key.
inline KeyValueList read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open model file '" + path + "'");
  KeyValueList out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    out.push_back(split_key_value(line));
  }
  return out;
}

// Build a HybridNoiseSpec from key=value assignments on top of the defaults.
// `dimension` is applied first so the defaults of the vector-valued fields
// match; explicitly assigned vectors must then agree with it. Unknown keys
// are a hard error.
inline HybridNoiseSpec spec_from_key_values(const KeyValueList& assignments) {
  std::map<std::string, std::string> last;
  for (const auto& [key, value] : assignments) {
    if (model_file_keys().count(key) == 0) throw ParameterError("unknown model key '" + key + "'");
    last[key] = value;
  }

  int dimension = 2;
  if (auto it = last.find("dimension"); it != last.end()) {
    const long long d = parse_int(it->second, "dimension");
    if (d < 1 || d > 64) throw ParameterError("dimension: must lie in [1, 64]");
    dimension = int(d);
  }
  HybridNoiseSpec spec = HybridNoiseSpec::defaults(dimension);

  for (const auto& [key, value] : last) {
    if (key == "dimension") continue;
    if (key == "lambda") {
      spec.lambda = parse_double(value, key);
    } else if (key == "spacing") {
      spec.spacing = parse_double(value, key);
    } else if (key == "tail_epsilon") {
      spec.tail_epsilon = parse_double(value, key);
    } else if (key == "base_mean" || key == "direction") {
      const auto v = parse_double_list(value, key);
      if (int(v.size()) != dimension) {
        throw ParameterError(key + ": expected " + std::to_string(dimension) + " comma-separated values");
      }
      Eigen::VectorXd vec(dimension);
      for (int i = 0; i < dimension; ++i) vec(i) = v[std::size_t(i)];
      if (key == "base_mean") {
        spec.base_mean = vec;
      } else {
        spec.placement_direction = vec;
      }
    } else if (key == "base_cov") {
      const auto v = parse_double_list(value, key);
      if (int(v.size()) != dimension * dimension) {
        throw ParameterError("base_cov: expected " + std::to_string(dimension * dimension) +
                             " row-major comma-separated values");
      }
      Eigen::MatrixXd m(dimension, dimension);
      for (int r = 0; r < dimension; ++r) {
        for (int c = 0; c < dimension; ++c) m(r, c) = v[std::size_t(r * dimension + c)];
      }
      spec.base_cov = m;
    }
  }
  return spec;
}

inline HybridNoiseSpec load_model_spec(const std::string& path, const KeyValueList& overrides = {}) {
  KeyValueList kvs = path.empty() ? KeyValueList{} : read_key_value_file(path);
  kvs.insert(kvs.end(), overrides.begin(), overrides.end());
  return spec_from_key_values(kvs);
}

}  // namespace hqn
