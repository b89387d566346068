#include <charconv>
#include <cmath>
#include <set>

#include "erw/cli.hpp"
#include "erw/distribution_json.hpp"
#include "erw/errors.hpp"

namespace erw::cli {
namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("not a number: '" + s + "'");
  }
  return v;
}

std::int64_t get_int(const json& j, const char* key) {
  if (!j.is_number_integer()) {
    throw ConfigError(std::string("config: '") + key + "' must be an integer");
  }
  return j.get<std::int64_t>();
}

double get_number(const json& j, const char* key) {
  if (!j.is_number()) {
    throw ConfigError(std::string("config: '") + key + "' must be a number");
  }
  return j.get<double>();
}

std::vector<double> alpha_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) {
    throw ConfigError("alpha grid needs step > 0 and stop >= start");
  }
  std::vector<double> out;
  const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9));
  for (std::int64_t i = 0; i <= count; ++i) {
    // Snap to 12 decimals so that 0.6 + 3*0.05 prints as 0.75.
    out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

void read_tolerances(const json& j, Tolerances& t) {
  if (!j.is_object()) throw ConfigError("config: 'tolerances' must be an object");
  for (const auto& [key, value] : j.items()) {
    double* slot = nullptr;
    if (key == "closed_form_rel") slot = &t.closed_form_rel;
    else if (key == "closed_form_abs") slot = &t.closed_form_abs;
    else if (key == "oracle_abs") slot = &t.oracle_abs;
    else if (key == "gamma_rel") slot = &t.gamma_rel;
    else if (key == "identity_abs") slot = &t.identity_abs;
    else if (key == "scale_recurrence_rel") slot = &t.scale_recurrence_rel;
    else if (key == "reconstruction_rel") slot = &t.reconstruction_rel;
    else if (key == "marginal_z") slot = &t.marginal_z;
    else if (key == "increment_z") slot = &t.increment_z;
    else if (key == "continuation_z") slot = &t.continuation_z;
    else if (key == "asymptotic_rate_rel") slot = &t.asymptotic_rate_rel;
    else if (key == "convergence_q2_rel") slot = &t.convergence_q2_rel;
    else if (key == "convergence_q4_rel") slot = &t.convergence_q4_rel;
    else throw ConfigError("config: unknown tolerance '" + key + "'");
    *slot = get_number(value, key.c_str());
  }
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) {
    throw ConfigError("config: alpha must lie in [0, 1]");
  }
  for (double a : c.alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("config: alphas must lie in [0, 1]");
  }
  if (c.n < 1) throw ConfigError("config: n must be >= 1");
  if (c.replicates < 1) throw ConfigError("config: replicates must be >= 1");
  for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
    if (c.checkpoints[i] < 1) throw ConfigError("config: checkpoints must be >= 1");
    if (i > 0 && c.checkpoints[i] <= c.checkpoints[i - 1]) {
      throw ConfigError("config: checkpoints must be sorted ascending without repeats");
    }
  }
  if (c.distributions.empty()) throw ConfigError("config: no distribution given");
  for (const auto& d : c.distributions) {
    try {
      (void)distribution_from_json(d);
    } catch (const InvalidDistribution& e) {
      throw ConfigError(e.what());
    }
  }
}

StepDistribution ExperimentConfig::distribution(std::size_t i) const {
  try {
    return distribution_from_json(distributions.at(i));
  } catch (const InvalidDistribution& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::int64_t> ExperimentConfig::effective_checkpoints() const {
  if (checkpoints.empty()) return {n};
  return checkpoints;
}

std::uint64_t parse_seed(std::string_view text) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    first += 2;
    base = 16;
  }
  auto res = std::from_chars(first, last, v, base);
  if (s.empty() || res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("invalid seed '" + s + "' (decimal or 0x-prefixed hex expected)");
  }
  return v;
}

std::vector<std::int64_t> parse_int_list(std::string_view text) {
  std::vector<std::int64_t> out;
  for (const auto& part : split(text, ',')) {
    std::int64_t v = 0;
    auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || res.ec != std::errc() || res.ptr != part.data() + part.size()) {
      throw ConfigError("invalid integer list '" + std::string(text) + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_alpha_list(std::string_view text) {
  // Comma-separated items, each a single value or a start:stop:step grid.
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    if (item.find(':') == std::string::npos) {
      out.push_back(parse_double(item));
      continue;
    }
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw ConfigError("alpha grid must be start:stop:step");
    const auto grid =
        alpha_grid(parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]));
    out.insert(out.end(), grid.begin(), grid.end());
  }
  return out;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "distribution") {
      c.distributions = {value};
    } else if (key == "distributions") {
      if (!value.is_array() || value.empty()) {
        throw ConfigError("config: 'distributions' must be a non-empty array");
      }
      c.distributions.assign(value.begin(), value.end());
    } else if (key == "alpha") {
      c.alpha = get_number(value, "alpha");
    } else if (key == "alphas") {
      if (value.is_array()) {
        c.alphas.clear();
        for (const auto& a : value) c.alphas.push_back(get_number(a, "alphas"));
      } else if (value.is_object()) {
        c.alphas = alpha_grid(get_number(value.at("start"), "start"),
                              get_number(value.at("stop"), "stop"),
                              get_number(value.at("step"), "step"));
      } else if (value.is_string()) {
        c.alphas = parse_alpha_list(value.get<std::string>());
      } else {
        throw ConfigError("config: 'alphas' must be an array, grid object or string");
      }
    } else if (key == "n" || key == "n_max") {
      c.n = get_int(value, key.c_str());
    } else if (key == "replicates") {
      c.replicates = get_int(value, "replicates");
    } else if (key == "checkpoints") {
      if (!value.is_array()) throw ConfigError("config: 'checkpoints' must be an array");
      c.checkpoints.clear();
      for (const auto& v : value) c.checkpoints.push_back(get_int(v, "checkpoints"));
    } else if (key == "master_seed" || key == "seed") {
      if (value.is_string()) {
        c.master_seed = parse_seed(value.get<std::string>());
      } else if (value.is_number_unsigned() || value.is_number_integer()) {
        c.master_seed = value.get<std::uint64_t>();
      } else {
        throw ConfigError("config: 'master_seed' must be an integer or string");
      }
    } else if (key == "out") {
      if (!value.is_string()) throw ConfigError("config: 'out' must be a string");
      c.out = value.get<std::string>();
    } else if (key == "threads") {
      const auto t = get_int(value, "threads");
      if (t < 0) throw ConfigError("config: 'threads' must be >= 0");
      c.threads = static_cast<unsigned>(t);
    } else if (key == "compare") {
      if (!value.is_boolean()) throw ConfigError("config: 'compare' must be a boolean");
      c.compare = value.get<bool>();
    } else if (key == "tolerances") {
      read_tolerances(value, c.tolerances);
    } else if (key == "verify") {
      if (!value.is_object()) throw ConfigError("config: 'verify' must be an object");
      for (const auto& [vkey, vval] : value.items()) {
        if (vkey == "closed_form_alphas") {
          c.verify_alphas.clear();
          for (const auto& a : vval) c.verify_alphas.push_back(get_number(a, "closed_form_alphas"));
        } else if (vkey == "n_max") {
          c.verify_n_max = get_int(vval, "n_max");
        } else if (vkey == "replicates") {
          c.verify_replicates = get_int(vval, "replicates");
        } else if (vkey == "moment_fixture") {
          try {
            c.moment_fixture = moment_set_from_json(vval);
          } catch (const InvalidDistribution& e) {
            throw ConfigError(e.what());
          }
        } else if (vkey == "suites") {
          c.verify_suites.clear();
          for (const auto& s : vval) {
            if (!s.is_string()) throw ConfigError("config: verify.suites must hold strings");
            c.verify_suites.push_back(s.get<std::string>());
          }
        } else {
          throw ConfigError("config: unknown verify key '" + vkey + "'");
        }
      }
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  validate_config(c);
  return c;
}

}  // namespace erw::cli
