#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "erw/distributions.hpp"
#include "json.hpp"

namespace erw::cli {

// Stable process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfigError = 2;

/// Thresholds used by `verify` (and the comparison columns of `exact`).
struct Tolerances {
  double closed_form_rel = 1e-8;
  double closed_form_abs = 1e-12;
  double oracle_abs = 1e-12;
  double gamma_rel = 1e-10;
  double identity_abs = 1e-12;
  double scale_recurrence_rel = 1e-14;
  double reconstruction_rel = 1e-10;
  double marginal_z = 4.0;
  double increment_z = 4.0;
  double continuation_z = 3.0;
  double asymptotic_rate_rel = 0.1;
  double convergence_q2_rel = 0.01;
  double convergence_q4_rel = 0.02;
};

struct ExperimentConfig {
  std::vector<nlohmann::json> distributions{nlohmann::json{{"kind", "rademacher"}}};
  double alpha = 0.75;
  /// Alpha grid for `sweep`; empty means 0.55, 0.60, ..., 1.0.
  std::vector<double> alphas;
  std::int64_t n = 1000;
  std::int64_t replicates = 10000;
  /// Empty means {n}.
  std::vector<std::int64_t> checkpoints;
  std::uint64_t master_seed = 0x5eedULL;
  std::string out;
  unsigned threads = 0;
  bool compare = false;
  Tolerances tolerances;

  // verify
  std::vector<double> verify_alphas{0.26, 0.4, 0.6, 0.75, 0.9, 1.0};
  std::int64_t verify_n_max = 10000;
  std::int64_t verify_replicates = 20000;
  std::optional<MomentSet> moment_fixture;
  std::vector<std::string> verify_suites;  ///< empty = all

  StepDistribution distribution(std::size_t i = 0) const;
  std::vector<std::int64_t> effective_checkpoints() const;
};

/// Parses a config document. Unknown keys are rejected so that typos do not
/// silently fall back to defaults. Throws ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Throws ConfigError when a field is out of range.
void validate_config(const ExperimentConfig& c);

/// Decimal or 0x-prefixed hexadecimal 64-bit seed. Throws ConfigError.
std::uint64_t parse_seed(std::string_view text);
/// "a,b,c" -> {a, b, c}. Throws ConfigError.
std::vector<std::int64_t> parse_int_list(std::string_view text);
/// "0.6,0.7" or "start:stop:step". Throws ConfigError.
std::vector<double> parse_alpha_list(std::string_view text);

int cmd_limits(const ExperimentConfig& cfg, std::ostream& out);
int cmd_exact(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out);
int cmd_verify(const ExperimentConfig& cfg, std::ostream& out);

/// Runs the verification suites; "status" is "PASS" or "FAIL" overall.
nlohmann::json run_verify(const ExperimentConfig& cfg);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace erw::cli
