#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "erw/cli.hpp"
#include "erw/errors.hpp"

namespace erw::cli {
namespace {

struct Flags {
  std::string config, alpha, dist, n, replicates, seed, checkpoints, out, threads, alphas;
  bool compare = false;
  std::vector<std::string> suites;
};

void add_common(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "JSON config file; flags override its fields");
  cmd.add_option("--alpha", f.alpha, "memory parameter in [0,1]");
  cmd.add_option("--dist", f.dist, "step distribution as JSON, e.g. '{\"kind\":\"rademacher\"}'");
  cmd.add_option("--n", f.n, "walk length (n_max)");
  cmd.add_option("--out", f.out, "write output to this file instead of stdout");
}

void add_random(CLI::App& cmd, Flags& f) {
  cmd.add_option("--replicates", f.replicates, "number of independent walks");
  cmd.add_option("--seed", f.seed, "master seed, decimal or 0x-prefixed hex");
  cmd.add_option("--threads", f.threads, "worker threads (0 = hardware concurrency)");
}

double to_double(const std::string& s, const char* flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(flag) + ": not a number: '" + s + "'");
}

std::int64_t to_int(const std::string& s, const char* flag) {
  const auto v = parse_int_list(s);
  if (v.size() != 1) throw ConfigError(std::string(flag) + ": expected one integer");
  return v.front();
}

ExperimentConfig build_config(const Flags& f) {
  nlohmann::json doc = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot open config file '" + f.config + "'");
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file '" + f.config + "': " + e.what());
    }
  }
  ExperimentConfig c = config_from_json(doc);
  if (!f.alpha.empty()) c.alpha = to_double(f.alpha, "--alpha");
  if (!f.dist.empty()) {
    try {
      c.distributions = {nlohmann::json::parse(f.dist)};
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("--dist: ") + e.what());
    }
  }
  if (!f.n.empty()) c.n = to_int(f.n, "--n");
  if (!f.replicates.empty()) c.replicates = to_int(f.replicates, "--replicates");
  if (!f.seed.empty()) c.master_seed = parse_seed(f.seed);
  if (!f.checkpoints.empty()) c.checkpoints = parse_int_list(f.checkpoints);
  if (!f.out.empty()) c.out = f.out;
  if (!f.threads.empty()) {
    const auto t = to_int(f.threads, "--threads");
    if (t < 0) throw ConfigError("--threads must be >= 0");
    c.threads = static_cast<unsigned>(t);
  }
  if (!f.alphas.empty()) c.alphas = parse_alpha_list(f.alphas);
  if (f.compare) c.compare = true;
  if (!f.suites.empty()) c.verify_suites = f.suites;
  validate_config(c);
  return c;
}

int dispatch(const std::string& command, const ExperimentConfig& c, std::ostream& out,
             std::ostream& err) {
  if (command == "limits") return cmd_limits(c, out);
  if (command == "exact") return cmd_exact(c, out, err);
  if (command == "simulate") return cmd_simulate(c, out);
  if (command == "sweep") return cmd_sweep(c, out);
  return cmd_verify(c, out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact, limiting and simulated moments of the elephant random walk"};
  app.require_subcommand(1);
  Flags f;

  auto* limits = app.add_subcommand("limits", "limiting moments q1..q4 of Q (alpha > 1/2)");
  add_common(*limits, f);

  auto* exact = app.add_subcommand("exact", "exact mixed-moment table from the recursions");
  add_common(*exact, f);
  exact->add_option("--checkpoints", f.checkpoints, "rows to print, e.g. 10,100,1000");
  exact->add_flag("--compare", f.compare, "add closed-form and relative-error columns");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo scaled moments vs theory");
  add_common(*simulate, f);
  add_random(*simulate, f);
  simulate->add_option("--checkpoints", f.checkpoints, "walk lengths to report");

  auto* verify = app.add_subcommand("verify", "run the invariant suites; exit 1 on failure");
  add_common(*verify, f);
  add_random(*verify, f);
  verify->add_option("--suite", f.suites, "run only the named suite (repeatable)");

  auto* sweep = app.add_subcommand("sweep", "q2, q3, q4 and K4 over an alpha grid");
  add_common(*sweep, f);
  sweep->add_option("--alphas", f.alphas, "a,b,c or start:stop:step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (const auto* sub = app.get_subcommands().front(); sub->count("--help") > 0) {
    out << sub->help();
    return kExitOk;
  }

  try {
    const ExperimentConfig c = build_config(f);
    if (c.out.empty()) return dispatch(command, c, out, err);
    std::ostringstream buffer;
    const int code = dispatch(command, c, buffer, err);
    std::ofstream file(c.out, std::ios::binary);
    if (!file || !(file << buffer.str()) || !file.flush()) {
      err << "error: cannot write output file '" << c.out << "'\n";
      return kExitConfigError;
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace erw::cli
