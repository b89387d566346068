#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "erw/cli.hpp"
#include "erw/errors.hpp"
#include "erw/format.hpp"
#include "erw/gamma_toolkit.hpp"
#include "erw/moment_engine.hpp"
#include "erw/rng.hpp"
#include "erw/simulator.hpp"

namespace erw::cli {
namespace {

using nlohmann::json;

// Collects checks for one suite. A suite with only skipped cases is SKIP.
class Suite {
 public:
  explicit Suite(std::string name) : name_(std::move(name)) {}

  // Passes when err <= tol; worst_error tracks the largest err seen.
  bool check(double err, double tol, const std::string& what) {
    ++checked_;
    if (!(err <= tol)) {
      if (failures_.size() < kMaxReported) {
        failures_.push_back(what + ": error " + format_double(err) + " > " +
                            format_double(tol));
      }
      ++failed_;
    }
    if (std::isnan(err) || err > worst_) {
      worst_ = err;
      worst_case_ = what;
    }
    return err <= tol;
  }

  void fail(const std::string& what) {
    ++checked_;
    ++failed_;
    if (failures_.size() < kMaxReported) failures_.push_back(what);
  }

  void skip(const std::string& what) {
    ++skipped_;
    if (skips_.size() < kMaxReported) skips_.push_back(what);
  }

  bool failed() const { return failed_ > 0; }

  json report() const {
    std::string status = "PASS";
    if (failed_ > 0) status = "FAIL";
    else if (checked_ == 0) status = "SKIP";
    json j = {{"name", name_},
              {"status", status},
              {"checks", checked_},
              {"failed", failed_},
              {"skipped", skipped_},
              {"worst_error", std::isnan(worst_) ? json("nan") : json(worst_)}};
    if (!worst_case_.empty()) j["worst_case"] = worst_case_;
    if (!failures_.empty()) j["failures"] = failures_;
    if (!skips_.empty()) j["skips"] = skips_;
    return j;
  }

 private:
  static constexpr std::size_t kMaxReported = 20;
  std::string name_;
  double worst_ = 0.0;
  std::string worst_case_;
  std::int64_t checked_ = 0, failed_ = 0, skipped_ = 0;
  std::vector<std::string> failures_, skips_;
};

double rel_err(double got, double want) {
  const double diff = std::fabs(got - want);
  return want == 0.0 ? diff : diff / std::fabs(want);
}

// Relative error with an absolute floor: pass iff result <= rel.
double floored_rel_err(double got, double want, double rel, double abs) {
  return std::fabs(got - want) / std::max(std::fabs(want), abs / rel);
}

std::string alpha_tag(double alpha) { return "alpha=" + format_double(alpha); }

std::vector<StepDistribution> reference_laws() {
  return {StepDistribution::rademacher(), StepDistribution::bernoulli(0.3),
          StepDistribution::uniform(0.0, 1.0)};
}

StepDistribution random_discrete(RandomSource& rng) {
  const auto size = 1 + rng.below(6);
  std::vector<double> points, weights;
  double total = 0.0;
  for (std::uint64_t i = 0; i < size; ++i) {
    points.push_back(-2.0 + 4.0 * rng.uniform());
    weights.push_back(0.05 + rng.uniform());
    total += weights.back();
  }
  for (auto& w : weights) w /= total;
  return StepDistribution::discrete(std::move(points), std::move(weights));
}

void check_identities(Suite& s, const MomentSet& ms, double tol, const std::string& who) {
  for (const auto& id : check_moment_identities(ms)) {
    s.check(std::fabs(id.residual), tol, who + " [" + id.name + "]");
  }
}

json suite_moment_identities(const ExperimentConfig& cfg) {
  Suite s("moment_identities");
  const double tol = cfg.tolerances.identity_abs;
  if (cfg.moment_fixture) check_identities(s, *cfg.moment_fixture, tol, "fixture");
  for (std::size_t i = 0; i < cfg.distributions.size(); ++i) {
    const auto d = cfg.distribution(i);
    check_identities(s, moment_set(d), tol, d.label());
  }
  for (const auto& d : reference_laws()) check_identities(s, moment_set(d), tol, d.label());
  RandomSource rng(stream_seed(cfg.master_seed, 0x1d));
  for (int i = 0; i < 1000; ++i) {
    const auto d = random_discrete(rng);
    check_identities(s, moment_set(d), tol, "random law #" + std::to_string(i));
  }
  return s.report();
}

json suite_gamma_sums(const ExperimentConfig& cfg) {
  Suite s("gamma_sums");
  const double tol = cfg.tolerances.gamma_rel;
  RandomSource rng(stream_seed(cfg.master_seed, 0x9a));
  int done = 0;
  while (done < 500) {
    const double a = 3.0 * rng.uniform();
    const double b = 5.0 * rng.uniform();
    if (std::fabs(b - a - 1.0) < 0.05 || std::fabs(b - a - 2.0) < 0.05) continue;
    const auto n = static_cast<std::int64_t>(1 + rng.below(2000));
    const std::string tag = "a=" + format_double(a) + " b=" + format_double(b) +
                            " n=" + std::to_string(n);
    s.check(rel_err(gamma_sum_linear(a, b, n), oracle::gamma_sum_linear_direct(a, b, n)),
            tol, "linear " + tag);
    s.check(rel_err(gamma_sum_weighted(a, b, n), oracle::gamma_sum_weighted_direct(a, b, n)),
            tol, "weighted " + tag);
    ++done;
  }
  return s.report();
}

json suite_recursion_solver(const ExperimentConfig& cfg) {
  Suite s("recursion_solver");
  const double tol = cfg.tolerances.gamma_rel;
  RandomSource rng(stream_seed(cfg.master_seed, 0x5e));
  for (int i = 0; i < 100; ++i) {
    RecursionSpec spec;
    spec.beta = 0.1 + 3.0 * rng.uniform();
    spec.b1 = -2.0 + 4.0 * rng.uniform();
    const double c0 = -1.0 + 2.0 * rng.uniform();
    const double c1 = -1.0 + 2.0 * rng.uniform();
    spec.c = [c0, c1](std::int64_t j) { return c0 + c1 / static_cast<double>(j); };
    const auto n = static_cast<std::int64_t>(1 + rng.below(1000));
    const double want = oracle::iterate_recursion(spec, n);
    s.check(floored_rel_err(solve_recursion(spec, n), want, tol, 1e-12), tol,
            "spec #" + std::to_string(i) + " beta=" + format_double(spec.beta) +
                " n=" + std::to_string(n));
    if (std::fabs(spec.beta - 1.0) > 1e-3) {
      RecursionSpec constant{spec.beta, c0, [c0](std::int64_t) { return c0; }};
      s.check(floored_rel_err(solve_constant_recursion(spec.beta, c0, n),
                              oracle::iterate_recursion(constant, n), tol, 1e-12),
              tol, "constant spec #" + std::to_string(i));
    }
  }
  return s.report();
}

json suite_martingale_scale(const ExperimentConfig& cfg) {
  Suite s("martingale_scale_recurrence");
  const double tol = cfg.tolerances.scale_recurrence_rel;
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    double worst = 0.0;
    std::int64_t worst_n = 1;
    double prev = martingale_scale(1, alpha);
    for (std::int64_t n = 1; n < 100000; ++n) {
      const double next = martingale_scale(n + 1, alpha);
      const double want = prev * static_cast<double>(n) / (static_cast<double>(n) + alpha);
      const double e = rel_err(next, want);
      if (e > worst) {
        worst = e;
        worst_n = n + 1;
      }
      prev = next;
    }
    s.check(worst, tol, alpha_tag(alpha) + " n=" + std::to_string(worst_n));
  }
  return s.report();
}

json suite_closed_form(const ExperimentConfig& cfg) {
  Suite s("closed_form_vs_recursion");
  const double rel = cfg.tolerances.closed_form_rel;
  const double abs = cfg.tolerances.closed_form_abs;
  auto laws = reference_laws();
  for (std::size_t i = 0; i < cfg.distributions.size(); ++i) laws.push_back(cfg.distribution(i));
  for (double alpha : cfg.verify_alphas) {
    const MemoryParameter mp(alpha);
    for (const auto& d : laws) {
      const auto ms = moment_set(d);
      const std::string who = d.label() + " " + alpha_tag(alpha);
      try {
        (void)closed_form_moments(ms, mp, 1);
      } catch (const SingularityError& e) {
        s.skip(who + ": " + e.what());
        continue;
      }
      double worst = 0.0;
      std::string worst_at;
      MomentRecursion rec(ms, mp);
      for (std::int64_t n = 1; n <= cfg.verify_n_max; ++n) {
        if (n > 1) rec.advance();
        const auto got = rec.row();
        const auto want = closed_form_moments(ms, mp, n);
        const std::array<double, 6> g = {got.s2, got.st, got.s3, got.su, got.t2, got.s2t};
        const auto w = want.values();
        for (std::size_t k = 0; k < 6; ++k) {
          const double e = floored_rel_err(g[k], w[k], rel, abs);
          if (!(e <= worst)) {
            worst = e;
            worst_at = std::string(ExactMomentRow::kNames[k]) + " n=" +
                       std::to_string(n);
          }
        }
      }
      s.check(worst, rel, who + " worst at " + worst_at);
    }
  }
  return s.report();
}

json suite_brute_force(const ExperimentConfig& cfg) {
  Suite s("brute_force_oracle");
  const double tol = cfg.tolerances.oracle_abs;
  const std::vector<StepDistribution> laws = {
      StepDistribution::rademacher(), StepDistribution::discrete({-1.0, 2.0}, {0.6, 0.4})};
  for (const auto& d : laws) {
    const auto ms = moment_set(d);
    for (double alpha : {0.0, 0.3, 0.5, 0.75, 1.0}) {
      const MemoryParameter mp(alpha);
      MomentRecursion rec(ms, mp);
      for (std::int64_t n = 1; n <= 6; ++n) {
        if (n > 1) rec.advance();
        const auto want = brute_force_moments(d, mp, n).values();
        const auto got = rec.row().values();
        for (std::size_t k = 0; k < got.size(); ++k) {
          s.check(std::fabs(got[k] - want[k]), tol,
                  d.label() + " " + alpha_tag(alpha) + " n=" + std::to_string(n) + " " +
                      std::string(ExactMomentRow::kNames[k]));
        }
      }
    }
  }
  return s.report();
}

json suite_limits(const ExperimentConfig& cfg) {
  Suite s("limit_moments");
  auto laws = reference_laws();
  laws.push_back(StepDistribution::gaussian(0.5, 2.0));
  laws.push_back(StepDistribution::discrete({-1.0, 0.5, 3.0}, {0.25, 0.5, 0.25}));
  for (std::size_t i = 0; i < cfg.distributions.size(); ++i) laws.push_back(cfg.distribution(i));
  const MemoryParameter one(1.0);
  for (const auto& d : laws) {
    const auto ms = moment_set(d);
    const auto q = limit_q_moments(ms, one);
    const double e = std::max({std::fabs(q.q1), std::fabs(q.q2 - ms.M2),
                               std::fabs(q.q3 - ms.M3), std::fabs(q.q4 - ms.M4)});
    s.check(e, 0.0, d.label() + " alpha=1 (exact)");
  }
  const auto rad = moment_set(StepDistribution::rademacher());
  const auto q = limit_q_moments(rad, MemoryParameter(0.75));
  s.check(rel_err(q.q2, 4.0 / std::sqrt(std::numbers::pi)), 1e-14, "rademacher q2 = 4/sqrt(pi)");
  s.check(std::fabs(q.q3), 0.0, "rademacher q3 = 0");
  s.check(rel_err(q.q4, 9.75), 1e-14, "rademacher q4 = 9.75");
  return s.report();
}

json suite_convergence(const ExperimentConfig& cfg) {
  Suite s("moment_convergence");
  const auto rad = moment_set(StepDistribution::rademacher());
  const MemoryParameter mp(0.75);
  const auto q = limit_q_moments(rad, mp);
  const auto row = exact_moments_at(rad, mp, 100000);
  const double n = 100000.0;
  s.check(rel_err(row.s2 / std::pow(n, 1.5), q.q2), cfg.tolerances.convergence_q2_rel,
          "rademacher alpha=0.75 n=1e5 q2");
  s.check(rel_err(row.s4 / std::pow(n, 3.0), q.q4), cfg.tolerances.convergence_q4_rel,
          "rademacher alpha=0.75 n=1e5 q4");
  // r_n = s4 Gamma(n)/Gamma(n+4 alpha) approaches K4 with a relative gap that
  // decays like n^{1-2 alpha}; check that rate between n = 1e4 and n = 1e5.
  for (double alpha : {0.6, 0.75, 0.9, 1.0}) {
    const MemoryParameter m(alpha);
    for (const auto& d : reference_laws()) {
      const auto ms = moment_set(d);
      const double k4 = fourth_moment_coefficient(ms, m);
      MomentRecursion rec(ms, m);
      std::array<double, 2> gap{};
      for (std::size_t i = 0; i < 2; ++i) {
        const std::int64_t target = i == 0 ? 10000 : 100000;
        while (rec.n() < target) rec.advance();
        const double r = rec.row().s4 *
                         std::exp(-log_gamma_ratio(static_cast<double>(target), 4.0 * alpha));
        gap[i] = (r - k4) / k4;
      }
      s.check(rel_err(gap[1] / gap[0], std::pow(10.0, 1.0 - 2.0 * alpha)),
              cfg.tolerances.asymptotic_rate_rel,
              d.label() + " " + alpha_tag(alpha) + " s4 gap decay 1e4 -> 1e5");
    }
  }
  return s.report();
}

json suite_reconstruction(const ExperimentConfig& cfg) {
  Suite s("martingale_reconstruction");
  std::uint64_t stream = 0;
  for (double alpha : {0.0, 0.3, 0.75, 1.0}) {
    const MemoryParameter mp(alpha);
    for (const auto& d : reference_laws()) {
      const auto ms = moment_set(d);
      for (int rep = 0; rep < 5; ++rep) {
        const auto path = simulate_path(d, mp, 2000, stream_seed(cfg.master_seed, ++stream));
        const std::string who = d.label() + " " + alpha_tag(alpha) + " path " +
                                std::to_string(rep);
        try {
          const auto view = martingale_diagnostics(path, mp, ms);
          s.check(view.max_relative_error, cfg.tolerances.reconstruction_rel, who);
        } catch (const ReconstructionError& e) {
          s.fail(who + ": " + e.what());
        }
      }
    }
  }
  return s.report();
}

json suite_stochastic(const ExperimentConfig& cfg) {
  Suite s("stochastic_invariants");
  const auto dist = StepDistribution::rademacher();
  const auto ms = moment_set(dist);
  const MemoryParameter mp(0.75);
  SurveyConfig sc;
  sc.n = 100;
  sc.replicates = cfg.verify_replicates;
  sc.master_seed = cfg.master_seed;
  sc.sample_points = {1, 2, 5, 10, 50, 99};
  sc.threads = cfg.threads;
  const auto survey = survey_paths(dist, ms, mp, sc);
  const auto raw = ms.raw();
  const std::array<double, 4> want = {raw.m1, raw.m2, raw.m3, raw.m4};
  for (std::size_t k = 0; k < survey.marginal.size(); ++k) {
    for (std::size_t p = 0; p < 4; ++p) {
      const auto& m = survey.marginal[k][p];
      const double z = m.std_error > 0.0 ? std::fabs(m.mean - want[p]) / m.std_error
                                         : (m.mean == want[p] ? 0.0 : INFINITY);
      s.check(z, cfg.tolerances.marginal_z,
              "E(X_" + std::to_string(k + 1) + "^" + std::to_string(p + 1) + ") |z|");
    }
  }
  const double bound = 16.0 * raw.m4;
  for (const auto& pt : survey.points) {
    const auto& inc = pt.q_increment;
    s.check(inc.std_error > 0.0 ? std::fabs(inc.mean) / inc.std_error : std::fabs(inc.mean),
            cfg.tolerances.increment_z, "E(Q_{n+1}-Q_n) |z| n=" + std::to_string(pt.n));
    s.check(pt.abs_eps4.mean / bound, 1.0, "E|eps_n|^4 / (16 E|xi|^4) n=" + std::to_string(pt.n));
  }

  // One-step continuations from a frozen prefix.
  const auto law = StepDistribution::bernoulli(0.3);
  const auto lms = moment_set(law);
  const MemoryParameter cm(0.6);
  const auto prefix = simulate_path(law, cm, 20, stream_seed(cfg.master_seed, 0xc0)).state(20);
  const auto rep = conditional_continuation_test(prefix, law, lms, cm, cfg.verify_replicates,
                                                 stream_seed(cfg.master_seed, 0xc1));
  s.check(rep.max_abs_z(), cfg.tolerances.continuation_z, "continuation max |z|");
  return s.report();
}

json suite_determinism(const ExperimentConfig& cfg) {
  Suite s("determinism");
  const auto dist = StepDistribution::uniform(-1.0, 2.0);
  const MemoryParameter mp(0.7);
  BatchConfig bc;
  bc.n = 200;
  bc.replicates = 500;
  bc.master_seed = cfg.master_seed;
  bc.checkpoints = {10, 100, 200};
  bc.threads = 1;
  const auto one = simulate_batch(dist, mp, bc);
  for (unsigned t : {2u, 3u, 7u}) {
    bc.threads = t;
    s.check(simulate_batch(dist, mp, bc) == one ? 0.0 : 1.0, 0.0,
            "threads=" + std::to_string(t) + " vs threads=1");
  }
  return s.report();
}

struct SuiteEntry {
  const char* name;
  json (*run)(const ExperimentConfig&);
};

constexpr SuiteEntry kSuites[] = {
    {"moment_identities", suite_moment_identities},
    {"gamma_sums", suite_gamma_sums},
    {"recursion_solver", suite_recursion_solver},
    {"martingale_scale_recurrence", suite_martingale_scale},
    {"closed_form_vs_recursion", suite_closed_form},
    {"brute_force_oracle", suite_brute_force},
    {"limit_moments", suite_limits},
    {"moment_convergence", suite_convergence},
    {"martingale_reconstruction", suite_reconstruction},
    {"stochastic_invariants", suite_stochastic},
    {"determinism", suite_determinism},
};

}  // namespace

json run_verify(const ExperimentConfig& cfg) {
  for (const auto& want : cfg.verify_suites) {
    const bool known = std::any_of(std::begin(kSuites), std::end(kSuites),
                                   [&](const SuiteEntry& e) { return want == e.name; });
    if (!known) throw ConfigError("verify: unknown suite '" + want + "'");
  }
  json suites = json::array();
  bool ok = true;
  for (const auto& entry : kSuites) {
    if (!cfg.verify_suites.empty() &&
        std::find(cfg.verify_suites.begin(), cfg.verify_suites.end(), entry.name) ==
            cfg.verify_suites.end()) {
      continue;
    }
    json r;
    try {
      r = entry.run(cfg);
    } catch (const Error& e) {
      r = {{"name", entry.name}, {"status", "FAIL"}, {"worst_error", "nan"},
           {"failures", {std::string("unexpected error: ") + e.what()}}};
    }
    if (r.at("status") == "FAIL") ok = false;
    suites.push_back(std::move(r));
  }
  return {{"command", "verify"},
          {"master_seed", format_seed(cfg.master_seed)},
          {"status", ok ? "PASS" : "FAIL"},
          {"suites", std::move(suites)}};
}

}  // namespace erw::cli
