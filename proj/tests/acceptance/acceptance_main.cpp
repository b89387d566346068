// End-to-end acceptance run: one PASS/FAIL line per criterion, exit 1 on any
// failure. Runs at full scale (the Monte Carlo criteria take a few seconds).
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "erw/cli.hpp"
#include "erw/distributions.hpp"
#include "erw/errors.hpp"
#include "erw/gamma_toolkit.hpp"
#include "erw/moment_engine.hpp"
#include "erw/simulator.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace {

using namespace erw;
using erw::testing::relative_error;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::vector<StepDistribution> reference_laws() {
  return {StepDistribution::rademacher(), StepDistribution::bernoulli(0.3),
          StepDistribution::uniform(0.0, 1.0)};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome closed_forms_match_recursion() {
  double worst = 0.0;
  std::string where;
  for (double alpha : {0.6, 0.75, 0.9, 1.0}) {
    const MemoryParameter mp(alpha);
    for (const auto& d : reference_laws()) {
      const auto ms = moment_set(d);
      MomentRecursion rec(ms, mp);
      for (std::int64_t n = 1; n <= 10000; ++n) {
        if (n > 1) rec.advance();
        const auto row = rec.row();
        const std::array<double, 6> got = {row.s2, row.st, row.s3, row.su, row.t2, row.s2t};
        const auto want = closed_form_moments(ms, mp, n).values();
        for (std::size_t k = 0; k < 6; ++k) {
          const double diff = std::fabs(got[k] - want[k]);
          // 1e-12 absolute floor, expressed on the relative scale.
          const double e = diff <= 1e-12 ? 0.0 : diff / std::fabs(want[k]);
          if (e > worst) {
            worst = e;
            where = d.label() + " alpha=" + fmt(alpha) + " n=" + std::to_string(n);
          }
        }
      }
    }
  }
  return {worst <= 1e-8, "worst rel err " + fmt(worst) + (where.empty() ? "" : " at " + where)};
}

Outcome brute_force_matches_recursion() {
  double worst = 0.0;
  for (const auto& d : {StepDistribution::rademacher(),
                        StepDistribution::discrete({-1.0, 2.0}, {0.6, 0.4})}) {
    const auto ms = moment_set(d);
    for (double alpha : {0.0, 0.3, 0.5, 0.75, 1.0}) {
      const MemoryParameter mp(alpha);
      const auto table = exact_moments_upto(ms, mp, 6);
      for (std::int64_t n = 1; n <= 6; ++n) {
        const auto want = brute_force_moments(d, mp, n).values();
        const auto got = table[static_cast<std::size_t>(n - 1)].values();
        for (std::size_t k = 0; k < 7; ++k) worst = std::max(worst, std::fabs(got[k] - want[k]));
      }
    }
  }
  return {worst <= 1e-12, "worst abs err " + fmt(worst)};
}

Outcome degenerate_limits_exact() {
  auto laws = reference_laws();
  laws.push_back(StepDistribution::gaussian(0.5, 2.0));
  laws.push_back(StepDistribution::uniform(-1.0, 2.0));
  laws.push_back(StepDistribution::discrete({-1.0, 0.5, 3.0}, {0.25, 0.5, 0.25}));
  int exact = 0;
  for (const auto& d : laws) {
    const auto ms = moment_set(d);
    const auto q = limit_q_moments(ms, MemoryParameter(1.0));
    if (q.q1 == 0.0 && q.q2 == ms.M2 && q.q3 == ms.M3 && q.q4 == ms.M4) ++exact;
  }
  return {exact == static_cast<int>(laws.size()),
          std::to_string(exact) + "/" + std::to_string(laws.size()) + " laws bit-exact"};
}

Outcome rademacher_three_quarters() {
  Outcome out;
  const auto dist = StepDistribution::rademacher();
  const auto ms = moment_set(dist);
  const MemoryParameter mp(0.75);
  const auto q = limit_q_moments(ms, mp);
  const bool closed = relative_error(q.q2, 4.0 / std::sqrt(std::numbers::pi)) <= 1e-14 &&
                      q.q3 == 0.0 && relative_error(q.q4, 9.75) <= 1e-14;
  std::ostringstream detail;
  detail << "q2=" << q.q2 << " q3=" << q.q3 << " q4=" << q.q4;
  out.pass = closed;

  const std::int64_t n = 3000;
  BatchConfig bc;
  bc.n = n;
  bc.replicates = 100000;
  bc.master_seed = 0x5eed;
  bc.checkpoints = {n};
  const auto est = empirical_q_moments(simulate_batch(dist, mp, bc), mp);
  const auto row = exact_moments_at(ms, mp, n);
  const double nn = static_cast<double>(n);
  const std::array<std::pair<int, double>, 2> exact = {
      {{2, row.s2 / std::pow(nn, 1.5)}, {4, row.s4 / std::pow(nn, 3.0)}}};
  for (const auto& [p, want] : exact) {
    const auto& e = est[static_cast<std::size_t>(p - 1)];
    const double allowed = std::max(3.0 * e.std_error, 0.03 * std::fabs(want));
    const double diff = std::fabs(e.estimate - want);
    out.pass = out.pass && diff <= allowed;
    detail << "; MC p=" << p << " " << fmt(e.estimate) << " vs " << fmt(want)
           << " (|d|=" << fmt(diff) << " <= " << fmt(allowed) << ")";
  }

  const auto far = exact_moments_at(ms, mp, 100000);
  const double q2n = far.s2 / std::pow(1e5, 1.5);
  const double q4n = far.s4 / std::pow(1e5, 3.0);
  const double e2 = relative_error(q2n, q.q2), e4 = relative_error(q4n, q.q4);
  out.pass = out.pass && e2 <= 0.01 && e4 <= 0.02;
  detail << "; n=1e5 rel gap q2 " << fmt(e2) << " q4 " << fmt(e4);
  out.detail = detail.str();
  return out;
}

Outcome gamma_identities() {
  erw::testing::Gen gen(0x9a);
  double worst_sum = 0.0;
  int cases = 0;
  while (cases < 500) {
    const double a = gen.real(0.0, 3.0), b = gen.real(0.0, 5.0);
    if (std::fabs(b - a - 1.0) < 0.05 || std::fabs(b - a - 2.0) < 0.05) continue;
    const auto n = gen.integer(1, 2000);
    ++cases;
    const auto lin = static_cast<double>(erw::testing::gamma_sum_terms(a, b, n, 0));
    const auto wtd = static_cast<double>(erw::testing::gamma_sum_terms(a, b, n, 1));
    worst_sum = std::max({worst_sum, relative_error(gamma_sum_linear(a, b, n), lin),
                          relative_error(gamma_sum_weighted(a, b, n), wtd)});
  }
  double worst_solver = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double beta = gen.real(0.1, 3.0), b1 = gen.real(-2.0, 2.0);
    const double c0 = gen.real(-1.0, 1.0), c1 = gen.real(-1.0, 1.0);
    const auto n = gen.integer(1, 1000);
    RecursionSpec spec{beta, b1, [c0, c1](std::int64_t j) { return c0 + c1 / static_cast<double>(j); }};
    long double direct = b1;
    for (std::int64_t k = 1; k < n; ++k) {
      direct = (1.0L + beta / static_cast<long double>(k)) * direct + spec.c(k);
    }
    const double got = solve_recursion(spec, n);
    const double want = static_cast<double>(direct);
    // Same 1e-12 absolute floor as the moment checks for near-cancelling specs.
    const double diff = std::fabs(got - want);
    worst_solver = std::max(worst_solver, diff <= 1e-12 ? 0.0 : diff / std::fabs(want));
  }
  return {worst_sum <= 1e-10 && worst_solver <= 1e-10,
          "gamma sums worst " + fmt(worst_sum) + ", solver worst " + fmt(worst_solver)};
}

Outcome stochastic_invariants() {
  Outcome out;
  std::ostringstream detail;
  const auto dist = StepDistribution::uniform(-1.0, 2.0);
  const auto ms = moment_set(dist);
  const MemoryParameter mp(0.75);
  SurveyConfig sc;
  sc.n = 100;
  sc.replicates = 100000;
  sc.master_seed = 0x5eed;
  for (std::int64_t k = 1; k < sc.n; ++k) sc.sample_points.push_back(k);
  const auto survey = survey_paths(dist, ms, mp, sc);

  const auto raw = ms.raw();
  const std::array<double, 4> want = {raw.m1, raw.m2, raw.m3, raw.m4};
  double worst_z = 0.0;
  for (const auto& step : survey.marginal) {
    for (std::size_t p = 0; p < 4; ++p) {
      worst_z = std::max(worst_z, std::fabs(step[p].mean - want[p]) / step[p].std_error);
    }
  }
  out.pass = worst_z <= 4.0;
  detail << "marginal max|z| " << fmt(worst_z) << " (n<=100, p<=4)";

  const auto law = StepDistribution::bernoulli(0.3);
  const MemoryParameter cm(0.6);
  const auto prefix = simulate_path(law, cm, 20, stream_seed(0x5eed, 0xc0)).state(20);
  const auto rep = conditional_continuation_test(prefix, law, moment_set(law), cm, 100000,
                                                 stream_seed(0x5eed, 0xc1));
  out.pass = out.pass && rep.max_abs_z() <= 3.0;
  detail << "; continuation max|z| " << fmt(rep.max_abs_z());

  out.pass = out.pass && survey.max_reconstruction_error <= 1e-10;
  detail << "; reconstruction worst " << fmt(survey.max_reconstruction_error);

  double worst_ratio = 0.0;
  for (const auto& pt : survey.points) {
    worst_ratio = std::max(worst_ratio, pt.abs_eps4.mean / (16.0 * raw.m4));
  }
  out.pass = out.pass && worst_ratio <= 1.0;
  detail << "; max E|eps|^4/(16 E|xi|^4) " << fmt(worst_ratio);
  out.detail = detail.str();
  return out;
}

std::string cli_output(std::vector<std::string> args) {
  args.insert(args.begin(), "erw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(code) + "\n" + out.str();
}

Outcome determinism() {
  const std::vector<std::string> base = {
      "simulate", "--alpha", "0.75", "--n", "2000", "--replicates", "5000", "--seed", "0x2a",
      "--checkpoints", "10,100,1000,2000", "--dist", R"({"kind":"uniform","lo":-1,"hi":2})"};
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "1", "2", "5", "8", "0"}) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads});
    outputs.push_back(cli_output(args));
  }
  const bool same = std::all_of(outputs.begin(), outputs.end(),
                                [&](const std::string& o) { return o == outputs.front(); });
  const bool ok = outputs.front().rfind("0\n", 0) == 0;
  return {same && ok, std::to_string(outputs.size()) + " simulate runs over threads {1,1,2,5,8,auto}" +
                          (same ? " byte-identical" : " differ")};
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
  double budget_seconds = 0.0;  ///< 0 = no runtime limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"closed forms vs recursion, n <= 1e4", closed_forms_match_recursion, 10.0},
      {"brute-force enumeration vs recursion, n <= 6", brute_force_matches_recursion, 5.0},
      {"alpha = 1 limits equal (0, M2, M3, M4)", degenerate_limits_exact},
      {"rademacher alpha = 3/4 limits and convergence", rademacher_three_quarters},
      {"gamma sums and recursion solver", gamma_identities},
      {"stochastic invariants", stochastic_invariants},
      {"determinism across runs and threads", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].budget_seconds > 0.0 && secs > criteria[i].budget_seconds) {
      o.pass = false;
      o.detail += "; over runtime budget " + fmt(criteria[i].budget_seconds) + "s";
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu: %s -- %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].title, o.detail.c_str(), secs);
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
