#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "erw/cli.hpp"
#include "erw/distribution_json.hpp"
#include "erw/errors.hpp"
#include "erw/format.hpp"
#include "erw/moment_engine.hpp"
#include "erw/simulator.hpp"

namespace erw::cli {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSweepSingularRadius = 1e-6;
constexpr std::array<std::string_view, 6> kClosedFormNames = {"s2", "st", "s3",
                                                               "su", "t2", "s2t"};

// |a - b| / |b|, falling back to the absolute difference when b == 0.
double relative_error(double a, double b) {
  const double diff = std::fabs(a - b);
  return b == 0.0 ? diff : diff / std::fabs(b);
}

}  // namespace

int cmd_limits(const ExperimentConfig& cfg, std::ostream& out) {
  const auto dist = cfg.distribution();
  const MemoryParameter mp(cfg.alpha);
  const auto ms = moment_set(dist);
  const auto q = limit_q_moments(ms, mp);
  json doc = {{"command", "limits"},
              {"alpha", cfg.alpha},
              {"distribution", distribution_to_json(dist)},
              {"moments", moment_set_to_json(ms)},
              {"q1", q.q1},
              {"q2", q.q2},
              {"q3", q.q3},
              {"q4", q.q4}};
  out << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_exact(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto dist = cfg.distribution();
  const MemoryParameter mp(cfg.alpha);
  const auto ms = moment_set(dist);

  std::vector<std::int64_t> rows = cfg.checkpoints;
  if (rows.empty()) {
    rows.resize(static_cast<std::size_t>(cfg.n));
    for (std::int64_t k = 1; k <= cfg.n; ++k) rows[static_cast<std::size_t>(k - 1)] = k;
  }

  bool closed_form_ok = cfg.compare;
  if (cfg.compare) {
    try {
      (void)closed_form_moments(ms, mp, 1);
    } catch (const SingularityError& e) {
      err << "warning: closed forms unavailable at alpha=" << format_double(cfg.alpha)
          << ": " << e.what() << '\n';
      closed_form_ok = false;
    }
  }

  out << "n";
  for (auto name : ExactMomentRow::kNames) out << ',' << name;
  if (cfg.compare) {
    for (auto name : kClosedFormNames) out << ',' << name << "_cf";
    for (auto name : kClosedFormNames) out << ',' << name << "_relerr";
  }
  out << '\n';

  MomentRecursion rec(ms, mp);
  for (std::int64_t target : rows) {
    while (rec.n() < target) rec.advance();
    const auto row = rec.row();
    out << row.n;
    for (double v : row.values()) out << ',' << format_double(v);
    if (cfg.compare) {
      std::array<double, 6> cf;
      cf.fill(kNaN);
      if (closed_form_ok) cf = closed_form_moments(ms, mp, row.n).values();
      const auto ex = row.values();
      for (double v : cf) out << ',' << format_double(v);
      for (std::size_t i = 0; i < cf.size(); ++i) {
        out << ',' << format_double(closed_form_ok ? relative_error(ex[i], cf[i]) : kNaN);
      }
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
  const auto dist = cfg.distribution();
  const MemoryParameter mp(cfg.alpha);
  const auto ms = moment_set(dist);
  const auto checkpoints = cfg.effective_checkpoints();
  const std::int64_t n_max = checkpoints.back();

  BatchConfig bc;
  bc.n = n_max;
  bc.replicates = cfg.replicates;
  bc.master_seed = cfg.master_seed;
  bc.checkpoints = checkpoints;
  bc.threads = cfg.threads;
  const auto acc = simulate_batch(dist, mp, bc);
  const auto estimates = empirical_q_moments(acc, mp);

  std::optional<LimitMoments> limits;
  if (mp.superdiffusive()) {
    try {
      limits = limit_q_moments(ms, mp);
    } catch (const DomainError&) {
      limits.reset();
    }
  }

  // Exact normalised moments E(S~_n^p) / n^{p alpha} at each checkpoint.
  std::vector<ExactMomentRow> exact;
  MomentRecursion rec(ms, mp);
  for (std::int64_t c : checkpoints) {
    while (rec.n() < c) rec.advance();
    exact.push_back(rec.row());
  }

  out << "# erw simulate master_seed=" << format_seed(cfg.master_seed) << '\n';
  out << "# distribution=" << distribution_to_json(dist).dump()
      << " alpha=" << format_double(cfg.alpha) << " replicates=" << cfg.replicates
      << '\n';
  out << "n,p,estimate,stderr,n_replicates,exact,limit,z\n";
  for (const auto& e : estimates) {
    const auto idx = static_cast<std::size_t>(
        std::find(checkpoints.begin(), checkpoints.end(), e.n) - checkpoints.begin());
    const auto& row = exact[idx];
    const double moment = e.p == 1 ? 0.0 : e.p == 2 ? row.s2 : e.p == 3 ? row.s3 : row.s4;
    const double norm = std::pow(static_cast<double>(e.n), e.p * cfg.alpha);
    const double ex = moment / norm;
    double limit = kNaN;
    if (limits) {
      limit = e.p == 1 ? limits->q1 : e.p == 2 ? limits->q2 : e.p == 3 ? limits->q3 : limits->q4;
    }
    const double z = (e.degenerate_se || !(e.std_error > 0.0))
                         ? kNaN
                         : (e.estimate - ex) / e.std_error;
    out << e.n << ',' << e.p << ',' << format_double(e.estimate) << ','
        << format_double(e.std_error) << ',' << e.n_replicates << ','
        << format_double(ex) << ',' << format_double(limit) << ',' << format_double(z)
        << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  std::vector<double> alphas = cfg.alphas;
  if (alphas.empty()) {
    for (int i = 11; i <= 20; ++i) alphas.push_back(i / 20.0);
  }
  out << "dist_index,kind,alpha,status,q1,q2,q3,q4,k4\n";
  for (std::size_t d = 0; d < cfg.distributions.size(); ++d) {
    const auto dist = cfg.distribution(d);
    const auto ms = moment_set(dist);
    for (double alpha : alphas) {
      const MemoryParameter mp(alpha);
      std::string status = "ok";
      LimitMoments q{kNaN, kNaN, kNaN, kNaN};
      double k4 = kNaN;
      if (std::fabs(alpha - 0.5) <= kSweepSingularRadius) {
        status = "singular";
      } else if (!mp.superdiffusive()) {
        status = "not_superdiffusive";
      } else {
        q = limit_q_moments(ms, mp);
        k4 = fourth_moment_coefficient(ms, mp);
      }
      out << d << ',' << dist.kind_name() << ',' << format_double(alpha) << ','
          << status << ',' << format_double(q.q1) << ',' << format_double(q.q2) << ','
          << format_double(q.q3) << ',' << format_double(q.q4) << ','
          << format_double(k4) << '\n';
    }
  }
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& out) {
  const auto report = run_verify(cfg);
  out << report.dump(2) << '\n';
  return report.at("status") == "PASS" ? kExitOk : kExitVerifyFailed;
}

}  // namespace erw::cli
