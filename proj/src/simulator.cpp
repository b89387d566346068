#include "erw/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "erw/errors.hpp"
#include "erw/format.hpp"
#include "erw/gamma_toolkit.hpp"

namespace erw {
namespace {

unsigned resolve_threads(unsigned requested, std::int64_t work_items) {
  unsigned t = requested != 0 ? requested : std::thread::hardware_concurrency();
  t = std::max(1u, t);
  if (work_items < static_cast<std::int64_t>(t)) {
    t = static_cast<unsigned>(std::max<std::int64_t>(1, work_items));
  }
  return t;
}

// Splits [first, first + count) into contiguous slices, runs
// body(local, begin, end) on each in its own thread and returns the locals in
// slice order. Results must not depend on the slicing; callers guarantee that
// with exact accumulation.
template <class Local, class MakeLocal, class Body>
std::vector<Local> run_sliced(std::int64_t first, std::int64_t count,
                              unsigned threads, MakeLocal make_local, Body body) {
  const unsigned t = resolve_threads(threads, count);
  std::vector<Local> locals;
  locals.reserve(t);
  for (unsigned i = 0; i < t; ++i) locals.push_back(make_local());
  std::vector<std::exception_ptr> errors(t);
  auto slice = [&](unsigned i) {
    const std::int64_t begin = first + count * i / t;
    const std::int64_t end = first + count * (i + 1) / t;
    try {
      body(locals[i], begin, end);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (t == 1) {
    slice(0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(t);
    for (unsigned i = 0; i < t; ++i) workers.emplace_back(slice, i);
    for (auto& w : workers) w.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return locals;
}

struct StatSum {
  ExactSum sum;
  ExactSum sum_sq;
  std::int64_t count = 0;

  void add(double x) {
    sum.add(x);
    sum_sq.add(x * x);
    ++count;
  }
  void merge(const StatSum& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  MeanEstimate estimate() const {
    MeanEstimate e;
    e.count = count;
    if (count == 0) {
      e.mean = std::numeric_limits<double>::quiet_NaN();
      e.std_error = std::numeric_limits<double>::quiet_NaN();
      return e;
    }
    const double nn = static_cast<double>(count);
    e.mean = sum.value() / nn;
    if (count < 2) {
      e.std_error = std::numeric_limits<double>::quiet_NaN();
      return e;
    }
    const double var = std::max(0.0, (sum_sq.value() / nn - e.mean * e.mean) * nn / (nn - 1.0));
    e.std_error = std::sqrt(var / nn);
    return e;
  }
};

void validate_checkpoints(const std::vector<std::int64_t>& cps, std::int64_t n) {
  if (cps.empty()) throw DomainError("checkpoints must not be empty");
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] < 1 || cps[i] > n) {
      std::ostringstream msg;
      msg << "checkpoint " << cps[i] << " outside [1, " << n << "]";
      throw DomainError(msg.str());
    }
    if (i > 0 && cps[i] <= cps[i - 1]) {
      throw DomainError("checkpoints must be strictly ascending");
    }
  }
}

}  // namespace

WalkState make_walk_state(std::vector<double> steps, const MomentSet& ms,
                          MemoryParameter mp) {
  WalkState w;
  w.n = static_cast<std::int64_t>(steps.size());
  for (double x : steps) {
    w.s += x;
    w.s_tilde += x - ms.m1;
    w.t_tilde += x * x - ms.m2;
    w.u_tilde += x * x * x - ms.m3;
  }
  w.q = w.n > 0 ? martingale_scale(w.n, mp.alpha()) * w.s_tilde : 0.0;
  w.steps = std::move(steps);
  return w;
}

double draw_next_step(std::span<const double> past, const StepDistribution& dist,
                      double alpha, RandomSource& rng) {
  if (past.empty()) return sample_step(dist, rng);
  if (rng.uniform() < alpha) {
    return past[rng.below(past.size())];
  }
  return sample_step(dist, rng);
}

ElephantWalk::ElephantWalk(const StepDistribution& dist, const MomentSet& ms,
                           MemoryParameter mp, std::uint64_t seed)
    : dist_(&dist), ms_(ms), alpha_(mp.alpha()), rng_(seed) {}

void ElephantWalk::reset(std::uint64_t seed) {
  rng_ = RandomSource(seed);
  steps_.clear();
  s_ = s_tilde_ = t_tilde_ = u_tilde_ = 0.0;
}

double ElephantWalk::step() {
  const double x = draw_next_step(steps_, *dist_, alpha_, rng_);
  steps_.push_back(x);
  s_ += x;
  s_tilde_ += x - ms_.m1;
  t_tilde_ += x * x - ms_.m2;
  u_tilde_ += x * x * x - ms_.m3;
  return x;
}

double ElephantWalk::q() const {
  if (steps_.empty()) return 0.0;
  return martingale_scale(n(), alpha_) * s_tilde_;
}

WalkState ElephantWalk::state() const {
  WalkState w;
  w.n = n();
  w.steps = steps_;
  w.s = s_;
  w.s_tilde = s_tilde_;
  w.t_tilde = t_tilde_;
  w.u_tilde = u_tilde_;
  w.q = q();
  return w;
}

WalkState Trajectory::state(std::int64_t k) const {
  if (k < 1 || k > size()) throw DomainError("Trajectory::state: k out of range");
  const auto idx = static_cast<std::size_t>(k - 1);
  WalkState w;
  w.n = k;
  w.steps.assign(steps.begin(), steps.begin() + k);
  for (double x : w.steps) w.s += x;
  w.s_tilde = s_tilde[idx];
  w.t_tilde = t_tilde[idx];
  w.u_tilde = u_tilde[idx];
  w.q = q[idx];
  return w;
}

Trajectory simulate_path(const StepDistribution& dist, MemoryParameter mp,
                         std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("simulate_path: n must be >= 1");
  const MomentSet ms = moment_set(dist);
  ElephantWalk walk(dist, ms, mp, seed);
  walk.reserve(n);
  Trajectory traj;
  traj.alpha = mp.alpha();
  traj.m1 = ms.m1;
  const auto len = static_cast<std::size_t>(n);
  traj.s_tilde.reserve(len);
  traj.t_tilde.reserve(len);
  traj.u_tilde.reserve(len);
  traj.q.reserve(len);
  for (std::int64_t k = 1; k <= n; ++k) {
    walk.step();
    const auto sums = walk.sums();
    traj.s_tilde.push_back(sums.s_tilde);
    traj.t_tilde.push_back(sums.t_tilde);
    traj.u_tilde.push_back(sums.u_tilde);
    traj.q.push_back(martingale_scale(k, mp.alpha()) * sums.s_tilde);
  }
  traj.steps.assign(walk.steps().begin(), walk.steps().end());
  return traj;
}

BatchAccumulator::BatchAccumulator(std::vector<std::int64_t> checkpoints)
    : checkpoints_(std::move(checkpoints)), sums_(checkpoints_.size()) {}

void BatchAccumulator::add_replicate(std::span<const double> values) {
  if (values.size() != checkpoints_.size()) {
    throw DomainError("add_replicate: one value per checkpoint required");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    double power = 1.0;
    for (int p = 0; p < kMaxPower; ++p) {
      power *= values[i];
      sums_[i][static_cast<std::size_t>(p)].add(power);
    }
  }
  ++replicates_;
}

BatchAccumulator& BatchAccumulator::merge(const BatchAccumulator& other) {
  if (other.checkpoints_ != checkpoints_) {
    throw DomainError("BatchAccumulator::merge: checkpoint sets differ");
  }
  for (std::size_t i = 0; i < sums_.size(); ++i) {
    for (int p = 0; p < kMaxPower; ++p) {
      sums_[i][static_cast<std::size_t>(p)] += other.sums_[i][static_cast<std::size_t>(p)];
    }
  }
  replicates_ += other.replicates_;
  return *this;
}

double BatchAccumulator::power_sum(std::size_t i, int p) const {
  if (i >= sums_.size() || p < 1 || p > kMaxPower) {
    throw DomainError("BatchAccumulator::power_sum: index out of range");
  }
  return sums_[i][static_cast<std::size_t>(p - 1)].value();
}

bool BatchAccumulator::operator==(const BatchAccumulator& other) const {
  return checkpoints_ == other.checkpoints_ && replicates_ == other.replicates_ &&
         sums_ == other.sums_;
}

BatchAccumulator simulate_batch(const StepDistribution& dist, MemoryParameter mp,
                                const BatchConfig& config) {
  if (config.n < 1) throw DomainError("simulate_batch: n must be >= 1");
  if (config.replicates < 1) throw DomainError("simulate_batch: replicates must be >= 1");
  validate_checkpoints(config.checkpoints, config.n);
  const MomentSet ms = moment_set(dist);

  auto locals = run_sliced<BatchAccumulator>(
      config.first_replicate, config.replicates, config.threads,
      [&] { return BatchAccumulator(config.checkpoints); },
      [&](BatchAccumulator& acc, std::int64_t begin, std::int64_t end) {
        ElephantWalk walk(dist, ms, mp, 0);
        walk.reserve(config.n);
        std::vector<double> at_checkpoint(config.checkpoints.size());
        for (std::int64_t r = begin; r < end; ++r) {
          walk.reset(stream_seed(config.master_seed, static_cast<std::uint64_t>(r)));
          std::size_t next = 0;
          for (std::int64_t k = 1; k <= config.n; ++k) {
            walk.step();
            if (k == config.checkpoints[next]) {
              at_checkpoint[next] = walk.sums().s_tilde;
              if (++next == at_checkpoint.size()) break;
            }
          }
          acc.add_replicate(at_checkpoint);
        }
      });

  BatchAccumulator total(config.checkpoints);
  for (const auto& l : locals) total.merge(l);
  return total;
}

std::vector<QMomentEstimate> empirical_q_moments(const BatchAccumulator& acc,
                                                 MemoryParameter mp) {
  if (acc.replicates() < 1) throw DomainError("empirical_q_moments: empty accumulator");
  std::vector<QMomentEstimate> out;
  const double count = static_cast<double>(acc.replicates());
  const auto& cps = acc.checkpoints();
  for (std::size_t i = 0; i < cps.size(); ++i) {
    for (int p = 1; p <= 4; ++p) {
      QMomentEstimate e;
      e.n = cps[i];
      e.p = p;
      e.n_replicates = acc.replicates();
      const double scale = std::pow(static_cast<double>(cps[i]), p * mp.alpha());
      const double mean = acc.power_sum(i, p) / count;
      e.estimate = mean / scale;
      if (acc.replicates() < 2) {
        e.degenerate_se = true;
        e.std_error = std::numeric_limits<double>::quiet_NaN();
      } else {
        const double second = acc.power_sum(i, 2 * p) / count;
        const double var = std::max(0.0, (second - mean * mean) * count / (count - 1.0));
        e.std_error = std::sqrt(var / count) / scale;
      }
      out.push_back(e);
    }
  }
  return out;
}

void write_q_moments_csv(std::ostream& os, const std::vector<QMomentEstimate>& rows) {
  os << "n,p,estimate,stderr,n_replicates\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.p << ',' << format_double(r.estimate) << ','
       << format_double(r.std_error) << ',' << r.n_replicates << '\n';
  }
}

MartingaleView martingale_diagnostics(const Trajectory& traj, MemoryParameter mp,
                                      const MomentSet& ms) {
  const auto n = traj.size();
  if (n < 1) throw DomainError("martingale_diagnostics: empty trajectory");
  const double alpha = mp.alpha();
  MartingaleView view;
  view.eps.reserve(static_cast<std::size_t>(n));
  view.partial_sums.reserve(static_cast<std::size_t>(n));
  CompensatedSum<double> partial;
  CompensatedSum<double> e2, e4;
  double scale = std::numeric_limits<double>::min();
  double worst_abs = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    const auto idx = static_cast<std::size_t>(k - 1);
    const double eps =
        k == 1 ? traj.steps[0] - ms.m1
               : traj.s_tilde[idx] -
                     (1.0 + alpha / static_cast<double>(k - 1)) * traj.s_tilde[idx - 1];
    view.eps.push_back(eps);
    partial += martingale_scale(k, alpha) * eps;
    view.partial_sums.push_back(partial.value());
    scale = std::max(scale, std::abs(traj.q[idx]));
    worst_abs = std::max(worst_abs, std::abs(partial.value() - traj.q[idx]));
    e2 += eps * eps;
    e4 += eps * eps * eps * eps;
  }
  view.max_relative_error = worst_abs / scale;
  view.mean_eps2 = e2.value() / static_cast<double>(n);
  view.mean_eps4 = e4.value() / static_cast<double>(n);
  if (view.max_relative_error > kReconstructionTolerance) {
    std::ostringstream msg;
    msg << "martingale reconstruction drifted by " << view.max_relative_error
        << " (relative)";
    throw ReconstructionError(msg.str());
  }
  return view;
}

namespace {

struct SurveyLocal {
  std::vector<std::array<StatSum, 4>> marginal;
  std::vector<std::array<StatSum, 3>> points;
  double max_error = 0.0;

  void merge(const SurveyLocal& o) {
    for (std::size_t k = 0; k < marginal.size(); ++k) {
      for (std::size_t p = 0; p < 4; ++p) marginal[k][p].merge(o.marginal[k][p]);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = 0; j < 3; ++j) points[i][j].merge(o.points[i][j]);
    }
    max_error = std::max(max_error, o.max_error);
  }
};

}  // namespace

PathSurvey survey_paths(const StepDistribution& dist, const MomentSet& ms,
                        MemoryParameter mp, const SurveyConfig& config) {
  if (config.n < 2) throw DomainError("survey_paths: n must be >= 2");
  if (config.replicates < 1) throw DomainError("survey_paths: replicates must be >= 1");
  for (auto k : config.sample_points) {
    if (k < 1 || k >= config.n) {
      throw DomainError("survey_paths: sample points must lie in [1, n-1]");
    }
  }
  const double alpha = mp.alpha();
  const auto n = config.n;
  // Martingale scale is the same on every path.
  std::vector<double> scale(static_cast<std::size_t>(n));
  for (std::int64_t k = 1; k <= n; ++k) {
    scale[static_cast<std::size_t>(k - 1)] = martingale_scale(k, alpha);
  }
  std::vector<std::int64_t> sample_slot(static_cast<std::size_t>(n + 1), -1);
  for (std::size_t i = 0; i < config.sample_points.size(); ++i) {
    sample_slot[static_cast<std::size_t>(config.sample_points[i])] =
        static_cast<std::int64_t>(i);
  }

  auto locals = run_sliced<SurveyLocal>(
      0, config.replicates, config.threads,
      [&] {
        SurveyLocal l;
        l.marginal.resize(static_cast<std::size_t>(n));
        l.points.resize(config.sample_points.size());
        return l;
      },
      [&](SurveyLocal& local, std::int64_t begin, std::int64_t end) {
        ElephantWalk walk(dist, ms, mp, 0);
        walk.reserve(n);
        for (std::int64_t r = begin; r < end; ++r) {
          walk.reset(stream_seed(config.master_seed, static_cast<std::uint64_t>(r)));
          CompensatedSum<double> partial;
          double prev_s = 0.0, prev_q = 0.0, path_scale = std::numeric_limits<double>::min();
          double worst = 0.0;
          std::int64_t pending_slot = -1;
          for (std::int64_t k = 1; k <= n; ++k) {
            const double x = walk.step();
            const auto idx = static_cast<std::size_t>(k - 1);
            auto& marg = local.marginal[idx];
            double power = 1.0;
            for (std::size_t p = 0; p < 4; ++p) {
              power *= x;
              marg[p].add(power);
            }
            const double s = walk.sums().s_tilde;
            const double eps =
                k == 1 ? s : s - (1.0 + alpha / static_cast<double>(k - 1)) * prev_s;
            const double q = scale[idx] * s;
            partial += scale[idx] * eps;
            path_scale = std::max(path_scale, std::abs(q));
            worst = std::max(worst, std::abs(partial.value() - q));
            if (pending_slot >= 0) {
              local.points[static_cast<std::size_t>(pending_slot)][2].add(q - prev_q);
              pending_slot = -1;
            }
            const auto slot = sample_slot[static_cast<std::size_t>(k)];
            if (slot >= 0) {
              const double e2 = eps * eps;
              local.points[static_cast<std::size_t>(slot)][0].add(e2);
              local.points[static_cast<std::size_t>(slot)][1].add(e2 * e2);
              pending_slot = slot;
            }
            prev_s = s;
            prev_q = q;
          }
          local.max_error = std::max(local.max_error, worst / path_scale);
        }
      });

  SurveyLocal total = locals.front();
  for (std::size_t i = 1; i < locals.size(); ++i) total.merge(locals[i]);

  PathSurvey out;
  out.replicates = config.replicates;
  out.max_reconstruction_error = total.max_error;
  out.marginal.resize(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < out.marginal.size(); ++k) {
    for (std::size_t p = 0; p < 4; ++p) out.marginal[k][p] = total.marginal[k][p].estimate();
  }
  for (std::size_t i = 0; i < config.sample_points.size(); ++i) {
    SurveyPoint sp;
    sp.n = config.sample_points[i];
    sp.abs_eps2 = total.points[i][0].estimate();
    sp.abs_eps4 = total.points[i][1].estimate();
    sp.q_increment = total.points[i][2].estimate();
    out.points.push_back(sp);
  }
  return out;
}

double ContinuationReport::max_abs_z() const {
  double m = 0.0;
  for (double v : z) {
    if (std::isfinite(v)) m = std::max(m, std::abs(v));
  }
  return m;
}

ContinuationReport conditional_continuation_test(const WalkState& prefix,
                                                 const StepDistribution& dist,
                                                 const MomentSet& ms,
                                                 MemoryParameter mp,
                                                 std::int64_t continuations,
                                                 std::uint64_t seed) {
  if (prefix.n < 1 || prefix.steps.size() != static_cast<std::size_t>(prefix.n)) {
    throw DomainError("conditional_continuation_test: prefix must hold n >= 1 steps");
  }
  if (continuations < 1) {
    throw DomainError("conditional_continuation_test: need at least one continuation");
  }
  ContinuationReport report;
  report.predicted = conditional_step_moments(prefix.sums(), prefix.n, ms, mp);
  std::array<StatSum, 6> stats;
  for (std::int64_t i = 0; i < continuations; ++i) {
    RandomSource rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    const double x = draw_next_step(prefix.steps, dist, mp.alpha(), rng);
    const double c = x - ms.m1;
    const double sq = x * x - ms.m2;
    stats[0].add(c);
    stats[1].add(c * c);
    stats[2].add(c * c * c);
    stats[3].add(sq);
    stats[4].add(sq * c);
    stats[5].add(x * x * x - ms.m3);
  }
  const auto predicted = report.predicted.values();
  for (std::size_t j = 0; j < 6; ++j) {
    report.empirical[j] = stats[j].estimate();
    const double se = report.empirical[j].std_error;
    const double diff = report.empirical[j].mean - predicted[j];
    if (se > 0.0) {
      report.z[j] = diff / se;
    } else {
      // Degenerate sample: exact agreement scores 0, anything else is infinite.
      report.z[j] = std::abs(diff) <= 1e-12 * (1.0 + std::abs(predicted[j]))
                        ? 0.0
                        : std::numeric_limits<double>::infinity();
    }
  }
  return report;
}

}  // namespace erw
