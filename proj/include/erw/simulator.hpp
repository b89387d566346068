#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "erw/distributions.hpp"
#include "erw/moment_engine.hpp"
#include "erw/rng.hpp"
#include "erw/summation.hpp"

namespace erw {

/// Snapshot of a realized prefix X_1..X_n.
struct WalkState {
  std::int64_t n = 0;
  std::vector<double> steps;
  double s = 0.0;        ///< S_n
  double s_tilde = 0.0;  ///< S_n - n m1
  double t_tilde = 0.0;  ///< sum X_k^2 - n m2
  double u_tilde = 0.0;  ///< sum X_k^3 - n m3
  double q = 0.0;        ///< a_n * S~_n

  CenteredSums sums() const { return {s_tilde, t_tilde, u_tilde}; }
};

/// Builds the state of an explicitly given prefix (e.g. a frozen history).
WalkState make_walk_state(std::vector<double> steps, const MomentSet& ms,
                          MemoryParameter mp);

/// Draws X_{n+1} given the past steps: with probability alpha a uniformly
/// chosen past step, otherwise a fresh sample. Consumes one word for the
/// branch, then one word for the index or the sampler's own pattern.
double draw_next_step(std::span<const double> past, const StepDistribution& dist,
                      double alpha, RandomSource& rng);

/// Incremental elephant walk generator. Stores every step (O(n) memory) so
/// that repetition picks uniformly among all of them.
class ElephantWalk {
 public:
  ElephantWalk(const StepDistribution& dist, const MomentSet& ms,
               MemoryParameter mp, std::uint64_t seed);

  /// Restart from an empty path with a new seed, keeping the buffer.
  void reset(std::uint64_t seed);
  /// Appends one step and returns it.
  double step();

  std::int64_t n() const noexcept { return static_cast<std::int64_t>(steps_.size()); }
  std::span<const double> steps() const noexcept { return steps_; }
  CenteredSums sums() const noexcept { return {s_tilde_, t_tilde_, u_tilde_}; }
  /// a_n S~_n; evaluates the martingale scale on every call.
  double q() const;
  WalkState state() const;

  void reserve(std::int64_t n) { steps_.reserve(static_cast<std::size_t>(n)); }

 private:
  const StepDistribution* dist_;
  MomentSet ms_;
  double alpha_;
  RandomSource rng_;
  std::vector<double> steps_;
  double s_ = 0.0, s_tilde_ = 0.0, t_tilde_ = 0.0, u_tilde_ = 0.0;
};

/// Full path with the running sums after every step (index k-1 holds n = k).
struct Trajectory {
  double alpha = 0.0;
  double m1 = 0.0;
  std::vector<double> steps;
  std::vector<double> s_tilde, t_tilde, u_tilde, q;

  std::int64_t size() const noexcept { return static_cast<std::int64_t>(steps.size()); }
  /// Prefix state after k steps, 1 <= k <= size().
  WalkState state(std::int64_t k) const;
};

/// Deterministic function of (dist, alpha, n, seed).
Trajectory simulate_path(const StepDistribution& dist, MemoryParameter mp,
                         std::int64_t n, std::uint64_t seed);

/// Power sums of S~_n^p, p = 1..8, at fixed checkpoints over replicates.
/// Sums are exact, so merging is associative and commutative bit for bit.
class BatchAccumulator {
 public:
  static constexpr int kMaxPower = 8;

  BatchAccumulator() = default;
  explicit BatchAccumulator(std::vector<std::int64_t> checkpoints);

  /// One replicate's S~ values at each checkpoint, in checkpoint order.
  void add_replicate(std::span<const double> s_tilde_at_checkpoints);
  /// Throws DomainError if the checkpoint sets differ.
  BatchAccumulator& merge(const BatchAccumulator& other);

  const std::vector<std::int64_t>& checkpoints() const noexcept { return checkpoints_; }
  std::int64_t replicates() const noexcept { return replicates_; }
  /// sum over replicates of S~^p at checkpoint index `i`, 1 <= p <= 8.
  double power_sum(std::size_t i, int p) const;

  bool operator==(const BatchAccumulator& other) const;

 private:
  std::vector<std::int64_t> checkpoints_;
  std::int64_t replicates_ = 0;
  std::vector<std::array<ExactSum, kMaxPower>> sums_;
};

struct BatchConfig {
  std::int64_t n = 1;
  std::int64_t replicates = 1;
  std::uint64_t master_seed = 0;
  /// Sorted ascending, each in [1, n].
  std::vector<std::int64_t> checkpoints;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Replicates cover indices [first_replicate, first_replicate + replicates).
  std::int64_t first_replicate = 0;
};

/// Replicate i runs on stream_seed(master_seed, i); the accumulator is
/// bit-identical for any thread count or split of the index range.
BatchAccumulator simulate_batch(const StepDistribution& dist, MemoryParameter mp,
                                const BatchConfig& config);

struct QMomentEstimate {
  std::int64_t n = 0;
  int p = 0;
  double estimate = 0.0;  ///< mean of S~_n^p / n^{p alpha}
  double std_error = 0.0;  ///< NaN when degenerate
  std::int64_t n_replicates = 0;
  bool degenerate_se = false;  ///< fewer than two replicates
};

/// Per checkpoint and p = 1..4.
std::vector<QMomentEstimate> empirical_q_moments(const BatchAccumulator& acc,
                                                 MemoryParameter mp);

/// CSV with header `n,p,estimate,stderr,n_replicates`.
void write_q_moments_csv(std::ostream& os, const std::vector<QMomentEstimate>& rows);

/// Martingale differences eps_k along one path and the partial sums
/// sum_{j<=k} a_j eps_j, which must reproduce Q_k = a_k S~_k.
struct MartingaleView {
  std::vector<double> eps;
  std::vector<double> partial_sums;
  /// max_k |partial_k - Q_k| / max(max_j |Q_j|, tiny)
  double max_relative_error = 0.0;
  double mean_eps2 = 0.0;
  double mean_eps4 = 0.0;
};

inline constexpr double kReconstructionTolerance = 1e-8;

/// Throws ReconstructionError when the reconstruction drifts beyond 1e-8.
MartingaleView martingale_diagnostics(const Trajectory& traj, MemoryParameter mp,
                                      const MomentSet& ms);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t count = 0;
};

struct SurveyConfig {
  std::int64_t n = 100;
  std::int64_t replicates = 1000;
  std::uint64_t master_seed = 0;
  /// Steps at which eps and martingale increments are recorded; each in [1, n-1].
  std::vector<std::int64_t> sample_points;
  unsigned threads = 0;
};

struct SurveyPoint {
  std::int64_t n = 0;
  MeanEstimate abs_eps2;     ///< E|eps_n|^2
  MeanEstimate abs_eps4;     ///< E|eps_n|^4
  MeanEstimate q_increment;  ///< E(Q_{n+1} - Q_n)
};

/// Batch statistics along whole paths: the marginal law of each step, the
/// martingale differences and the martingale increments.
struct PathSurvey {
  std::int64_t replicates = 0;
  /// marginal[k-1][p-1] estimates E(X_k^p), k = 1..n, p = 1..4.
  std::vector<std::array<MeanEstimate, 4>> marginal;
  std::vector<SurveyPoint> points;
  /// Worst martingale reconstruction error over every path and step.
  double max_reconstruction_error = 0.0;
};

PathSurvey survey_paths(const StepDistribution& dist, const MomentSet& ms,
                        MemoryParameter mp, const SurveyConfig& config);

/// Empirical vs predicted conditional moments of X_{n+1} given a frozen prefix.
struct ContinuationReport {
  ConditionalStepMoments predicted;
  std::array<MeanEstimate, 6> empirical;
  std::array<double, 6> z{};  ///< (empirical - predicted) / std_error

  double max_abs_z() const;
};

ContinuationReport conditional_continuation_test(const WalkState& prefix,
                                                 const StepDistribution& dist,
                                                 const MomentSet& ms,
                                                 MemoryParameter mp,
                                                 std::int64_t continuations,
                                                 std::uint64_t seed);

}  // namespace erw
