#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "erw/rng.hpp"

namespace erw {

/// Raw moments m_k = E(xi^k), k = 1..4.
struct RawMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

/// Raw, centered and mixed moments of a step law.
///
///   M2, M3, M4  centered moments E((xi - m1)^k)
///   M12   E((xi - m1)(xi^2 - m2))
///   M13   E((xi - m1)(xi^3 - m3))
///   M22   E((xi^2 - m2)^2)
///   M112  E((xi - m1)^2 (xi^2 - m2))
struct MomentSet {
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  double M2 = 0.0, M3 = 0.0, M4 = 0.0;
  double M12 = 0.0, M13 = 0.0, M22 = 0.0, M112 = 0.0;

  RawMoments raw() const { return {m1, m2, m3, m4}; }
};

/// Derives every centered and mixed moment from (m1..m4) by polynomial
/// identities. Throws DomainError if the implied variance is below -1e-12.
MomentSet derive_moment_set(const RawMoments& raw);

/// Residual of one algebraic relation between the entries of a MomentSet.
/// For equalities `residual` is |lhs - rhs|; for inequalities it is the
/// amount of violation (0 when satisfied).
struct IdentityCheck {
  std::string name;
  double residual = 0.0;
};

/// The four polynomial identities tying mixed moments together, followed by
/// the inequalities M2 >= 0, M22 >= 0 and M4 >= M2^2.
std::vector<IdentityCheck> check_moment_identities(const MomentSet& ms);

/// Step law of the walk. Immutable once constructed.
class StepDistribution {
 public:
  struct Rademacher {};
  struct Bernoulli {
    double p;
  };
  struct Uniform {
    double lo, hi;
  };
  struct Gaussian {
    double mean, stddev;
  };
  struct Discrete {
    std::vector<double> points;
    std::vector<double> weights;
    std::vector<double> cumulative;
  };
  using Kind = std::variant<Rademacher, Bernoulli, Uniform, Gaussian, Discrete>;

  /// Weights must sum to one within this tolerance; nothing is renormalized.
  static constexpr double kWeightTolerance = 1e-12;

  static StepDistribution rademacher();
  static StepDistribution bernoulli(double p);
  static StepDistribution uniform(double lo, double hi);
  static StepDistribution gaussian(double mean, double stddev);
  static StepDistribution discrete(std::vector<double> points,
                                   std::vector<double> weights);

  const Kind& kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept;

  /// Support points and weights when the law has finite support
  /// (rademacher, bernoulli, discrete); nullopt otherwise.
  struct FiniteSupport {
    std::vector<double> points;
    std::vector<double> weights;
  };
  std::optional<FiniteSupport> finite_support() const;

  /// Short human-readable label, e.g. "bernoulli(0.3)".
  std::string label() const;

 private:
  explicit StepDistribution(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

/// Exact closed-form raw moments; weighted power sums for discrete laws.
RawMoments raw_moments(const StepDistribution& dist);

/// Convenience: derive_moment_set(raw_moments(dist)).
MomentSet moment_set(const StepDistribution& dist);

/// One independent draw. Draw pattern per kind: rademacher, bernoulli,
/// uniform and discrete consume one 64-bit word, gaussian consumes two.
double sample_step(const StepDistribution& dist, RandomSource& rng);

}  // namespace erw
