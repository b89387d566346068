#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "erw/distributions.hpp"

namespace erw {

/// Probability alpha of repeating a uniformly chosen past step.
class MemoryParameter {
 public:
  /// Throws DomainError unless 0 <= alpha <= 1.
  explicit MemoryParameter(double alpha);

  double alpha() const noexcept { return alpha_; }
  bool superdiffusive() const noexcept { return alpha_ > 0.5; }

 private:
  double alpha_;
};

/// Exact expectations of the centered sums after n steps:
///   s2 = E(S~^2), st = E(S~ T~), s3 = E(S~^3), su = E(S~ U~),
///   t2 = E(T~^2), s2t = E(S~^2 T~), s4 = E(S~^4)
/// where S~, T~, U~ are the centered running sums of X, X^2 and X^3.
struct ExactMomentRow {
  std::int64_t n = 1;
  double s2 = 0.0, st = 0.0, s3 = 0.0, su = 0.0, t2 = 0.0, s2t = 0.0, s4 = 0.0;

  std::array<double, 7> values() const { return {s2, st, s3, su, t2, s2t, s4}; }
  static constexpr std::array<std::string_view, 7> kNames = {
      "s2", "st", "s3", "su", "t2", "s2t", "s4"};
};

using ExactMomentTable = std::vector<ExactMomentRow>;

/// Steps the seven coupled moment recursions forward one n at a time.
///
/// The state is carried in extended precision. The coupling terms feeding
/// E(S~^3) and E(S~^2 T~) are tracked as their own first-order sequences
///   D_n = E(S~T~) - 2 m1 E(S~^2),
///   E_n = 2E(S~U~) + E(T~^2) - 4 m1 E(S~T~) - 2 m2 E(S~^2),
/// whose constants reduce to M3 and 3 M112. This keeps E(S~^3) exactly
/// proportional to M3 even when the individual terms cancel (e.g. any law
/// with M3 = 0 but m1 != 0).
class MomentRecursion {
 public:
  MomentRecursion(const MomentSet& ms, MemoryParameter mp);

  std::int64_t n() const noexcept { return n_; }
  ExactMomentRow row() const;
  void advance();

 private:
  MomentSet ms_;
  double alpha_;
  std::int64_t n_ = 1;
  long double s2_, st_, s3_, su_, t2_, s2t_, s4_, d_, e_;
};

/// Rows n = 1..n_max of the exact moment table.
ExactMomentTable exact_moments_upto(const MomentSet& ms, MemoryParameter mp,
                                    std::int64_t n_max);

/// Single row at n without storing the table.
ExactMomentRow exact_moments_at(const MomentSet& ms, MemoryParameter mp,
                                std::int64_t n);

/// Guard radius around the poles alpha = 1/2, 1/3, 1/4 of the closed forms.
inline constexpr double kAlphaSingularRadius = 1e-8;

/// Solution of the quadratic-type recursions (E(S~^2), E(S~T~), E(S~U~),
/// E(T~^2)) with constant `coef`: requires alpha away from 1/2.
double closed_form_quadratic(double coef, MemoryParameter mp, std::int64_t n);

/// Solution shared by E(S~^3) (coef = M3) and E(S~^2 T~) (coef = M112):
/// requires alpha away from 1/2 and 1/3.
double closed_form_cubic(double coef, MemoryParameter mp, std::int64_t n);

/// K4 with E(S~_n^4) ~ K4 Gamma(n+4 alpha)/Gamma(n); requires alpha away
/// from 1/2 and 1/4.
double fourth_moment_coefficient(const MomentSet& ms, MemoryParameter mp);

struct ClosedFormMoments {
  std::int64_t n = 1;
  double s2 = 0.0, st = 0.0, s3 = 0.0, su = 0.0, t2 = 0.0, s2t = 0.0;
  /// Asymptotic coefficient of E(S~^4) and the growth factor it multiplies.
  /// Their product is an asymptotic equivalent, not the finite-n value.
  double k4 = 0.0;
  double growth4 = 0.0;

  std::array<double, 6> values() const { return {s2, st, s3, su, t2, s2t}; }
};

/// All six exact closed forms at n plus the fourth-moment asymptotics.
/// Throws SingularityError (naming the denominator) when alpha is within
/// 1e-8 of 1/2, 1/3 or 1/4.
ClosedFormMoments closed_form_moments(const MomentSet& ms, MemoryParameter mp,
                                      std::int64_t n);

/// E(Q^k), k = 1..4, for the almost-sure limit Q of (S_n - n m1)/n^alpha.
struct LimitMoments {
  double q1 = 0.0, q2 = 0.0, q3 = 0.0, q4 = 0.0;
};

/// Throws RegimeError for alpha <= 1/2 and SingularityError within 1e-8 of it.
LimitMoments limit_q_moments(const MomentSet& ms, MemoryParameter mp);

/// Centered running sums S~_n, T~_n, U~_n of a realized prefix.
struct CenteredSums {
  double s_tilde = 0.0, t_tilde = 0.0, u_tilde = 0.0;
};

/// Conditional expectations of the next step given the first n steps.
struct ConditionalStepMoments {
  double centered1 = 0.0;       ///< E(X - m1 | F_n)
  double centered2 = 0.0;       ///< E((X - m1)^2 | F_n)
  double centered3 = 0.0;       ///< E((X - m1)^3 | F_n)
  double square = 0.0;          ///< E(X^2 - m2 | F_n)
  double square_centered = 0.0; ///< E((X^2 - m2)(X - m1) | F_n)
  double cube = 0.0;            ///< E(X^3 - m3 | F_n)

  std::array<double, 6> values() const {
    return {centered1, centered2, centered3, square, square_centered, cube};
  }
  static constexpr std::array<std::string_view, 6> kNames = {
      "centered1", "centered2", "centered3", "square", "square_centered", "cube"};
};

ConditionalStepMoments conditional_step_moments(const CenteredSums& sums,
                                                std::int64_t n,
                                                const MomentSet& ms,
                                                MemoryParameter mp);

/// Limits of the enumeration oracle.
inline constexpr std::int64_t kBruteForceMaxSteps = 8;
inline constexpr std::size_t kBruteForceMaxSupport = 4;

/// Exact row at n by enumerating every repeat/fresh outcome tree of a
/// finite-support law. Throws SizeGuardError for n > 8, support > 4 or a law
/// without finite support.
ExactMomentRow brute_force_moments(const StepDistribution& dist,
                                   MemoryParameter mp, std::int64_t n);

}  // namespace erw
