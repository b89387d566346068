#pragma once

#include <cstdint>
#include <functional>

namespace erw {

/// sign * exp(log_magnitude). A ratio whose denominator sits on a pole of
/// Gamma is represented as zero: log_magnitude = -inf, sign = +1.
struct GammaRatio {
  double log_magnitude = 0.0;
  int sign = 1;

  double value() const;
};

/// ln Gamma(n + delta) - ln Gamma(n) for n >= 1 and n + delta > 0.
///
/// Large arguments use the difference of Stirling series rather than the
/// difference of two lgamma values, so the exponentiated ratio keeps ~1e-14
/// relative accuracy up to n ~ 1e7 and beyond. Negative delta is accepted as
/// long as n + delta > 0. Throws DomainError for n < 1.
double log_gamma_ratio(double n, double delta);

/// Gamma(x) / Gamma(y) for any real x, y with x not a pole of Gamma.
/// Throws DomainError if x is a nonpositive integer.
GammaRatio gamma_ratio(double x, double y);

/// a_n = Gamma(n) / Gamma(n + alpha), the factor that turns the centered walk
/// into a martingale. a_1 = 1 / Gamma(1 + alpha), a_n ~ n^-alpha.
double martingale_scale(std::int64_t n, double alpha);

/// Radius around b - a - 1 = 0 (and b - a - 2 = 0, beta - 1 = 0) inside which
/// the closed forms below refuse to evaluate.
inline constexpr double kGammaSumSingularRadius = 1e-9;

/// sum_{j=1}^{n} Gamma(j+a)/Gamma(j+b) in closed form, a, b >= 0.
/// Throws DomainError if |b - a - 1| < 1e-9 or a, b are negative.
double gamma_sum_linear(double a, double b, std::int64_t n);

/// sum_{j=1}^{n} j * Gamma(j+a)/Gamma(j+b) in closed form, a, b >= 0.
/// Throws DomainError near b = a + 1 or b = a + 2.
double gamma_sum_weighted(double a, double b, std::int64_t n);

/// b_{n+1} = (1 + beta/n) b_n + c_n with initial value b_1.
struct RecursionSpec {
  double beta = 1.0;
  double b1 = 0.0;
  /// c(j) for j = 1, 2, ...
  std::function<double(std::int64_t)> c;
};

/// Explicit solution b_n = Gamma(n+beta)/Gamma(n) * (b_1/Gamma(1+beta)
/// + sum_{j<n} Gamma(j+1)/Gamma(j+1+beta) c_j). O(n) terms.
double solve_recursion(const RecursionSpec& spec, std::int64_t n);

/// Constant inhomogeneity with b_1 = c_n = c:
///   b_n = c/((beta-1) Gamma(beta)) * Gamma(n+beta)/Gamma(n) - c n/(beta-1).
/// Throws DomainError when |beta - 1| < 1e-9.
double solve_constant_recursion(double beta, double c, std::int64_t n);

namespace oracle {

/// Term-by-term evaluation of sum_{j=1}^{n} Gamma(j+a)/Gamma(j+b), built from
/// the ratio recurrence in extended precision. Reference only: O(n).
double gamma_sum_linear_direct(double a, double b, std::int64_t n);

/// Term-by-term evaluation of sum_{j=1}^{n} j Gamma(j+a)/Gamma(j+b).
double gamma_sum_weighted_direct(double a, double b, std::int64_t n);

/// Steps b_{n+1} = (1 + beta/n) b_n + c_n forward from b_1.
double iterate_recursion(const RecursionSpec& spec, std::int64_t n);

}  // namespace oracle
}  // namespace erw
