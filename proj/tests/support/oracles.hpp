#pragma once

// Reference computations written independently of the library: literal
// recursions, term-by-term sums and quadrature. Slow but transparent.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "erw/distributions.hpp"
#include "erw/moment_engine.hpp"

namespace erw::testing {

// E(f(xi)) for xi ~ Uniform(lo, hi) by 5-point Gauss-Legendre, exact for
// polynomials of degree <= 9.
template <typename F>
long double uniform_expectation(double lo, double hi, F f) {
  static constexpr std::array<long double, 5> x = {
      0.0L, -0.5384693101056830910363144L, 0.5384693101056830910363144L,
      -0.9061798459386639927976269L, 0.9061798459386639927976269L};
  static constexpr std::array<long double, 5> w = {
      0.5688888888888888888888889L, 0.4786286704993664680412915L,
      0.4786286704993664680412915L, 0.2369268850561890875142640L,
      0.2369268850561890875142640L};
  const long double mid = 0.5L * (lo + hi);
  const long double half = 0.5L * (hi - lo);
  long double total = 0.0L;
  for (std::size_t i = 0; i < 5; ++i) total += w[i] * f(mid + half * x[i]);
  return total / 2.0L;
}

// Mixed moments straight from their definitions as expectations.
template <typename Expect>
MomentSet moments_by_definition(Expect expect) {
  const long double m1 = expect([](long double v) { return v; });
  const long double m2 = expect([](long double v) { return v * v; });
  const long double m3 = expect([](long double v) { return v * v * v; });
  const long double m4 = expect([](long double v) { return v * v * v * v; });
  MomentSet ms;
  ms.m1 = static_cast<double>(m1);
  ms.m2 = static_cast<double>(m2);
  ms.m3 = static_cast<double>(m3);
  ms.m4 = static_cast<double>(m4);
  auto e = [&](auto g) { return static_cast<double>(expect(g)); };
  ms.M2 = e([&](long double v) { return (v - m1) * (v - m1); });
  ms.M3 = e([&](long double v) { return (v - m1) * (v - m1) * (v - m1); });
  ms.M4 = e([&](long double v) { return std::pow(v - m1, 4.0L); });
  ms.M12 = e([&](long double v) { return (v - m1) * (v * v - m2); });
  ms.M13 = e([&](long double v) { return (v - m1) * (v * v * v - m3); });
  ms.M22 = e([&](long double v) { return (v * v - m2) * (v * v - m2); });
  ms.M112 = e([&](long double v) { return (v - m1) * (v - m1) * (v * v - m2); });
  return ms;
}

inline MomentSet discrete_moments_by_definition(const std::vector<double>& points,
                                                const std::vector<double>& weights) {
  return moments_by_definition([&](auto f) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < points.size(); ++i) total += weights[i] * f(points[i]);
    return total;
  });
}

// The seven coupled moment recursions exactly as stated, iterated in long
// double without any algebraic rearrangement.
inline std::vector<std::array<long double, 7>> literal_recursion(const MomentSet& ms,
                                                                 double alpha,
                                                                 std::int64_t n_max) {
  long double s2 = ms.M2, st = ms.M12, s3 = ms.M3, su = ms.M13, t2 = ms.M22,
              s2t = ms.M112, s4 = ms.M4;
  const long double m1 = ms.m1, m2 = ms.m2;
  std::vector<std::array<long double, 7>> rows;
  rows.push_back({s2, st, s3, su, t2, s2t, s4});
  for (std::int64_t n = 1; n < n_max; ++n) {
    const long double g = static_cast<long double>(alpha) / n;
    const long double s2n = (1 + 2 * g) * s2 + ms.M2;
    const long double stn = (1 + 2 * g) * st + ms.M12;
    const long double s3n = (1 + 3 * g) * s3 + 3 * g * st - 6 * g * m1 * s2 + ms.M3;
    const long double sun = (1 + 2 * g) * su + ms.M13;
    const long double t2n = (1 + 2 * g) * t2 + ms.M22;
    const long double s2tn = (1 + 3 * g) * s2t + 2 * g * su + g * t2 - 4 * g * m1 * st -
                             2 * g * m2 * s2 + ms.M112;
    const long double s4n = (1 + 4 * g) * s4 + 6 * g * s2t + 4 * g * su -
                            12 * g * m1 * (s3 + st) + (12 * g * m1 * m1 + 6 * ms.M2) * s2 +
                            ms.M4;
    s2 = s2n, st = stn, s3 = s3n, su = sun, t2 = t2n, s2t = s2tn, s4 = s4n;
    rows.push_back({s2, st, s3, su, t2, s2t, s4});
  }
  return rows;
}

// Sum_{j=1}^n Gamma(j+a)/Gamma(j+b) * j^power, one lgamma per term.
inline long double gamma_sum_terms(double a, double b, std::int64_t n, int power) {
  long double total = 0.0L;
  for (std::int64_t j = 1; j <= n; ++j) {
    const long double jl = static_cast<long double>(j);
    total += std::exp(std::lgamma(jl + a) - std::lgamma(jl + b)) * std::pow(jl, power);
  }
  return total;
}

inline double relative_error(double got, double want) {
  const double diff = std::fabs(got - want);
  return want == 0.0 ? diff : diff / std::fabs(want);
}

}  // namespace erw::testing
