#include "erw/gamma_toolkit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "erw/errors.hpp"
#include "erw/summation.hpp"

namespace erw {
namespace {

constexpr double kStirlingThreshold = 12.0;

// Tail of the Stirling series ln Gamma(z) - [(z-1/2) ln z - z + ln(2 pi)/2].
double stirling_tail(double z) {
  // B_{2k} / (2k (2k-1)), k = 1..8
  static constexpr double kCoeff[] = {
      1.0 / 12.0,          -1.0 / 360.0,      1.0 / 1260.0,
      -1.0 / 1680.0,       1.0 / 1188.0,      -691.0 / 360360.0,
      1.0 / 156.0,         -3617.0 / 122400.0,
  };
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double acc = 0.0;
  for (int k = 7; k >= 0; --k) {
    acc = acc * inv2 + kCoeff[k];
  }
  return acc * inv;
}

// ln Gamma(y + delta) - ln Gamma(y) for y, y + delta >= kStirlingThreshold.
double log_ratio_large(double y, double delta) {
  const double x = y + delta;
  // (x - 1/2) ln x - (y - 1/2) ln y - delta
  //   = (y - 1/2) log1p(delta / y) - delta + delta ln x
  const double main = ((y - 0.5) * std::log1p(delta / y) - delta) +
                      delta * std::log(x);
  return main + (stirling_tail(x) - stirling_tail(y));
}

// ln Gamma(y + delta) - ln Gamma(y) for y, y + delta > 0. Taking delta
// separately avoids rounding y + delta, whose error would be amplified by ln y.
double log_ratio_shifted(double y, double delta) {
  const double low = std::min(y, y + delta);
  if (low >= kStirlingThreshold) {
    return log_ratio_large(y, delta);
  }
  // Shift into the asymptotic range and undo the shift:
  // Gamma(y+delta)/Gamma(y) = Gamma(y+k+delta)/Gamma(y+k) * prod_i (y+i)/(y+delta+i).
  const int k = static_cast<int>(std::ceil(kStirlingThreshold - low));
  double correction = 0.0;
  for (int i = 0; i < k; ++i) {
    correction -= std::log1p(delta / (y + i));
  }
  return log_ratio_large(y + k, delta) + correction;
}

// ln |Gamma(x) / Gamma(y)| for x, y > 0.
double log_ratio_positive(double x, double y) { return log_ratio_shifted(y, x - y); }

bool is_pole(double x) { return x <= 0.0 && x == std::floor(x); }

void require_nonnegative(double a, double b, const char* op) {
  if (!(a >= 0.0) || !(b >= 0.0)) {
    std::ostringstream msg;
    msg << op << ": a and b must be nonnegative (got a=" << a << ", b=" << b
        << ")";
    throw DomainError(msg.str());
  }
}

void require_away(double d, const char* what, const char* op) {
  if (std::abs(d) < kGammaSumSingularRadius) {
    std::ostringstream msg;
    msg << op << ": singular identity, " << what << " = " << d;
    throw DomainError(msg.str());
  }
}

}  // namespace

double GammaRatio::value() const {
  return sign * std::exp(log_magnitude);
}

double log_gamma_ratio(double n, double delta) {
  if (!(n >= 1.0)) {
    throw DomainError("log_gamma_ratio: n must be >= 1");
  }
  if (!(n + delta > 0.0)) {
    throw DomainError("log_gamma_ratio: n + delta must be positive");
  }
  if (delta == 0.0) return 0.0;
  return log_ratio_shifted(n, delta);
}

GammaRatio gamma_ratio(double x, double y) {
  if (is_pole(x)) {
    throw DomainError("gamma_ratio: numerator argument is a pole of Gamma");
  }
  if (is_pole(y)) {
    return {-std::numeric_limits<double>::infinity(), 1};
  }
  if (x > 0.0 && y > 0.0) {
    return {log_ratio_positive(x, y), 1};
  }
  // Negative non-integer arguments only arise with small magnitudes here.
  int sign_x = 1, sign_y = 1;
  const double lx = ::lgamma_r(x, &sign_x);
  const double ly = ::lgamma_r(y, &sign_y);
  return {lx - ly, sign_x * sign_y};
}

double martingale_scale(std::int64_t n, double alpha) {
  if (n < 1) {
    throw DomainError("martingale_scale: n must be >= 1");
  }
  return std::exp(-log_gamma_ratio(static_cast<double>(n), alpha));
}

double gamma_sum_linear(double a, double b, std::int64_t n) {
  require_nonnegative(a, b, "gamma_sum_linear");
  const double d1 = b - a - 1.0;
  require_away(d1, "b-a-1", "gamma_sum_linear");
  if (n < 1) throw DomainError("gamma_sum_linear: n must be >= 1");
  const double nn = static_cast<double>(n);
  const double head = gamma_ratio(a + 1.0, b).value();
  const double tail = std::exp(log_gamma_ratio(nn, a + 1.0) - log_gamma_ratio(nn, b));
  return (head - tail) / d1;
}

double gamma_sum_weighted(double a, double b, std::int64_t n) {
  require_nonnegative(a, b, "gamma_sum_weighted");
  const double d1 = b - a - 1.0;
  const double d2 = b - a - 2.0;
  require_away(d1, "b-a-1", "gamma_sum_weighted");
  require_away(d2, "b-a-2", "gamma_sum_weighted");
  if (n < 1) throw DomainError("gamma_sum_weighted: n must be >= 1");
  const double nn = static_cast<double>(n);
  // 1/(d1 d2) (Gamma(a+1)/Gamma(b-1) - Gamma(n+a+1)/Gamma(n+b-1))
  //   - n/d1 Gamma(n+a+1)/Gamma(n+b)
  // with Gamma(n+a+1)/Gamma(n+b-1) = (n+b-1) Gamma(n+a+1)/Gamma(n+b), which
  // folds the two n-dependent terms into one.
  const double head = gamma_ratio(a + 1.0, b - 1.0).value();
  const double tail = std::exp(log_gamma_ratio(nn, a + 1.0) - log_gamma_ratio(nn, b));
  return (head - tail * (nn * d1 + b - 1.0)) / (d1 * d2);
}

double solve_recursion(const RecursionSpec& spec, std::int64_t n) {
  if (!(spec.beta > 0.0)) throw DomainError("solve_recursion: beta must be > 0");
  if (n < 1) throw DomainError("solve_recursion: n must be >= 1");
  const double beta = spec.beta;
  CompensatedSum<double> bracket(spec.b1 / std::tgamma(1.0 + beta));
  for (std::int64_t j = 1; j < n; ++j) {
    const double weight =
        std::exp(-log_gamma_ratio(static_cast<double>(j + 1), beta));
    bracket += weight * spec.c(j);
  }
  return std::exp(log_gamma_ratio(static_cast<double>(n), beta)) * bracket.value();
}

double solve_constant_recursion(double beta, double c, std::int64_t n) {
  if (!(beta > 0.0)) throw DomainError("solve_constant_recursion: beta must be > 0");
  require_away(beta - 1.0, "beta-1", "solve_constant_recursion");
  if (n < 1) throw DomainError("solve_constant_recursion: n must be >= 1");
  const double nn = static_cast<double>(n);
  const double growth = std::exp(log_gamma_ratio(nn, beta));
  return c / (beta - 1.0) * (growth / std::tgamma(beta) - nn);
}

namespace oracle {

double gamma_sum_linear_direct(double a, double b, std::int64_t n) {
  long double term = std::tgamma(1.0L + a) / std::tgamma(1.0L + b);
  CompensatedSum<long double> sum;
  for (std::int64_t j = 1; j <= n; ++j) {
    sum += term;
    term *= (static_cast<long double>(j) + a) / (static_cast<long double>(j) + b);
  }
  return static_cast<double>(sum.value());
}

double gamma_sum_weighted_direct(double a, double b, std::int64_t n) {
  long double term = std::tgamma(1.0L + a) / std::tgamma(1.0L + b);
  CompensatedSum<long double> sum;
  for (std::int64_t j = 1; j <= n; ++j) {
    sum += term * static_cast<long double>(j);
    term *= (static_cast<long double>(j) + a) / (static_cast<long double>(j) + b);
  }
  return static_cast<double>(sum.value());
}

double iterate_recursion(const RecursionSpec& spec, std::int64_t n) {
  long double b = spec.b1;
  for (std::int64_t k = 1; k < n; ++k) {
    b = (1.0L + spec.beta / static_cast<long double>(k)) * b + spec.c(k);
  }
  return static_cast<double>(b);
}

}  // namespace oracle
}  // namespace erw
