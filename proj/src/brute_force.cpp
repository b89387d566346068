#include <array>
#include <sstream>

#include "erw/errors.hpp"
#include "erw/moment_engine.hpp"
#include "erw/summation.hpp"

namespace erw {
namespace {

using Real = long double;

struct Enumerator {
  std::vector<double> points;
  std::vector<double> weights;
  Real alpha;
  Real m1, m2, m3;
  std::int64_t n;
  std::array<double, kBruteForceMaxSteps> path{};
  std::array<CompensatedSum<Real>, 7> acc{};

  void leaf(Real prob, Real s, Real t, Real u) {
    acc[0] += prob * s * s;
    acc[1] += prob * s * t;
    acc[2] += prob * s * s * s;
    acc[3] += prob * s * u;
    acc[4] += prob * t * t;
    acc[5] += prob * s * s * t;
    acc[6] += prob * s * s * s * s;
  }

  void take(std::int64_t depth, double x, Real prob, Real s, Real t, Real u) {
    path[static_cast<std::size_t>(depth)] = x;
    const Real xl = x;
    descend(depth + 1, prob, s + (xl - m1), t + (xl * xl - m2),
            u + (xl * xl * xl - m3));
  }

  // `depth` steps have been taken; the path holds them.
  void descend(std::int64_t depth, Real prob, Real s, Real t, Real u) {
    if (depth == n) {
      leaf(prob, s, t, u);
      return;
    }
    const Real fresh = depth == 0 ? 1.0L : 1.0L - alpha;
    if (depth > 0 && alpha > 0.0L) {
      const Real per_choice = alpha / static_cast<Real>(depth);
      for (std::int64_t k = 0; k < depth; ++k) {
        take(depth, path[static_cast<std::size_t>(k)], prob * per_choice, s, t, u);
      }
    }
    if (fresh > 0.0L) {
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (weights[i] > 0.0) {
          take(depth, points[i], prob * fresh * weights[i], s, t, u);
        }
      }
    }
  }
};

}  // namespace

ExactMomentRow brute_force_moments(const StepDistribution& dist,
                                   MemoryParameter mp, std::int64_t n) {
  if (n < 1) throw DomainError("brute_force_moments: n must be >= 1");
  if (n > kBruteForceMaxSteps) {
    std::ostringstream msg;
    msg << "brute_force_moments: n=" << n << " exceeds the enumeration guard "
        << kBruteForceMaxSteps;
    throw SizeGuardError(msg.str());
  }
  auto support = dist.finite_support();
  if (!support) {
    throw SizeGuardError("brute_force_moments: law has no finite support");
  }
  if (support->points.size() > kBruteForceMaxSupport) {
    std::ostringstream msg;
    msg << "brute_force_moments: support size " << support->points.size()
        << " exceeds the enumeration guard " << kBruteForceMaxSupport;
    throw SizeGuardError(msg.str());
  }

  Enumerator e;
  e.points = support->points;
  e.weights = support->weights;
  e.alpha = mp.alpha();
  // Moments straight from the support, independent of raw_moments().
  Real m1 = 0, m2 = 0, m3 = 0;
  for (std::size_t i = 0; i < e.points.size(); ++i) {
    const Real x = e.points[i], w = e.weights[i];
    m1 += w * x;
    m2 += w * x * x;
    m3 += w * x * x * x;
  }
  e.m1 = m1;
  e.m2 = m2;
  e.m3 = m3;
  e.n = n;
  e.descend(0, 1.0L, 0.0L, 0.0L, 0.0L);

  ExactMomentRow row;
  row.n = n;
  row.s2 = static_cast<double>(e.acc[0].value());
  row.st = static_cast<double>(e.acc[1].value());
  row.s3 = static_cast<double>(e.acc[2].value());
  row.su = static_cast<double>(e.acc[3].value());
  row.t2 = static_cast<double>(e.acc[4].value());
  row.s2t = static_cast<double>(e.acc[5].value());
  row.s4 = static_cast<double>(e.acc[6].value());
  return row;
}

}  // namespace erw
