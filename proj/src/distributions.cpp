#include "erw/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "erw/errors.hpp"
#include "erw/format.hpp"

namespace erw {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

MomentSet derive_moment_set(const RawMoments& raw) {
  const double m1 = raw.m1, m2 = raw.m2, m3 = raw.m3, m4 = raw.m4;
  MomentSet ms;
  ms.m1 = m1;
  ms.m2 = m2;
  ms.m3 = m3;
  ms.m4 = m4;
  ms.M2 = m2 - m1 * m1;
  ms.M3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
  ms.M4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
  ms.M12 = m3 - m1 * m2;
  ms.M13 = m4 - m1 * m3;
  ms.M22 = m4 - m2 * m2;
  ms.M112 = m4 - m2 * m2 - 2.0 * m1 * m3 + 2.0 * m1 * m1 * m2;
  if (!(ms.M2 >= -1e-12)) {
    std::ostringstream msg;
    msg << "inconsistent raw moments: implied variance " << ms.M2
        << " is negative";
    throw DomainError(msg.str());
  }
  return ms;
}

std::vector<IdentityCheck> check_moment_identities(const MomentSet& ms) {
  const double m1 = ms.m1, m2 = ms.m2;
  std::vector<IdentityCheck> out;
  out.push_back({"M12 - 2*m1*M2 = M3",
                 std::abs(ms.M12 - 2.0 * m1 * ms.M2 - ms.M3)});
  out.push_back({"2*M13 + M22 - 4*m1*M12 - 2*m2*M2 = 3*M112",
                 std::abs(2.0 * ms.M13 + ms.M22 - 4.0 * m1 * ms.M12 -
                          2.0 * m2 * ms.M2 - 3.0 * ms.M112)});
  out.push_back({"M112 - 2*m1*M3 = M4 - M2^2",
                 std::abs(ms.M112 - 2.0 * m1 * ms.M3 -
                          (ms.M4 - ms.M2 * ms.M2))});
  out.push_back({"M13 - 3*m1*M12 + 3*m1^2*M2 = M4",
                 std::abs(ms.M13 - 3.0 * m1 * ms.M12 +
                          3.0 * m1 * m1 * ms.M2 - ms.M4)});
  out.push_back({"M2 >= 0", std::max(0.0, -ms.M2)});
  out.push_back({"M22 >= 0", std::max(0.0, -ms.M22)});
  out.push_back({"M4 >= M2^2", std::max(0.0, ms.M2 * ms.M2 - ms.M4)});
  return out;
}

StepDistribution StepDistribution::rademacher() {
  return StepDistribution(Rademacher{});
}

StepDistribution StepDistribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidDistribution("bernoulli: p must lie in [0, 1]");
  }
  return StepDistribution(Bernoulli{p});
}

StepDistribution StepDistribution::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw InvalidDistribution("uniform: need finite lo < hi");
  }
  return StepDistribution(Uniform{lo, hi});
}

StepDistribution StepDistribution::gaussian(double mean, double stddev) {
  if (!std::isfinite(mean) || !std::isfinite(stddev) || !(stddev > 0.0)) {
    throw InvalidDistribution("gaussian: need finite mean and stddev > 0");
  }
  return StepDistribution(Gaussian{mean, stddev});
}

StepDistribution StepDistribution::discrete(std::vector<double> points,
                                            std::vector<double> weights) {
  if (points.empty()) {
    throw InvalidDistribution("discrete: empty support");
  }
  if (points.size() != weights.size()) {
    throw InvalidDistribution("discrete: points and weights differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) {
      throw InvalidDistribution("discrete: non-finite support point");
    }
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw InvalidDistribution("discrete: weights must be nonnegative");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "discrete: weights sum to " << total << ", not 1";
    throw InvalidDistribution(msg.str());
  }
  std::vector<double> cumulative(weights.size());
  double running = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    running += weights[i];
    cumulative[i] = running;
  }
  return StepDistribution(
      Discrete{std::move(points), std::move(weights), std::move(cumulative)});
}

std::string_view StepDistribution::kind_name() const noexcept {
  return std::visit(Overloaded{
                        [](const Rademacher&) { return "rademacher"; },
                        [](const Bernoulli&) { return "bernoulli"; },
                        [](const Uniform&) { return "uniform"; },
                        [](const Gaussian&) { return "gaussian"; },
                        [](const Discrete&) { return "discrete"; },
                    },
                    kind_);
}

std::optional<StepDistribution::FiniteSupport> StepDistribution::finite_support()
    const {
  return std::visit(
      Overloaded{
          [](const Rademacher&) -> std::optional<FiniteSupport> {
            return FiniteSupport{{-1.0, 1.0}, {0.5, 0.5}};
          },
          [](const Bernoulli& b) -> std::optional<FiniteSupport> {
            return FiniteSupport{{0.0, 1.0}, {1.0 - b.p, b.p}};
          },
          [](const Uniform&) -> std::optional<FiniteSupport> {
            return std::nullopt;
          },
          [](const Gaussian&) -> std::optional<FiniteSupport> {
            return std::nullopt;
          },
          [](const Discrete& d) -> std::optional<FiniteSupport> {
            return FiniteSupport{d.points, d.weights};
          },
      },
      kind_);
}

std::string StepDistribution::label() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Rademacher&) { os << "rademacher"; },
                 [&](const Bernoulli& b) { os << "bernoulli(" << format_double(b.p) << ")"; },
                 [&](const Uniform& u) {
                   os << "uniform(" << format_double(u.lo) << "," << format_double(u.hi) << ")";
                 },
                 [&](const Gaussian& g) {
                   os << "gaussian(" << format_double(g.mean) << "," << format_double(g.stddev) << ")";
                 },
                 [&](const Discrete& d) {
                   os << "discrete(";
                   for (std::size_t i = 0; i < d.points.size(); ++i) {
                     os << (i ? ";" : "") << format_double(d.points[i]) << ":" << format_double(d.weights[i]);
                   }
                   os << ")";
                 },
             },
             kind_);
  return os.str();
}

RawMoments raw_moments(const StepDistribution& dist) {
  using SD = StepDistribution;
  return std::visit(
      Overloaded{
          [](const SD::Rademacher&) { return RawMoments{0.0, 1.0, 0.0, 1.0}; },
          [](const SD::Bernoulli& b) { return RawMoments{b.p, b.p, b.p, b.p}; },
          [](const SD::Uniform& u) {
            // m_k = (hi^{k+1} - lo^{k+1}) / ((k+1)(hi - lo)), expanded so
            // that no power difference cancels.
            const double a = u.lo, b = u.hi;
            RawMoments r;
            r.m1 = (a + b) / 2.0;
            r.m2 = (a * a + a * b + b * b) / 3.0;
            r.m3 = (a + b) * (a * a + b * b) / 4.0;
            r.m4 = (a * a * a * a + a * a * a * b + a * a * b * b +
                    a * b * b * b + b * b * b * b) /
                   5.0;
            return r;
          },
          [](const SD::Gaussian& g) {
            const double mu = g.mean, s2 = g.stddev * g.stddev;
            RawMoments r;
            r.m1 = mu;
            r.m2 = mu * mu + s2;
            r.m3 = mu * mu * mu + 3.0 * mu * s2;
            r.m4 = mu * mu * mu * mu + 6.0 * mu * mu * s2 + 3.0 * s2 * s2;
            return r;
          },
          [](const SD::Discrete& d) {
            RawMoments r;
            for (std::size_t i = 0; i < d.points.size(); ++i) {
              const double x = d.points[i], w = d.weights[i];
              r.m1 += w * x;
              r.m2 += w * x * x;
              r.m3 += w * x * x * x;
              r.m4 += w * x * x * x * x;
            }
            return r;
          },
      },
      dist.kind());
}

MomentSet moment_set(const StepDistribution& dist) {
  return derive_moment_set(raw_moments(dist));
}

double sample_step(const StepDistribution& dist, RandomSource& rng) {
  using SD = StepDistribution;
  return std::visit(
      Overloaded{
          [&](const SD::Rademacher&) {
            return (rng() >> 63) ? 1.0 : -1.0;
          },
          [&](const SD::Bernoulli& b) { return rng.uniform() < b.p ? 1.0 : 0.0; },
          [&](const SD::Uniform& u) {
            return u.lo + (u.hi - u.lo) * rng.uniform();
          },
          [&](const SD::Gaussian& g) {
            const double r = std::sqrt(-2.0 * std::log(rng.uniform_open_low()));
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            return g.mean + g.stddev * r * std::cos(theta);
          },
          [&](const SD::Discrete& d) {
            const double u = rng.uniform();
            auto it = std::upper_bound(d.cumulative.begin(), d.cumulative.end(), u);
            const auto idx = std::min<std::size_t>(
                static_cast<std::size_t>(it - d.cumulative.begin()),
                d.points.size() - 1);
            return d.points[idx];
          },
      },
      dist.kind());
}

}  // namespace erw
