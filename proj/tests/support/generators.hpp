#pragma once

// Hand-rolled generators for property tests. They draw from std::mt19937_64
// so that test inputs never share code with the library's own RNG.

#include <cstdint>
#include <random>
#include <vector>

#include "erw/distributions.hpp"

namespace erw::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double real(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }

  std::uint64_t word() { return engine_(); }

  // Finite-support law with 1..max_support atoms in [lo, hi].
  StepDistribution discrete_law(std::size_t max_support = 6, double lo = -2.0,
                                double hi = 2.0) {
    const auto size = static_cast<std::size_t>(integer(1, static_cast<std::int64_t>(max_support)));
    std::vector<double> points(size), weights(size);
    double total = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      points[i] = real(lo, hi);
      weights[i] = real(0.05, 1.0);
      total += weights[i];
    }
    for (auto& w : weights) w /= total;
    return StepDistribution::discrete(std::move(points), std::move(weights));
  }

  // Any builtin kind with random parameters.
  StepDistribution any_law() {
    switch (integer(0, 4)) {
      case 0: return StepDistribution::rademacher();
      case 1: return StepDistribution::bernoulli(real(0.0, 1.0));
      case 2: {
        const double lo = real(-2.0, 1.0);
        return StepDistribution::uniform(lo, lo + real(0.1, 2.0));
      }
      case 3: return StepDistribution::gaussian(real(-1.0, 1.0), real(0.2, 2.0));
      default: return discrete_law();
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace erw::testing
