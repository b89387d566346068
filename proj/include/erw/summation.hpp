#pragma once

#include <array>
#include <cstdint>

namespace erw {

/// Neumaier's variant of Kahan summation. Works for float, double and
/// long double; the running error term is folded in only on read.
template <typename T>
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(T initial) : sum_(initial) {}

  constexpr CompensatedSum& operator+=(T x) {
    const T t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  constexpr T value() const { return sum_ + compensation_; }

 private:
  static constexpr T abs(T v) { return v < T(0) ? -v : v; }

  T sum_{0};
  T compensation_{0};
};

/// Order-independent exact accumulator for finite doubles.
///
/// Every double is an integer multiple of 2^-1074, so the running total is
/// kept as a fixed-point integer split into 32-bit digits. Additions are
/// exact, which makes the result independent of the order in which values
/// (or partial accumulators) are combined. value() rounds the exact total
/// once, deterministically.
class ExactSum {
 public:
  ExactSum() { digits_.fill(0); }

  /// Throws DomainError for NaN or infinity.
  void add(double x);
  ExactSum& operator+=(double x) {
    add(x);
    return *this;
  }
  ExactSum& operator+=(const ExactSum& other);

  double value() const;

  bool operator==(const ExactSum& other) const;

 private:
  static constexpr int kDigitBits = 32;
  // 2^-1074 .. 2^1024 plus headroom for carries.
  static constexpr int kDigits = 70;
  static constexpr int kNormalizeEvery = 1 << 29;

  void normalize();

  std::array<std::int64_t, kDigits> digits_;
  int pending_ = 0;
};

}  // namespace erw
