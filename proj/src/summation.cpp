#include "erw/summation.hpp"

#include <cmath>

#include "erw/errors.hpp"

namespace erw {

void ExactSum::add(double x) {
  if (!std::isfinite(x)) {
    throw DomainError("ExactSum: non-finite value");
  }
  if (x == 0.0) {
    return;
  }
  int exponent = 0;
  const double fraction = std::frexp(x, &exponent);  // |fraction| in [0.5, 1)
  // x = mantissa * 2^(exponent - 53), mantissa a signed 53-bit integer.
  auto mantissa = static_cast<std::int64_t>(std::ldexp(fraction, 53));
  int shift_exp = exponent - 53;
  if (shift_exp < -1074) {
    // Subnormal: the low bits of the 53-bit mantissa are zero.
    mantissa >>= (-1074 - shift_exp);
    shift_exp = -1074;
  }
  const int offset = shift_exp + 1074;
  const int index = offset / kDigitBits;
  const int bit = offset % kDigitBits;
  const __int128 wide = static_cast<__int128>(mantissa) << bit;
  constexpr __int128 kMask = 0xFFFFFFFF;
  digits_[index] += static_cast<std::int64_t>(wide & kMask);
  digits_[index + 1] += static_cast<std::int64_t>((wide >> 32) & kMask);
  digits_[index + 2] += static_cast<std::int64_t>(wide >> 64);
  if (++pending_ >= kNormalizeEvery) {
    normalize();
  }
}

ExactSum& ExactSum::operator+=(const ExactSum& other) {
  ExactSum rhs = other;
  rhs.normalize();
  normalize();
  for (int i = 0; i < kDigits; ++i) {
    digits_[i] += rhs.digits_[i];
  }
  normalize();
  return *this;
}

void ExactSum::normalize() {
  // Canonical form: digits 0..kDigits-2 in [0, 2^32), top digit signed.
  std::int64_t carry = 0;
  for (int i = 0; i < kDigits - 1; ++i) {
    const std::int64_t v = digits_[i] + carry;
    carry = v >> kDigitBits;  // arithmetic shift == floor division
    digits_[i] = v - (carry << kDigitBits);
  }
  digits_[kDigits - 1] += carry;
  pending_ = 0;
}

double ExactSum::value() const {
  ExactSum canon = *this;
  canon.normalize();
  // Digits are non-negative except the top one, so the sign of the total is
  // the sign of the highest nonzero digit after folding the top digit in.
  long double total = 0.0L;
  for (int i = kDigits - 1; i >= 0; --i) {
    if (canon.digits_[i] != 0) {
      total += std::ldexp(static_cast<long double>(canon.digits_[i]),
                          i * kDigitBits - 1074);
    }
  }
  return static_cast<double>(total);
}

bool ExactSum::operator==(const ExactSum& other) const {
  ExactSum a = *this;
  ExactSum b = other;
  a.normalize();
  b.normalize();
  return a.digits_ == b.digits_;
}

}  // namespace erw
