#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace netting {

__extension__ typedef __int128 int128_t;

// Exact decimal number: mantissa x 10^-scale held in a 128-bit integer.
// Addition, subtraction and multiplication are exact; arithmetic that would
// leave the 128-bit range throws Error(Overflow). Division only exists as an
// explicitly rounded operation.
class Decimal {
 public:
  using Mantissa = int128_t;

  constexpr Decimal() = default;
  constexpr Decimal(std::int64_t whole) : mantissa_(whole), scale_(0) {}  // NOLINT(implicit)

  static Decimal from_parts(Mantissa mantissa, int scale);
  // Plain decimal text: optional sign, digits, optional fraction ("12", "-0.05", "29379.375").
  static Decimal parse(std::string_view text);

  Mantissa mantissa() const { return mantissa_; }
  int scale() const { return scale_; }

  bool is_zero() const { return mantissa_ == 0; }
  bool is_negative() const { return mantissa_ < 0; }
  bool is_integer() const;

  // Exact representation with trailing fractional zeros removed.
  std::string str() const;
  // Rounded half away from zero to `digits` fractional places, always printed with that many.
  std::string fixed(int digits) const;
  // Same as fixed() with a thousands separator in the integer part.
  std::string grouped(int digits) const;

  Decimal round_half_up(int digits) const;
  // a / b rounded half-up to `digits` fractional places.
  static Decimal divide(const Decimal& a, const Decimal& b, int digits);

  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b);
  friend Decimal operator*(const Decimal& a, const Decimal& b);
  Decimal operator-() const { return from_parts(-mantissa_, scale_); }
  Decimal& operator+=(const Decimal& o) { return *this = *this + o; }
  Decimal& operator*=(const Decimal& o) { return *this = *this * o; }

  friend bool operator==(const Decimal& a, const Decimal& b);
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

 private:
  Decimal normalized() const;

  Mantissa mantissa_ = 0;
  int scale_ = 0;
};

}  // namespace netting
