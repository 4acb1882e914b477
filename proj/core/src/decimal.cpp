#include "netting/decimal.hpp"

#include <algorithm>

#include "netting/error.hpp"

namespace netting {

namespace {

using M = Decimal::Mantissa;
constexpr int kMaxScale = 36;

[[noreturn]] void overflow() { throw Error(ErrorCode::Overflow, "decimal arithmetic overflow"); }

M checked_mul(M a, M b) {
  M r;
  if (__builtin_mul_overflow(a, b, &r)) overflow();
  return r;
}

M checked_add(M a, M b) {
  M r;
  if (__builtin_add_overflow(a, b, &r)) overflow();
  return r;
}

M pow10(int n) {
  M r = 1;
  for (int i = 0; i < n; ++i) r = checked_mul(r, 10);
  return r;
}

// Align both mantissas to the larger scale.
std::pair<M, M> aligned(const Decimal& a, const Decimal& b, int& scale) {
  scale = std::max(a.scale(), b.scale());
  return {checked_mul(a.mantissa(), pow10(scale - a.scale())),
          checked_mul(b.mantissa(), pow10(scale - b.scale()))};
}

std::string digits_of(M v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(char('0' + int(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

// Divide rounding half away from zero.
M div_half_up(M num, M den) {
  bool neg = (num < 0) != (den < 0);
  M n = num < 0 ? -num : num;
  M d = den < 0 ? -den : den;
  M q = n / d;
  M r = n % d;
  if (r * 2 >= d) q += 1;
  return neg ? -q : q;
}

}  // namespace

Decimal Decimal::from_parts(Mantissa mantissa, int scale) {
  if (scale < 0 || scale > kMaxScale) overflow();
  Decimal d;
  d.mantissa_ = mantissa;
  d.scale_ = scale;
  return d.normalized();
}

Decimal Decimal::normalized() const {
  Decimal d = *this;
  while (d.scale_ > 0 && d.mantissa_ % 10 == 0) {
    d.mantissa_ /= 10;
    --d.scale_;
  }
  if (d.mantissa_ == 0) d.scale_ = 0;
  return d;
}

Decimal Decimal::parse(std::string_view text) {
  auto bad = [&] {
    return Error(ErrorCode::InvalidDocument, "not a decimal number: '" + std::string(text) + "'");
  };
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) neg = text[i++] == '-';
  M m = 0;
  int scale = 0;
  bool any = false, frac = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (frac || !any || i + 1 == text.size()) throw bad();
      frac = true;
      continue;
    }
    if (c < '0' || c > '9') throw bad();
    m = checked_add(checked_mul(m, 10), c - '0');
    any = true;
    if (frac) ++scale;
  }
  if (!any) throw bad();
  return from_parts(neg ? -m : m, scale);
}

bool Decimal::is_integer() const { return normalized().scale_ == 0; }

std::string Decimal::str() const {
  Decimal d = normalized();
  M v = d.mantissa_ < 0 ? -d.mantissa_ : d.mantissa_;
  std::string s = digits_of(v);
  if (d.scale_ > 0) {
    if (int(s.size()) <= d.scale_) s.insert(0, std::size_t(d.scale_ - int(s.size()) + 1), '0');
    s.insert(s.size() - std::size_t(d.scale_), ".");
  }
  return d.mantissa_ < 0 ? "-" + s : s;
}

Decimal Decimal::round_half_up(int digits) const {
  if (scale_ <= digits) return *this;
  Decimal d;
  d.mantissa_ = div_half_up(mantissa_, pow10(scale_ - digits));
  d.scale_ = digits;
  return d.normalized();
}

std::string Decimal::fixed(int digits) const {
  Decimal r = round_half_up(digits);
  M m = checked_mul(r.mantissa_, pow10(digits - r.scale_));
  bool neg = m < 0;
  std::string s = digits_of(neg ? -m : m);
  if (digits > 0) {
    if (int(s.size()) <= digits) s.insert(0, std::size_t(digits - int(s.size()) + 1), '0');
    s.insert(s.size() - std::size_t(digits), ".");
  }
  return neg ? "-" + s : s;
}

std::string Decimal::grouped(int digits) const {
  std::string s = fixed(digits);
  std::size_t start = s[0] == '-' ? 1 : 0;
  std::size_t end = s.find('.');
  if (end == std::string::npos) end = s.size();
  for (std::size_t pos = end; pos > start + 3; pos -= 3) s.insert(pos - 3, ",");
  return s;
}

Decimal Decimal::divide(const Decimal& a, const Decimal& b, int digits) {
  if (b.is_zero()) throw Error(ErrorCode::Overflow, "decimal division by zero");
  // a/b = (ma * 10^sb) / (mb * 10^sa); scale the numerator to `digits`.
  M num = checked_mul(checked_mul(a.mantissa_, pow10(b.scale_)), pow10(digits));
  M den = checked_mul(b.mantissa_, pow10(a.scale_));
  Decimal d;
  d.mantissa_ = div_half_up(num, den);
  d.scale_ = digits;
  return d.normalized();
}

Decimal operator+(const Decimal& a, const Decimal& b) {
  int scale = 0;
  auto [x, y] = aligned(a, b, scale);
  return Decimal::from_parts(checked_add(x, y), scale);
}

Decimal operator-(const Decimal& a, const Decimal& b) { return a + (-b); }

Decimal operator*(const Decimal& a, const Decimal& b) {
  return Decimal::from_parts(checked_mul(a.mantissa_, b.mantissa_), a.scale_ + b.scale_);
}

bool operator==(const Decimal& a, const Decimal& b) {
  Decimal x = a.normalized(), y = b.normalized();
  return x.mantissa_ == y.mantissa_ && x.scale_ == y.scale_;
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  int scale = 0;
  auto [x, y] = aligned(a, b, scale);
  return x <=> y;
}

}  // namespace netting
