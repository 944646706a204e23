#include "costeval/decimal.hpp"

#include <algorithm>
#include <cctype>

#include "costeval/errors.hpp"

namespace costeval {
namespace {

using rep = Decimal::rep;

rep pow10(int digits) {
  rep p = 1;
  for (int i = 0; i < digits; ++i) p *= 10;
  return p;
}

rep checked_add(rep a, rep b) {
  rep out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw InvalidArgument("decimal overflow in addition");
  }
  return out;
}

rep checked_mul(rep a, rep b) {
  rep out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw InvalidArgument("decimal overflow in multiplication");
  }
  return out;
}

std::string unsigned_digits(Decimal::urep v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

std::string format_units(rep units, int digits) {
  const bool negative = units < 0;
  Decimal::urep mag = negative ? static_cast<Decimal::urep>(-(units + 1)) + 1
                                   : static_cast<Decimal::urep>(units);
  std::string body = unsigned_digits(mag);
  if (digits > 0) {
    if (body.size() <= static_cast<std::size_t>(digits)) {
      body.insert(0, static_cast<std::size_t>(digits) - body.size() + 1, '0');
    }
    body.insert(body.size() - static_cast<std::size_t>(digits), ".");
  }
  if (negative && mag != 0) body.insert(0, "-");
  return body;
}

}  // namespace

rep div_round_half_even(rep numerator, rep denominator) {
  if (denominator == 0) throw InvalidArgument("division by zero");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  rep q = numerator / denominator;
  rep r = numerator % denominator;  // same sign as numerator
  if (r == 0) return q;
  const rep twice = (r < 0 ? -r : r) * 2;
  const int sign = numerator < 0 ? -1 : 1;
  if (twice > denominator || (twice == denominator && (q % 2 != 0))) {
    q += sign;
  }
  return q;
}

Decimal Decimal::from_integer(std::int64_t value) {
  return from_units(checked_mul(static_cast<rep>(value), kOne));
}

Decimal Decimal::parse(std::string_view text) {
  auto fail = [&]() -> Decimal {
    throw InvalidArgument("malformed decimal string: \"" + std::string(text) +
                          "\"");
  };
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  rep whole = 0;
  std::size_t int_digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    whole = checked_add(checked_mul(whole, 10), text[i] - '0');
    ++i;
    ++int_digits;
  }
  rep frac = 0;
  int frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[i]))) {
      if (frac_digits == kFractionDigits) {
        throw InvalidArgument("decimal has more than 18 fractional digits: " +
                              std::string(text));
      }
      frac = frac * 10 + (text[i] - '0');
      ++frac_digits;
      ++i;
    }
    if (frac_digits == 0) return fail();
  }
  if (i != text.size() || int_digits == 0) return fail();
  rep units = checked_add(checked_mul(whole, kOne),
                          frac * pow10(kFractionDigits - frac_digits));
  return from_units(negative ? -units : units);
}

std::string Decimal::to_string() const {
  std::string s = format_units(units_, kFractionDigits);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string Decimal::to_fixed(int digits) const {
  digits = std::clamp(digits, 0, kFractionDigits);
  const rep scaled =
      div_round_half_even(units_, pow10(kFractionDigits - digits));
  return format_units(scaled, digits);
}

Decimal Decimal::rounded(int digits) const {
  digits = std::clamp(digits, 0, kFractionDigits);
  const rep step = pow10(kFractionDigits - digits);
  return from_units(div_round_half_even(units_, step) * step);
}

Decimal Decimal::divided_rounded(std::int64_t divisor, int digits) const {
  if (divisor == 0) throw InvalidArgument("division by zero");
  digits = std::clamp(digits, 0, kFractionDigits);
  const rep step = pow10(kFractionDigits - digits);
  return from_units(
      div_round_half_even(units_, checked_mul(step, divisor)) * step);
}

double Decimal::to_double() const {
  // Split to keep precision for large magnitudes.
  const rep whole = units_ / kOne;
  const rep frac = units_ % kOne;
  return static_cast<double>(whole) +
         static_cast<double>(frac) / static_cast<double>(kOne);
}

Decimal Decimal::operator-() const { return from_units(-units_); }

Decimal& Decimal::operator+=(const Decimal& other) {
  units_ = checked_add(units_, other.units_);
  return *this;
}

Decimal& Decimal::operator-=(const Decimal& other) {
  units_ = checked_add(units_, -other.units_);
  return *this;
}

Decimal operator*(const Decimal& a, std::uint64_t n) {
  return Decimal::from_units(checked_mul(a.units_, static_cast<rep>(n)));
}

Decimal Decimal::times_exact(const Decimal& other) const {
  // Split the second factor so the intermediate product stays in range.
  const rep whole = other.units_ / kOne;
  const rep frac = other.units_ % kOne;
  const rep hi = checked_mul(units_, whole);
  // units_ * frac / kOne must be an integer for an exact product.
  rep a = units_, b = frac;
  // Cancel factors of the 10^18 denominator before multiplying.
  rep denom = kOne;
  auto strip = [&](rep& x) {
    while (denom % 10 == 0 && x % 10 == 0 && x != 0) {
      x /= 10;
      denom /= 10;
    }
    while (denom % 2 == 0 && x % 2 == 0 && x != 0) {
      x /= 2;
      denom /= 2;
    }
    while (denom % 5 == 0 && x % 5 == 0 && x != 0) {
      x /= 5;
      denom /= 5;
    }
  };
  strip(a);
  strip(b);
  const rep prod = checked_mul(a, b);
  if (prod % denom != 0) {
    throw InvalidArgument("product not representable with 18 decimals");
  }
  return from_units(checked_add(hi, prod / denom));
}

}  // namespace costeval
