#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace costeval {

/// Exact fixed-point decimal with 18 fractional digits, backed by a signed
/// 128-bit integer. Enough headroom for per-token prices times 64-bit token
/// counts; every operation is exact or reports overflow.
class Decimal {
 public:
  __extension__ typedef __int128 rep;
  __extension__ typedef unsigned __int128 urep;

  static constexpr int kFractionDigits = 18;
  static constexpr rep kOne = static_cast<rep>(1'000'000'000'000'000'000LL);

  constexpr Decimal() = default;

  static constexpr Decimal from_units(rep units) {
    Decimal d;
    d.units_ = units;
    return d;
  }
  static Decimal from_integer(std::int64_t value);

  /// Parses "[-]digits[.digits]". At most 18 fractional digits; no exponent.
  static Decimal parse(std::string_view text);

  constexpr rep units() const { return units_; }

  /// Shortest exact representation: no trailing zeros, at least one digit.
  std::string to_string() const;
  /// Rounded half-even to `digits` fractional places, zero padded.
  std::string to_fixed(int digits) const;

  /// Round half-even to `digits` fractional places.
  Decimal rounded(int digits) const;

  /// Exact quotient rounded half-even to `digits` fractional places.
  Decimal divided_rounded(std::int64_t divisor, int digits) const;

  double to_double() const;

  Decimal operator-() const;
  Decimal& operator+=(const Decimal& other);
  Decimal& operator-=(const Decimal& other);

  friend Decimal operator+(Decimal a, const Decimal& b) { return a += b; }
  friend Decimal operator-(Decimal a, const Decimal& b) { return a -= b; }
  friend Decimal operator*(const Decimal& a, std::uint64_t n);
  friend Decimal operator*(std::uint64_t n, const Decimal& a) { return a * n; }

  /// Exact product with another decimal; throws if digits would be lost.
  Decimal times_exact(const Decimal& other) const;

  friend constexpr bool operator==(const Decimal&, const Decimal&) = default;
  friend constexpr std::strong_ordering operator<=>(const Decimal& a,
                                                    const Decimal& b) {
    return a.units_ <=> b.units_;
  }

 private:
  rep units_ = 0;
};

/// Round-half-even integer division, exact for any sign.
Decimal::rep div_round_half_even(Decimal::rep numerator,
                                 Decimal::rep denominator);

}  // namespace costeval
