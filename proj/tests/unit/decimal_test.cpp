#include "costeval/decimal.hpp"

#include <gtest/gtest.h>

#include "costeval/errors.hpp"

namespace costeval {
namespace {

TEST(Decimal, ParsesAndPrintsShortestForm) {
  EXPECT_EQ(Decimal::parse("0.0000015").to_string(), "0.0000015");
  EXPECT_EQ(Decimal::parse("-12.500").to_string(), "-12.5");
  EXPECT_EQ(Decimal::parse("7").to_string(), "7");
  EXPECT_EQ(Decimal::parse("0").to_string(), "0");
  EXPECT_EQ(Decimal::parse("0.000000000000000001").units(), 1);
}

TEST(Decimal, RejectsMalformedText) {
  for (const char* bad : {"", "-", ".", "1.", "1e5", "1.2.3", "abc", " 1", "0.0000000000000000001"}) {
    EXPECT_THROW(Decimal::parse(bad), InvalidArgument) << bad;
  }
}

TEST(Decimal, FixedFormattingRoundsHalfEven) {
  EXPECT_EQ(Decimal::parse("0.0000005").to_fixed(6), "0.000000");
  EXPECT_EQ(Decimal::parse("0.0000015").to_fixed(6), "0.000002");
  EXPECT_EQ(Decimal::parse("0.0000025").to_fixed(6), "0.000002");
  EXPECT_EQ(Decimal::parse("0.00000251").to_fixed(6), "0.000003");
  EXPECT_EQ(Decimal::parse("-0.0000025").to_fixed(6), "-0.000002");
  EXPECT_EQ(Decimal::parse("-0.0000035").to_fixed(6), "-0.000004");
  EXPECT_EQ(Decimal::parse("12").to_fixed(2), "12.00");
}

TEST(Decimal, DivisionRoundsHalfEven) {
  EXPECT_EQ(Decimal::parse("1").divided_rounded(3, 6).to_string(), "0.333333");
  EXPECT_EQ(Decimal::parse("0.000005").divided_rounded(2, 6).to_string(), "0.000002");
  EXPECT_EQ(Decimal::parse("0.000015").divided_rounded(2, 6).to_string(), "0.000008");
  EXPECT_EQ(Decimal::parse("-1").divided_rounded(8, 2).to_string(), "-0.12");
  EXPECT_THROW(Decimal::parse("1").divided_rounded(0, 6), InvalidArgument);
}

TEST(Decimal, IntegerScalingIsExact) {
  const Decimal p = Decimal::parse("0.0000015");
  EXPECT_EQ((p * 1'000'000u).to_string(), "1.5");
  EXPECT_EQ((p * 3u) + Decimal::parse("0.0000005"), Decimal::parse("0.000005"));
}

TEST(Decimal, ExactProductRefusesLostDigits) {
  EXPECT_EQ(Decimal::parse("1.5").times_exact(Decimal::parse("2.5")), Decimal::parse("3.75"));
  EXPECT_THROW(Decimal::parse("0.000000001").times_exact(Decimal::parse("0.000000000001")),
               InvalidArgument);
}

TEST(Decimal, OverflowIsReported) {
  const Decimal big = Decimal::from_units(static_cast<Decimal::rep>(
      (static_cast<Decimal::urep>(1) << 126)));
  EXPECT_THROW(big + big, InvalidArgument);
  EXPECT_THROW(big * 4u, InvalidArgument);
}

TEST(Decimal, HalfEvenIntegerDivisionAllSigns) {
  EXPECT_EQ(div_round_half_even(5, 2), 2);
  EXPECT_EQ(div_round_half_even(7, 2), 4);
  EXPECT_EQ(div_round_half_even(-5, 2), -2);
  EXPECT_EQ(div_round_half_even(-7, 2), -4);
  EXPECT_EQ(div_round_half_even(5, -2), -2);
  EXPECT_EQ(div_round_half_even(8, 3), 3);
}

TEST(Decimal, OrderingFollowsValue) {
  EXPECT_LT(Decimal::parse("-1"), Decimal::parse("0.5"));
  EXPECT_GT(Decimal::parse("2.000001"), Decimal::parse("2"));
  EXPECT_DOUBLE_EQ(Decimal::parse("2.45").to_double(), 2.45);
}

}  // namespace
}  // namespace costeval
