#include "costeval/random.hpp"

#include <map>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace costeval::random {
namespace {

TEST(Murmur3, KnownAnswers) {
  EXPECT_EQ(murmur3_x64_128(std::string_view{}), (Hash128{0, 0}));
  EXPECT_EQ(murmur3_x64_128("The quick brown fox jumps over the lazy dog"),
            (Hash128{0xe34bbc7bbc071b6cULL, 0x7a433ca9c49a9347ULL}));
}

TEST(Philox, Random123KnownAnswers) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          {0xffffffff, 0xffffffff}),
            (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          {0xa4093822, 0x299f31d0}),
            (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(KeyBuilder, EncodesLittleEndianAndTerminatesStrings) {
  KeyBuilder k;
  k.add(std::uint64_t{0x0102030405060708ULL}).add_u32(9).add("ab");
  const std::string want("\x08\x07\x06\x05\x04\x03\x02\x01\x09\x00\x00\x00" "ab\0", 15);
  EXPECT_EQ(k.bytes(), want);
  // "a" + "bc" and "ab" + "c" must not collide.
  EXPECT_NE(KeyBuilder().add("a").add("bc").hash(), KeyBuilder().add("ab").add("c").hash());
}

TEST(CounterRng, MatchesReferenceDraws) {
  const auto golden = oracle::load_golden("prng.json");
  for (const auto& d : golden["draws"]) {
    const Hash128 key{d["key_h1"].get<std::uint64_t>(), d["key_h2"].get<std::uint64_t>()};
    const CounterRng rng(key);
    for (std::uint32_t i = 0; i < 4; ++i) {
      EXPECT_EQ(rng.bits(i), d["bits"][i].get<std::uint64_t>());
    }
    for (std::uint32_t i = 0; i < 3; ++i) {
      EXPECT_EQ(rng.uniform(i), d["uniforms"][i].get<double>());
    }
    EXPECT_EQ(rng.below(3, 1000), d["below_1000"].get<std::uint64_t>());
  }
}

TEST(CounterRng, DerivedSeedsMatchReference) {
  for (const auto& s : oracle::load_golden("prng.json")["derived_seeds"]) {
    EXPECT_EQ(derive_seed(s["base"].get<std::uint64_t>(), s["label"].get<std::string>(),
                          s["index"].get<std::uint64_t>()),
              s["seed"].get<std::uint64_t>());
  }
}

TEST(CounterRng, DrawsAreRandomAccess) {
  const CounterRng rng(KeyBuilder().add("x").hash());
  const double late = rng.uniform(1000);
  for (std::uint32_t i = 0; i < 1000; ++i) (void)rng.uniform(i);
  EXPECT_EQ(rng.uniform(1000), late);
}

TEST(CounterRng, UniformRangeAndBelowIsUnbiasedEnough) {
  const CounterRng rng(KeyBuilder().add("hist").hash());
  std::map<std::uint64_t, int> counts;
  double sum = 0;
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(static_cast<std::uint32_t>(i));
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    ++counts[rng.below(static_cast<std::uint32_t>(i), 6)];
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [v, c] : counts) EXPECT_NEAR(c, n / 6.0, 500) << v;
  EXPECT_EQ(rng.below(0, 1), 0u);
}

TEST(CounterRng, DeriveSeedSeparatesInputs) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base : {0ULL, 1ULL}) {
    for (const char* label : {"a", "b"}) {
      for (std::uint64_t i : {0ULL, 1ULL}) seen.insert(derive_seed(base, label, i));
    }
  }
  EXPECT_EQ(seen.size(), 8u);
}

}  // namespace
}  // namespace costeval::random
