#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace costeval::random {

struct Hash128 {
  std::uint64_t h1 = 0;
  std::uint64_t h2 = 0;

  friend bool operator==(const Hash128&, const Hash128&) = default;
};

/// MurmurHash3, x64 128-bit variant.
Hash128 murmur3_x64_128(std::span<const std::uint8_t> data,
                        std::uint32_t seed = 0);
Hash128 murmur3_x64_128(std::string_view data, std::uint32_t seed = 0);

/// Philox4x32 with 10 rounds (Salmon et al. counter-based generator).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// Little-endian byte builder for hash keys. Strings are NUL-terminated so
/// adjacent fields cannot alias.
class KeyBuilder {
 public:
  KeyBuilder& add(std::uint64_t v);
  KeyBuilder& add_u32(std::uint32_t v);
  KeyBuilder& add_i64(std::int64_t v) { return add(static_cast<std::uint64_t>(v)); }
  KeyBuilder& add(std::string_view s);
  KeyBuilder& add_bytes(std::span<const std::uint8_t> bytes);

  const std::string& bytes() const { return bytes_; }
  Hash128 hash() const { return murmur3_x64_128(bytes_); }

 private:
  std::string bytes_;
};

/// Stateless generator: draw i is philox(counter = (lo h2, hi h2, i, 0),
/// key = (lo h1, hi h1)), taking the first two output
/// words. Any draw can be recomputed without replaying earlier ones.
class CounterRng {
 public:
  explicit CounterRng(Hash128 key) : key_(key) {}

  std::uint64_t bits(std::uint32_t index) const;
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform(std::uint32_t index) const;
  /// Uniform integer in [0, bound) by rejection (bound > 0). `index` selects a
  /// sub-stream; rejection retries use the fourth counter word.
  std::uint64_t below(std::uint32_t index, std::uint64_t bound) const;

 private:
  Hash128 key_;
};

/// h1 of murmur3 over (base, label, index).
std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                          std::uint64_t index);

}  // namespace costeval::random
