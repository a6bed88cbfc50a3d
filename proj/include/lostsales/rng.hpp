#pragma once

#include <cstdint>
#include <string_view>

namespace lostsales {

/// Counter-based pseudo-random stream (splitmix64 output function).
///
/// A stream is identified by an immutable 64-bit key plus a draw counter, so
/// copies are cheap and `fork` derives an independent child stream without
/// consuming draws from the parent.  Forking by a stable index or name is how
/// coupled experiments replay identical demand sequences against different
/// start states or policies: two streams forked with the same salt from the
/// same parent produce bit-identical draw sequences.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(mix(seed ^ kKeyTag)), counter_(0) {}

  /// Child stream derived from this stream's identity and `salt`.
  /// Independent of how many draws the parent has made.
  RngStream fork(std::uint64_t salt) const {
    return RngStream(mix(key_ ^ mix(salt ^ kForkTag)), std::uint64_t{0});
  }

  /// Named child stream (e.g. fork("demand")), for self-documenting call sites.
  RngStream fork(std::string_view name) const { return fork(fnv1a(name)); }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform draw in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  RngStream(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kKeyTag = 0xA02B8F13D5C6E791ull;
  static constexpr std::uint64_t kForkTag = 0x5851F42D4C957F2Dull;

  static std::uint64_t mix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001B3ull;
    }
    return h;
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace lostsales
