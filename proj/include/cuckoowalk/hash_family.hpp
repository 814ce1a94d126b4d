#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cuckoowalk {

using ElementId = std::uint64_t;
using Slot = std::size_t;
/// Zero-based index of a hash function, in [0, d).
using HashIndex = std::uint32_t;

/// splitmix64 finalizer; the building block for every seeded stream in the library.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministically combines a parent seed with a tag into a child seed.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept {
  return mix64(mix64(parent) ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

/// d seeded functions from element ids to slots [0, m).
///
/// eval(x, k) is a pure function of (seed, x, k): a counter-based mix of the
/// three values, reduced to [0, m) by multiply-shift with rejection so the
/// result is exactly uniform for an ideal mixer. Identical on every platform.
class HashFamily {
 public:
  /// Throws InvalidArgument unless d >= 2 and m >= 1.
  HashFamily(std::uint32_t d, std::size_t m, std::uint64_t seed);

  [[nodiscard]] Slot eval(ElementId x, HashIndex k) const noexcept;

  /// All d slots of x, in hash-index order (duplicates kept).
  [[nodiscard]] std::vector<Slot> slots_of(ElementId x) const;

  [[nodiscard]] std::uint32_t d() const noexcept { return d_; }
  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint32_t d_;
  std::size_t m_;
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t reject_below_;
};

/// Unbiased draw in [0, bound) from a 64-bit word source; bound > 0.
template <class WordSource>
std::uint64_t bounded_draw(WordSource&& next_word, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_word();
    const unsigned __int128 product = static_cast<unsigned __int128>(r) * bound;
    if (static_cast<std::uint64_t>(product) >= threshold) {
      return static_cast<std::uint64_t>(product >> 64);
    }
  }
}

}  // namespace cuckoowalk
