#include "cuckoowalk/hash_family.hpp"

#include "cuckoowalk/error.hpp"

namespace cuckoowalk {

HashFamily::HashFamily(std::uint32_t d, std::size_t m, std::uint64_t seed)
    : d_(d), m_(m), seed_(seed), key_(mix64(seed ^ 0x5851f42d4c957f2dULL)), reject_below_(0) {
  if (d < 2) throw InvalidArgument("hash family needs d >= 2");
  if (m == 0) throw InvalidArgument("hash family needs m >= 1");
  reject_below_ = (0 - static_cast<std::uint64_t>(m)) % static_cast<std::uint64_t>(m);
}

Slot HashFamily::eval(ElementId x, HashIndex k) const noexcept {
  const std::uint64_t base = mix64(key_ ^ mix64(x)) ^ (static_cast<std::uint64_t>(k) << 40);
  const auto bound = static_cast<std::uint64_t>(m_);
  for (std::uint64_t counter = 0;; ++counter) {
    const std::uint64_t r = mix64(base + counter * 0xd1b54a32d192ed03ULL);
    const unsigned __int128 product = static_cast<unsigned __int128>(r) * bound;
    if (static_cast<std::uint64_t>(product) >= reject_below_) {
      return static_cast<Slot>(product >> 64);
    }
  }
}

std::vector<Slot> HashFamily::slots_of(ElementId x) const {
  std::vector<Slot> out(d_);
  for (HashIndex k = 0; k < d_; ++k) out[k] = eval(x, k);
  return out;
}

}  // namespace cuckoowalk
