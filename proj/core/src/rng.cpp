#include "essk/rng.hpp"

namespace essk {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Stream substream(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose) {
  const std::uint64_t salt = static_cast<std::uint64_t>(purpose);
  const std::uint64_t a = splitmix64(seed ^ splitmix64(salt));
  const std::uint64_t b = splitmix64(a + splitmix64(index));
  std::seed_seq seq{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32)};
  return Stream(seq);
}

}  // namespace essk
