#include "beamsw/rng.hpp"

namespace beamsw {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  return mix64(fnv1a64(tag, mix64(seed)));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::string_view role) {
  return mix64(fnv1a64(role, derive_seed(seed, tag)));
}

}  // namespace beamsw
