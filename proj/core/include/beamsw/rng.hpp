#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace beamsw {

/// Random stream used everywhere in the simulator. Every stochastic
/// component takes one explicitly; nothing draws from ambient entropy.
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Derives an independent stream seed from a run seed and a sequence of
/// string tags, e.g. derive_seed(3, "proposed-dqn", "explore").
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::string_view role);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace beamsw
