#pragma once

/**
 * Seed derivation and run identity.
 *
 * splitmix64 is used both to fan a sweep seed out into independent per-run
 * seeds and to turn a run seed into a stable RFC-4122-shaped id, so the same
 * configuration always produces the same transcript name.
 */

#include <cstdint>
#include <cstdio>
#include <string>

namespace dialectic {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for the index-th run of a sweep. Adjacent indices land far apart.
inline std::uint64_t derive_run_seed(std::uint64_t sweep_seed, std::size_t index) {
  std::uint64_t state = sweep_seed + (static_cast<std::uint64_t>(index) + 1) *
                                         0x9e3779b97f4a7c15ULL;
  return splitmix64(state);
}

// Formats two splitmix outputs as a version-4 UUID. Not random — the whole
// point is that the id is a pure function of the seed.
inline std::string uuid_from_seed(std::uint64_t seed) {
  std::uint64_t state = seed;
  std::uint64_t hi = splitmix64(state);
  std::uint64_t lo = splitmix64(state);
  // version nibble = 4, variant bits = 10
  hi = (hi & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;
  lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
  char buf[37];
  std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%04x-%012llx",
                static_cast<unsigned>(hi >> 32),
                static_cast<unsigned>((hi >> 16) & 0xffff),
                static_cast<unsigned>(hi & 0xffff),
                static_cast<unsigned>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xffffffffffffULL));
  return std::string(buf);
}

}  // namespace dialectic
