#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fflab {

using Slot = std::int64_t;
using Round = std::int64_t;
using ValidatorId = std::uint32_t;
using BlockId = std::uint64_t;
using TxId = std::uint64_t;
using Hash64 = std::uint64_t;

inline constexpr Slot kGenesisSlot = -1;

enum class Errc {
  unknown_parent,
  slot_not_increasing,
  unknown_block,
  unknown_root,
  chain_too_long,
  empty_set,
  no_conflict,
  parse_error,
  constraint_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

// Supermajority threshold: ceil(2n/3) distinct validators.
inline std::uint32_t quorum_threshold(std::uint32_t n) { return (2 * n + 2) / 3; }

// Accountability threshold: ceil(n/3).
inline std::uint32_t accountability_threshold(std::uint32_t n) { return (n + 2) / 3; }

// 64-bit mixing (splitmix64 finalizer). Used for content digests and the
// seeded streams; fixed here so ids and schedules are stable across runs
// and platforms.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2)));
}

// Deterministic RNG stream for the simulator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x2545f4914f6cdd1dull) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  // Uniform in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) { return bound ? next() % bound : 0; }

 private:
  std::uint64_t state_;
};

}  // namespace fflab
