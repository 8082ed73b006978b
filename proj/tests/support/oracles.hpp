#pragma once

// Brute-force reference evaluators, written directly from the raw definitions
// and kept independent of the library's fork-choice and finality code paths.
// They exist to cross-check the optimized implementations on small random
// fixtures.

#include <vector>

#include "fflab/messages.hpp"

namespace fflab::oracle {

// Majority fork choice by exhaustive search over every chain in the tree.
ChainRef mfc_brute(const View& v, const View& v_prime, ChainRef root, Slot t, std::int64_t eta);

// Greedy GHOST walk with weights recomputed from scratch at every step.
ChainRef rlmd_ghost_brute(const View& view, ChainRef b_start, Slot t, std::int64_t eta);

// Justification by recursive evaluation over the full (block x slot) grid.
std::vector<Checkpoint> justified_brute(const View& view, std::uint32_t n);
std::vector<Checkpoint> finalized_brute(const View& view, std::uint32_t n);

// Seeded random fixtures: a block tree plus votes spread over two views with
// v a subset of v_prime.
struct Fixture {
  View v;
  View v_prime;
  ChainRef root;
  Slot t = 0;
  std::int64_t eta = 1;
  std::uint32_t n = 4;
};

Fixture random_forkchoice_fixture(std::uint64_t seed);
Fixture random_ffg_fixture(std::uint64_t seed);

}  // namespace fflab::oracle
