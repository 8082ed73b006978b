#pragma once

#include <map>
#include <vector>

#include "fflab/messages.hpp"

namespace fflab {

// Justified and finalized checkpoints of one view, plus their maxima under
// the lexicographic (c, p) order. finalized is always a subset of justified
// and both contain the genesis checkpoint.
struct CheckpointLattice {
  std::vector<Checkpoint> justified;  // sorted by (c, p, chain id)
  std::vector<Checkpoint> finalized;
  Checkpoint gj;
  Checkpoint gf;

  bool is_justified(const Checkpoint& c) const;
  bool is_finalized(const Checkpoint& c) const;
};

// Evaluates the justification fixpoint ascending by checkpoint slot. The
// candidate universe at slot c is every chain sandwiched between the source
// and target chain of some vote targeting c; nothing outside it can gather a
// supermajority of sandwiching links.
CheckpointLattice compute_lattice(const View& view, std::uint32_t n);

// Memoizes lattices by view fingerprint; one cache per simulation.
class FfgCache {
 public:
  const CheckpointLattice& lattice(const View& view, std::uint32_t n);
  std::size_t size() const { return cache_.size(); }

 private:
  std::map<std::pair<Hash64, std::uint32_t>, CheckpointLattice> cache_;
};

std::vector<Checkpoint> justified_set(const View& view, std::uint32_t n);
std::vector<Checkpoint> finalized_set(const View& view, std::uint32_t n);
Checkpoint greatest_justified(const View& view, std::uint32_t n);
Checkpoint greatest_finalized(const View& view, std::uint32_t n);

// A chain is finalized according to a view iff it is a prefix of GF's chain.
bool is_finalized_chain(const View& view, std::uint32_t n, ChainRef c);

// Canonical checkpoint ordering for lattice storage: (c, p, chain id).
bool checkpoint_before(const Checkpoint& a, const Checkpoint& b);

}  // namespace fflab
