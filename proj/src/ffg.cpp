#include "fflab/ffg.hpp"

#include <algorithm>
#include <set>

namespace fflab {

bool checkpoint_before(const Checkpoint& a, const Checkpoint& b) {
  if (a.c != b.c) return a.c < b.c;
  if (a.p != b.p) return a.p < b.p;
  return a.chain.tip < b.chain.tip;
}

bool CheckpointLattice::is_justified(const Checkpoint& c) const {
  return std::binary_search(justified.begin(), justified.end(), c, checkpoint_before);
}

bool CheckpointLattice::is_finalized(const Checkpoint& c) const {
  return std::binary_search(finalized.begin(), finalized.end(), c, checkpoint_before);
}

namespace {

// Greatest checkpoint: maximal under the (c, p) pre-order, ties broken by
// smallest chain id for determinism.
Checkpoint pick_greatest(const std::vector<Checkpoint>& cps) {
  Checkpoint best = cps.front();
  for (const Checkpoint& c : cps) {
    if (c.c > best.c || (c.c == best.c && c.p > best.p) ||
        (c.c == best.c && c.p == best.p && c.chain.tip < best.chain.tip)) {
      best = c;
    }
  }
  return best;
}

}  // namespace

CheckpointLattice compute_lattice(const View& view, std::uint32_t n) {
  const BlockTree& tree = view.tree();
  const Checkpoint gen = genesis_checkpoint();
  const std::uint32_t q = quorum_threshold(n);

  // Valid links grouped by target checkpoint slot, deduplicated by content.
  std::map<Slot, std::set<FfgVote>> by_level;
  for (const VoteMsg& vm : view.votes())
    if (vm.ffg && ffg_vote_valid(*vm.ffg, tree)) by_level[vm.ffg->target.c].insert(*vm.ffg);

  std::set<Checkpoint> justified{gen};
  for (const auto& [level, links] : by_level) {
    std::vector<const FfgVote*> qual;
    for (const FfgVote& l : links)
      if (justified.count(l.source)) qual.push_back(&l);
    if (qual.empty()) continue;

    std::set<BlockId> cands;
    for (const FfgVote* l : qual) {
      const Block* b = &tree.block(l->target.chain.tip);
      for (;;) {
        cands.insert(b->id);
        if (b->id == l->source.chain.tip) break;
        b = &tree.block(b->parent);
      }
    }
    for (BlockId id : cands) {
      ChainRef chi{id};
      std::set<ValidatorId> senders;
      for (const FfgVote* l : qual)
        if (tree.is_prefix(l->source.chain, chi) && tree.is_prefix(chi, l->target.chain))
          senders.insert(l->sender);
      if (senders.size() >= q) justified.insert(Checkpoint{chi, level, tree.tip_slot(chi)});
    }
  }

  CheckpointLattice out;
  out.justified.assign(justified.begin(), justified.end());
  std::sort(out.justified.begin(), out.justified.end(), checkpoint_before);

  for (const Checkpoint& c : out.justified) {
    if (c == gen) {
      out.finalized.push_back(c);
      continue;
    }
    auto it = by_level.find(c.c + 1);
    if (it == by_level.end()) continue;
    std::set<ValidatorId> senders;
    for (const FfgVote& l : it->second)
      if (l.source == c) senders.insert(l.sender);
    if (senders.size() >= q) out.finalized.push_back(c);
  }
  std::sort(out.finalized.begin(), out.finalized.end(), checkpoint_before);

  out.gj = pick_greatest(out.justified);
  out.gf = pick_greatest(out.finalized);
  return out;
}

const CheckpointLattice& FfgCache::lattice(const View& view, std::uint32_t n) {
  auto key = std::make_pair(view.fingerprint(), n);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, compute_lattice(view, n)).first;
  return it->second;
}

std::vector<Checkpoint> justified_set(const View& view, std::uint32_t n) {
  return compute_lattice(view, n).justified;
}

std::vector<Checkpoint> finalized_set(const View& view, std::uint32_t n) {
  return compute_lattice(view, n).finalized;
}

Checkpoint greatest_justified(const View& view, std::uint32_t n) {
  return compute_lattice(view, n).gj;
}

Checkpoint greatest_finalized(const View& view, std::uint32_t n) {
  return compute_lattice(view, n).gf;
}

bool is_finalized_chain(const View& view, std::uint32_t n, ChainRef c) {
  return view.tree().is_prefix(c, greatest_finalized(view, n).chain);
}

}  // namespace fflab
