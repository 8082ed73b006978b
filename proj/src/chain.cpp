#include "fflab/chain.hpp"

#include <algorithm>

namespace fflab {

BlockId block_digest(BlockId parent, Slot slot, std::span<const TxId> body) {
  Hash64 h = 0x6666666c61620001ull;
  h = hash_combine(h, parent);
  h = hash_combine(h, static_cast<std::uint64_t>(slot));
  for (TxId tx : body) h = hash_combine(h, tx);
  return h;
}

Block make_genesis() {
  Block g;
  g.parent = 0;
  g.slot = kGenesisSlot;
  g.id = block_digest(0, kGenesisSlot, {});
  return g;
}

BlockTree::BlockTree() {
  Block g = make_genesis();
  genesis_id_ = g.id;
  blocks_.emplace(g.id, std::move(g));
}

ChainRef BlockTree::insert(const Block& b) {
  if (auto it = blocks_.find(b.id); it != blocks_.end()) return ChainRef{b.id};
  if (b.id == genesis_id_) return ChainRef{b.id};
  auto parent = blocks_.find(b.parent);
  if (parent == blocks_.end())
    raise(Errc::unknown_parent, "insert: parent block not present");
  if (parent->second.slot >= b.slot)
    raise(Errc::slot_not_increasing, "insert: slot must exceed parent slot");
  blocks_.emplace(b.id, b);
  auto& kids = children_[b.parent];
  kids.insert(std::lower_bound(kids.begin(), kids.end(), b.id), b.id);
  return ChainRef{b.id};
}

const Block& BlockTree::block(BlockId id) const {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) raise(Errc::unknown_block, "block id not present in tree");
  return it->second;
}

bool BlockTree::is_prefix(ChainRef a, ChainRef b) const {
  const Block* pa = &block(a.tip);
  const Block* pb = &block(b.tip);
  while (pb->slot > pa->slot) pb = &block(pb->parent);
  return pb->id == pa->id;
}

bool BlockTree::conflicts(ChainRef a, ChainRef b) const {
  return !is_prefix(a, b) && !is_prefix(b, a);
}

ChainRef BlockTree::kappa_deep_prefix(ChainRef c, std::int64_t k, Slot t) const {
  const Block* b = &block(c.tip);
  while (b->slot > t - k && b->id != genesis_id_) b = &block(b->parent);
  return ChainRef{b->id};
}

ChainRef BlockTree::common_prefix(ChainRef a, ChainRef b) const {
  const Block* pa = &block(a.tip);
  const Block* pb = &block(b.tip);
  while (pa->id != pb->id) {
    if (pa->slot > pb->slot)
      pa = &block(pa->parent);
    else if (pb->slot > pa->slot)
      pb = &block(pb->parent);
    else {
      pa = &block(pa->parent);
      pb = &block(pb->parent);
    }
  }
  return ChainRef{pa->id};
}

Block BlockTree::extend(ChainRef c, Slot t, std::span<const TxId> pool) const {
  const Block& tip = block(c.tip);
  if (tip.slot >= t) raise(Errc::chain_too_long, "extend: chain already at or past slot");
  Block b;
  b.parent = tip.id;
  b.slot = t;
  for (TxId tx : pool)
    if (!chain_contains_tx(c, tx)) b.body.push_back(tx);
  std::sort(b.body.begin(), b.body.end());
  b.body.erase(std::unique(b.body.begin(), b.body.end()), b.body.end());
  b.id = block_digest(b.parent, b.slot, b.body);
  return b;
}

bool BlockTree::chain_contains_tx(ChainRef c, TxId tx) const {
  const Block* b = &block(c.tip);
  for (;;) {
    if (std::binary_search(b->body.begin(), b->body.end(), tx)) return true;
    if (b->id == genesis_id_) return false;
    b = &block(b->parent);
  }
}

const std::vector<BlockId>& BlockTree::children_of(BlockId id) const {
  static const std::vector<BlockId> kNone;
  auto it = children_.find(id);
  return it == children_.end() ? kNone : it->second;
}

void BlockTree::merge(const BlockTree& other) {
  // Parents precede children in slot order, so inserting by ascending slot
  // never hits a missing parent.
  std::vector<const Block*> pending;
  for (const auto& [id, b] : other.blocks_)
    if (!contains(id)) pending.push_back(&b);
  std::sort(pending.begin(), pending.end(),
            [](const Block* x, const Block* y) { return x->slot < y->slot; });
  for (const Block* b : pending) insert(*b);
}

bool chain_leq(const BlockTree& tree, ChainRef a, ChainRef b) {
  return tree.tip_slot(a) <= tree.tip_slot(b);
}

ChainRef max_chain(const BlockTree& tree, std::span<const ChainRef> chains) {
  if (chains.empty()) raise(Errc::empty_set, "max_chain: empty set");
  ChainRef best = chains.front();
  Slot best_slot = tree.tip_slot(best);
  for (ChainRef c : chains.subspan(1)) {
    Slot s = tree.tip_slot(c);
    if (s > best_slot || (s == best_slot && c.tip < best.tip)) {
      best = c;
      best_slot = s;
    }
  }
  return best;
}

}  // namespace fflab
