#pragma once

#include <map>
#include <span>
#include <vector>

#include "fflab/common.hpp"

namespace fflab {

struct Transaction {
  TxId id = 0;
  std::uint64_t payload = 0;  // opaque, unused by the protocol logic

  auto operator<=>(const Transaction&) const = default;
};

// A block identifies the whole chain from itself back to genesis, so a chain
// is referenced by its tip block id.
struct ChainRef {
  BlockId tip = 0;

  auto operator<=>(const ChainRef&) const = default;
};

struct Block {
  BlockId id = 0;
  BlockId parent = 0;  // 0 only for genesis
  Slot slot = kGenesisSlot;
  std::vector<TxId> body;  // sorted, unique

  auto operator<=>(const Block&) const = default;
};

// Content digest over (parent, slot, body); the id is a pure function of the
// block contents so identical blocks collide into one tree node.
BlockId block_digest(BlockId parent, Slot slot, std::span<const TxId> body);

Block make_genesis();

class BlockTree {
 public:
  BlockTree();

  ChainRef genesis() const { return ChainRef{genesis_id_}; }

  // Stores b (idempotent on duplicate id). Throws on unknown parent or a slot
  // that does not increase along the parent edge.
  ChainRef insert(const Block& b);

  bool contains(BlockId id) const { return blocks_.count(id) != 0; }
  const Block& block(BlockId id) const;
  Slot tip_slot(ChainRef c) const { return block(c.tip).slot; }
  std::size_t size() const { return blocks_.size(); }

  // a is on the ancestor path of b (reflexive): the paper's a <= b prefix test.
  bool is_prefix(ChainRef a, ChainRef b) const;
  bool conflicts(ChainRef a, ChainRef b) const;

  // Deepest ancestor of c (including c) with slot <= t - k; genesis if no
  // other block qualifies.
  ChainRef kappa_deep_prefix(ChainRef c, std::int64_t k, Slot t) const;

  // Longest chain that is a prefix of both a and b.
  ChainRef common_prefix(ChainRef a, ChainRef b) const;

  // Builds (does not store) a block extending c at slot t carrying every pool
  // transaction not already included in c.
  Block extend(ChainRef c, Slot t, std::span<const TxId> pool) const;

  bool chain_contains_tx(ChainRef c, TxId tx) const;

  // Children sorted by id; empty when none.
  const std::vector<BlockId>& children_of(BlockId id) const;

  const std::map<BlockId, Block>& blocks() const { return blocks_; }

  // Union of another tree into this one (gossip merge).
  void merge(const BlockTree& other);

 private:
  std::map<BlockId, Block> blocks_;
  std::map<BlockId, std::vector<BlockId>> children_;
  BlockId genesis_id_ = 0;
};

// Chain total pre-order: a.tip.slot <= b.tip.slot.
bool chain_leq(const BlockTree& tree, ChainRef a, ChainRef b);

// Maximal element under chain_leq; ties broken by smallest block id so the
// result is independent of input order.
ChainRef max_chain(const BlockTree& tree, std::span<const ChainRef> chains);

}  // namespace fflab
