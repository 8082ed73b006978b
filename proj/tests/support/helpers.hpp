#pragma once

// Shared fixture helpers for the unit and acceptance suites.

#include <vector>

#include "fflab/messages.hpp"

namespace fflab::test {

// Incrementally built view over a block tree; blocks are keyed by the order
// they were added so tests can reference them by index.
struct ViewBuilder {
  View view;
  std::vector<Block> made;

  ViewBuilder() { made.push_back(make_genesis()); }

  ChainRef genesis() const { return view.genesis(); }

  // Adds a block on top of made[parent_index].
  ChainRef add(std::size_t parent_index, Slot slot, std::vector<TxId> body = {}) {
    Block b;
    b.parent = made.at(parent_index).id;
    b.slot = slot;
    b.body = std::move(body);
    std::sort(b.body.begin(), b.body.end());
    b.id = block_digest(b.parent, b.slot, b.body);
    view.insert(Message{BlockMsg{b}});
    made.push_back(b);
    return ChainRef{b.id};
  }

  ChainRef chain(std::size_t index) const { return ChainRef{made.at(index).id}; }
  const Block& block(std::size_t index) const { return made.at(index); }

  Checkpoint cp(std::size_t index, Slot c) const {
    return Checkpoint{chain(index), c, made.at(index).slot};
  }

  VoteMsg vote(std::size_t chain_index, Slot slot, ValidatorId sender,
               std::optional<FfgVote> ffg = std::nullopt) const {
    VoteMsg v;
    v.chain = chain(chain_index);
    v.tip = made.at(chain_index);
    v.slot = slot;
    v.sender = sender;
    v.ffg = std::move(ffg);
    return v;
  }

  // Vote carrying the link cp(source) -> cp(target).
  VoteMsg ffg_vote(std::size_t chain_index, Slot slot, ValidatorId sender,
                   std::size_t src_index, Slot src_c, std::size_t tgt_index, Slot tgt_c) const {
    return vote(chain_index, slot, sender, FfgVote{cp(src_index, src_c), cp(tgt_index, tgt_c), sender});
  }

  void insert(const VoteMsg& v) { view.insert(Message{v}); }
};

}  // namespace fflab::test
