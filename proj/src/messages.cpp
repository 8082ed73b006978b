#include "fflab/messages.hpp"

#include <algorithm>

namespace fflab {

Checkpoint genesis_checkpoint() {
  return Checkpoint{ChainRef{make_genesis().id}, 0, kGenesisSlot};
}

bool checkpoint_leq(const Checkpoint& a, const Checkpoint& b) {
  if (a.c != b.c) return a.c < b.c;
  return a.p <= b.p;
}

bool checkpoint_strict_less(const Checkpoint& a, const Checkpoint& b) {
  return checkpoint_leq(a, b) && (a.c != b.c || a.p != b.p);
}

namespace {

Hash64 hash_checkpoint(Hash64 h, const Checkpoint& c) {
  h = hash_combine(h, c.chain.tip);
  h = hash_combine(h, static_cast<std::uint64_t>(c.c));
  h = hash_combine(h, static_cast<std::uint64_t>(c.p));
  return h;
}

Hash64 hash_ffg(Hash64 h, const FfgVote& v) {
  h = hash_checkpoint(h, v.source);
  h = hash_checkpoint(h, v.target);
  return hash_combine(h, v.sender);
}

Hash64 hash_vote(const VoteMsg& v) {
  Hash64 h = 0x766f7465ull;
  h = hash_combine(h, v.chain.tip);
  h = hash_combine(h, v.ffg.has_value());
  if (v.ffg) h = hash_ffg(h, *v.ffg);
  h = hash_combine(h, static_cast<std::uint64_t>(v.slot));
  return hash_combine(h, v.sender);
}

}  // namespace

Hash64 message_hash(const Message& m) {
  return std::visit(
      [](const auto& msg) -> Hash64 {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, BlockMsg>) {
          return hash_combine(0x626c6bull, msg.block.id);
        } else if constexpr (std::is_same_v<T, VoteMsg>) {
          return hash_vote(msg);
        } else if constexpr (std::is_same_v<T, ProposeTob>) {
          Hash64 h = 0x70726f70ull;
          h = hash_combine(h, msg.chain_p.tip);
          h = hash_combine(h, msg.fast_chain.tip);
          for (const auto& v : msg.cert) h = hash_combine(h, hash_vote(v));
          h = hash_combine(h, msg.gj.has_value());
          if (msg.gj) h = hash_checkpoint(h, *msg.gj);
          h = hash_combine(h, static_cast<std::uint64_t>(msg.slot));
          return hash_combine(h, msg.sender);
        } else if constexpr (std::is_same_v<T, ProposeRlmd>) {
          Hash64 h = 0x70726f76ull;
          h = hash_combine(h, msg.chain_p.tip);
          // Carried views hash order-independently.
          Hash64 acc = 0;
          for (const auto& b : msg.view_blocks) acc ^= mix64(b.id);
          for (const auto& v : msg.view_votes) acc ^= hash_vote(v);
          h = hash_combine(h, acc);
          h = hash_combine(h, static_cast<std::uint64_t>(msg.slot));
          return hash_combine(h, msg.sender);
        } else {
          static_assert(std::is_same_v<T, AckMsg>);
          Hash64 h = 0x61636bull;
          h = hash_checkpoint(h, msg.checkpoint);
          h = hash_combine(h, static_cast<std::uint64_t>(msg.slot));
          return hash_combine(h, msg.sender);
        }
      },
      m);
}

Slot message_slot(const Message& m) {
  return std::visit(
      [](const auto& msg) -> Slot {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, BlockMsg>)
          return msg.block.slot;
        else
          return msg.slot;
      },
      m);
}

ValidatorId message_sender(const Message& m) {
  return std::visit(
      [](const auto& msg) -> ValidatorId {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, BlockMsg>)
          return 0;
        else
          return msg.sender;
      },
      m);
}

const char* message_kind(const Message& m) {
  switch (m.index()) {
    case 0: return "block";
    case 1: return "vote";
    case 2: return "propose_tob";
    case 3: return "propose_rlmd";
    default: return "ack";
  }
}

bool ffg_vote_valid(const FfgVote& v, const BlockTree& tree) {
  if (!tree.contains(v.source.chain.tip) || !tree.contains(v.target.chain.tip)) return false;
  if (tree.tip_slot(v.source.chain) != v.source.p) return false;
  if (tree.tip_slot(v.target.chain) != v.target.p) return false;
  if (v.source.c >= v.target.c) return false;
  return tree.is_prefix(v.source.chain, v.target.chain);
}

void View::add_block(const Block& b) {
  if (tree_.contains(b.id)) return;
  if (b.id != block_digest(b.parent, b.slot, b.body)) return;  // malformed transport
  if (!tree_.contains(b.parent)) {
    for (const auto& p : pending_blocks_)
      if (p.id == b.id) return;
    pending_blocks_.push_back(b);
    return;
  }
  if (tree_.block(b.parent).slot >= b.slot) return;  // violates the slot invariant
  tree_.insert(b);
  fingerprint_ ^= mix64(b.id);
  integrate_pending();
}

void View::add_vote(const VoteMsg& v) {
  if (votes_.count(v)) return;
  if (v.tip.id == v.chain.tip) add_block(v.tip);
  if (tree_.contains(v.chain.tip)) {
    votes_.insert(v);
    fingerprint_ ^= hash_combine(0x76ull, hash_vote(v));
    return;
  }
  for (const auto& p : pending_votes_)
    if (p == v) return;
  pending_votes_.push_back(v);
}

void View::add_ack(const AckMsg& a) {
  if (acks_.insert(a).second) fingerprint_ ^= hash_combine(0x61ull, message_hash(Message{a}));
}

void View::integrate_pending() {
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < pending_blocks_.size();) {
      const Block& b = pending_blocks_[i];
      if (tree_.contains(b.id)) {
        pending_blocks_.erase(pending_blocks_.begin() + static_cast<std::ptrdiff_t>(i));
        progress = true;
      } else if (tree_.contains(b.parent)) {
        if (tree_.block(b.parent).slot < b.slot) {
          tree_.insert(b);
          fingerprint_ ^= mix64(b.id);
        }
        pending_blocks_.erase(pending_blocks_.begin() + static_cast<std::ptrdiff_t>(i));
        progress = true;
      } else {
        ++i;
      }
    }
    for (std::size_t i = 0; i < pending_votes_.size();) {
      const VoteMsg& v = pending_votes_[i];
      if (tree_.contains(v.chain.tip)) {
        if (!votes_.count(v)) {
          votes_.insert(v);
          fingerprint_ ^= hash_combine(0x76ull, hash_vote(v));
        }
        pending_votes_.erase(pending_votes_.begin() + static_cast<std::ptrdiff_t>(i));
        progress = true;
      } else {
        ++i;
      }
    }
  }
}

void View::insert(const Message& m) {
  std::visit(
      [this](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, BlockMsg>) {
          add_block(msg.block);
        } else if constexpr (std::is_same_v<T, VoteMsg>) {
          add_vote(msg);
        } else if constexpr (std::is_same_v<T, ProposeTob>) {
          if (msg.tip.id == msg.chain_p.tip) add_block(msg.tip);
          for (const auto& v : msg.cert) add_vote(v);
        } else if constexpr (std::is_same_v<T, ProposeRlmd>) {
          for (const auto& b : msg.view_blocks) add_block(b);
          if (msg.tip.id == msg.chain_p.tip) add_block(msg.tip);
          for (const auto& v : msg.view_votes) add_vote(v);
        } else {
          static_assert(std::is_same_v<T, AckMsg>);
          add_ack(msg);
        }
      },
      m);
}

void View::merge(const View& other) {
  for (const auto& [id, b] : other.tree_.blocks()) add_block(b);
  for (const auto& b : other.pending_blocks_) add_block(b);
  for (const auto& v : other.votes_) add_vote(v);
  for (const auto& v : other.pending_votes_) add_vote(v);
  for (const auto& a : other.acks_) add_ack(a);
}

std::set<ValidatorId> View::equivocators() const {
  std::set<ValidatorId> out;
  // votes_ is ordered by (slot, sender, chain, ffg): equal-slot equal-sender
  // runs are adjacent, so one sweep finds chain disagreements.
  auto it = votes_.begin();
  while (it != votes_.end()) {
    auto run = it;
    ChainRef first_chain = it->chain;
    bool diff = false;
    ++it;
    while (it != votes_.end() && it->slot == run->slot && it->sender == run->sender) {
      if (it->chain != first_chain) diff = true;
      ++it;
    }
    if (diff) out.insert(run->sender);
  }
  return out;
}

bool quorum_cert_valid(std::span<const VoteMsg> cert, ChainRef fast_chain, Slot slot,
                       std::uint32_t n, const BlockTree& tree, ChainRef empty_fallback) {
  if (cert.empty()) return fast_chain == empty_fallback;
  if (!tree.contains(fast_chain.tip)) return false;
  std::set<ValidatorId> senders;
  for (const auto& v : cert) {
    if (v.slot != slot) return false;
    if (!tree.contains(v.chain.tip)) return false;
    if (!tree.is_prefix(fast_chain, v.chain)) return false;
    senders.insert(v.sender);
  }
  return senders.size() >= quorum_threshold(n);
}

}  // namespace fflab
