#pragma once

#include <optional>
#include <set>
#include <tuple>
#include <variant>
#include <vector>

#include "fflab/chain.hpp"
#include "fflab/common.hpp"

namespace fflab {

// Checkpoints are (chain hash, checkpoint slot, cached proposal slot) triples;
// the cached p makes slashing decidable from the votes alone, and a
// checkpoint is well-formed only if p matches the actual tip slot.
struct Checkpoint {
  ChainRef chain;
  Slot c = 0;
  Slot p = kGenesisSlot;

  auto operator<=>(const Checkpoint&) const = default;
};

Checkpoint genesis_checkpoint();

// Lexicographic pre-order on (c, p).
bool checkpoint_leq(const Checkpoint& a, const Checkpoint& b);
// Strict order used by the surround predicates: leq and unequal on (c, p).
bool checkpoint_strict_less(const Checkpoint& a, const Checkpoint& b);

struct FfgVote {
  Checkpoint source;
  Checkpoint target;
  ValidatorId sender = 0;

  auto operator<=>(const FfgVote&) const = default;
};

struct VoteMsg {
  ChainRef chain;
  std::optional<FfgVote> ffg;  // absent in the purely dynamically-available variants
  Slot slot = 0;
  ValidatorId sender = 0;
  Block tip;  // transport: the block the vote is for

  // Identity excludes the carried block; two votes are the same message when
  // the voted chain, ffg payload, slot and sender coincide.
  auto key() const { return std::tie(slot, sender, chain, ffg); }
  bool operator==(const VoteMsg& o) const { return key() == o.key(); }
  bool operator<(const VoteMsg& o) const { return key() < o.key(); }
};

struct ProposeTob {
  ChainRef chain_p;
  Block tip;  // transport: tip of chain_p
  ChainRef fast_chain;
  std::vector<VoteMsg> cert;
  std::optional<Checkpoint> gj;  // present in the finality variant only
  Slot slot = 0;
  ValidatorId sender = 0;
};

struct ProposeRlmd {
  ChainRef chain_p;
  Block tip;
  std::vector<Block> view_blocks;  // the proposed view
  std::vector<VoteMsg> view_votes;
  Slot slot = 0;
  ValidatorId sender = 0;
};

struct AckMsg {
  Checkpoint checkpoint;
  Slot slot = 0;
  ValidatorId sender = 0;

  auto operator<=>(const AckMsg&) const = default;
};

struct BlockMsg {
  Block block;
};

using Message = std::variant<BlockMsg, VoteMsg, ProposeTob, ProposeRlmd, AckMsg>;

// Canonical content hash of a message; transport blocks of a vote do not
// contribute (the chain reference already pins them).
Hash64 message_hash(const Message& m);
Slot message_slot(const Message& m);
ValidatorId message_sender(const Message& m);  // 0 for bare blocks
const char* message_kind(const Message& m);

// An ffg link S -> T is valid iff S.chain is a prefix of T.chain, S.c < T.c,
// and both checkpoints carry the correct cached proposal slot.
bool ffg_vote_valid(const FfgVote& v, const BlockTree& tree);

// A deduplicated set of received messages. All fork-choice and finality
// functions are pure functions of a View. Votes whose chain is not yet
// resolvable are buffered and integrated once the missing block arrives, so
// merging is insensitive to gossip order.
class View {
 public:
  View() = default;

  void insert(const Message& m);
  void merge(const View& other);

  const BlockTree& tree() const { return tree_; }
  const std::set<VoteMsg>& votes() const { return votes_; }
  const std::set<AckMsg>& acks() const { return acks_; }
  ChainRef genesis() const { return tree_.genesis(); }

  // Order-independent digest of the integrated contents.
  Hash64 fingerprint() const { return fingerprint_; }

  std::size_t pending_votes() const { return pending_votes_.size(); }

  // Senders with two votes of equal slot for different chains.
  std::set<ValidatorId> equivocators() const;

 private:
  void add_block(const Block& b);
  void add_vote(const VoteMsg& v);
  void add_ack(const AckMsg& a);
  void integrate_pending();

  BlockTree tree_;
  std::set<VoteMsg> votes_;
  std::set<AckMsg> acks_;
  std::vector<VoteMsg> pending_votes_;
  std::vector<Block> pending_blocks_;
  Hash64 fingerprint_ = 0;
};

// Certificate check for TOB proposals: at least ceil(2n/3) distinct senders,
// each vote from `slot` and for an extension of fast_chain. An empty cert is
// acceptable only when fast_chain equals the variant's fallback chain.
bool quorum_cert_valid(std::span<const VoteMsg> cert, ChainRef fast_chain, Slot slot,
                       std::uint32_t n, const BlockTree& tree, ChainRef empty_fallback);

}  // namespace fflab
