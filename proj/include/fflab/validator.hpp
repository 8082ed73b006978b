#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fflab/forkchoice.hpp"
#include "fflab/messages.hpp"

namespace fflab {

enum class Variant { tob_prob, tob_3sf, rlmd, rlmd_3sf };

inline bool variant_is_tob(Variant v) { return v == Variant::tob_prob || v == Variant::tob_3sf; }
inline bool variant_is_3sf(Variant v) { return v == Variant::tob_3sf || v == Variant::rlmd_3sf; }

struct ProtocolParams {
  Variant variant = Variant::tob_3sf;
  bool acks_enabled = false;
  std::uint32_t n = 1;
  std::int64_t delta = 1;
  std::int64_t kappa = 2;
  std::int64_t eta = 1;
  bool uniform_chainfin = false;  // force the prefix-max finalized update in both variants
  FcOptions fc;
};

// A slot is 4*delta consecutive rounds: propose, vote, fast-confirm and merge
// hooks fire at offsets 0, delta, 2*delta and 3*delta.
struct RoundClock {
  std::int64_t delta = 1;

  Slot slot(Round r) const { return r / (4 * delta); }
  Round propose_round(Slot t) const { return 4 * delta * t; }
  Round vote_round(Slot t) const { return 4 * delta * t + delta; }
  Round fastconfirm_round(Slot t) const { return 4 * delta * t + 2 * delta; }
  Round merge_round(Slot t) const { return 4 * delta * t + 3 * delta; }

  enum class Phase { propose, vote, fastconfirm, merge, other };
  Phase phase(Round r) const {
    Round off = r - 4 * delta * slot(r);
    if (off == 0) return Phase::propose;
    if (off == delta) return Phase::vote;
    if (off == 2 * delta) return Phase::fastconfirm;
    if (off == 3 * delta) return Phase::merge;
    return Phase::other;
  }
};

enum class Status { asleep, joining, active };

// Activation round for a validator waking at round r: the vote round of the
// slot t whose joining window (voting(t-2)+delta, voting(t-1)+delta] covers r.
Round activation_for_wake(Round r, std::int64_t delta);

// Observer finalization via acknowledgments: justified checkpoints backed by
// a supermajority of distinct ack senders.
std::vector<Checkpoint> observer_finalize(std::span<const AckMsg> acks, const View& view,
                                          std::uint32_t n);

// One honest validator: the round-driven step function over the four protocol
// variants, plus the silent joining protocol.
class Validator {
 public:
  Validator(ValidatorId id, const ProtocolParams& params, FfgCache* cache = nullptr);

  ValidatorId id() const { return id_; }
  Status status() const { return status_; }
  Round activation_round() const { return activation_round_; }

  // Starts participation without the joining protocol (validators awake from
  // round 0).
  void start_active();

  void wake(Round r);   // no-op when already joining or active
  void go_to_sleep();

  // Processes the round: merges the inbox, runs the phase hook, returns the
  // messages to gossip (empty while joining). `proposer` is the elected
  // proposer of slot(r), revealed from the propose round onwards.
  std::vector<Message> step(Round r, std::span<const Message> inbox,
                            std::optional<ValidatorId> proposer, std::span<const TxId> pool);

  // Protocol outputs.
  ChainRef available_chain() const;  // Chain for the probabilistic variants
  ChainRef finalized_chain() const { return chainfin_; }

  const View& view() const { return view_; }
  const View& frozen_view() const { return v_frozen_; }
  ChainRef chain_frozen() const { return chain_frozen_; }
  const Checkpoint& gj_frozen() const { return gj_frozen_; }

 private:
  const CheckpointLattice& lattice(const View& v);

  void receive(const Message& m, Round r);
  void handle_proposal_tob_prob(const ProposeTob& p);
  void evaluate_buffered_proposals(Slot t);

  std::optional<Message> phase_propose(Slot t, std::span<const TxId> pool);
  std::optional<Message> phase_vote(Slot t);
  std::optional<Message> phase_fastconfirm(Slot t);
  void phase_merge(Slot t);

  ChainRef vote_chain_for(Slot t, ChainRef chain_can) const;
  VoteMsg make_vote(ChainRef chain, std::optional<FfgVote> ffg, Slot t) const;

  ValidatorId id_;
  ProtocolParams params_;
  RoundClock clock_;
  FfgCache* cache_ = nullptr;
  mutable CheckpointLattice scratch_;

  Status status_ = Status::asleep;
  Round activation_round_ = 0;
  std::optional<ValidatorId> current_proposer_;

  View view_;
  View v_frozen_;
  ChainRef chain_frozen_;
  Checkpoint gj_frozen_;
  ChainRef chain_out_;   // confirmed chain of the probabilistic variants
  ChainRef chainava_;
  ChainRef chainfin_;
  std::vector<ProposeTob> window_tob_;  // current-slot proposals, in receipt order
};

}  // namespace fflab
