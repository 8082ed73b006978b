#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fflab/adversary.hpp"
#include "fflab/simnet.hpp"
#include "fflab/slashing.hpp"

namespace fflab {

struct Verdict {
  enum class Status { pass, fail, skip };
  Status status = Status::pass;
  std::string name;
  std::string detail;  // minimal witness on failure, reason on skip

  bool failed() const { return status == Status::fail; }
};

Verdict make_pass(std::string name, std::string detail = "");
Verdict make_fail(std::string name, std::string witness);
Verdict make_skip(std::string name, std::string reason);

// The chain proposed at slot t by the elected proposer, provided the proposer
// was honest at the propose round and actually sent a proposal.
std::optional<ChainRef> honest_proposal(const Trace& trace, Slot t);

std::vector<FfgVote> sent_ffg_votes(const Trace& trace, bool honest_only);
std::vector<AckMsg> sent_acks(const Trace& trace, bool honest_only);

// No two honest available-chain outputs from rounds >= t_after conflict.
Verdict check_available_safety(const Trace& trace, Round t_after);

// Either no two honest finalized outputs conflict, or the accountable set
// over all sent messages has >= ceil(n/3) members, none of them honest.
Verdict check_finalized_safety_and_accountability(const Trace& trace);

// Chains proposed by round-honest proposers at slots >= t_reorg never
// conflict with honest available chains at rounds >= T_reorg.
Verdict check_reorg_resilience(const Trace& trace, Slot t_reorg, Round T_reorg);

// Honest proposal of slot t (post max(GST,GAT)+4*delta, f < n/3) is in every
// active validator's finalized chain at round 4d(t+2)+2d, together with the
// pool at propose time.
Verdict check_finality_liveness(const Trace& trace);

// With acks enabled: observer finalization of the slot-t proposal by round
// 4d(t+1)+3d.
Verdict check_two_slot_liveness(const Trace& trace);

// With >= ceil(2n/3) active at the vote round and an honest proposal, every
// active validator fast-confirms it by 4dt+2d.
Verdict check_fastconf_liveness(const Trace& trace);

// Compliant runs include every pool transaction in every honest-active
// available chain within 8*kappa*delta + delta rounds.
Verdict check_kappa_liveness(const Trace& trace);

// chainfin prefix of chainava at every honest round; chainfin monotone.
Verdict check_prefix_and_monotone(const Trace& trace);

// Asynchrony reorg and safety resilience over the aware sets (pi > 0 runs).
Verdict check_async_resilience(const Trace& trace);

// Detectors over honest-sent messages stay empty, and every honest sender
// keeps the per-slot vote discipline (one ffg vote per slot, target slot =
// vote slot, non-decreasing sources).
Verdict check_honest_never_slashable(const Trace& trace);

// First healing slot: post GST+delta, full honest activity at the fast
// confirmation round, honest proposer that proposed.
std::optional<Slot> find_t_heal(const Trace& trace);

struct LatencyReport {
  struct Item {
    TxId tx = 0;
    Round injected = 0;
    std::optional<Round> available_delay;
    std::optional<Round> finalized_delay;
  };
  std::vector<Item> items;
  std::optional<Round> median_available;
  std::optional<Round> median_finalized;
};
LatencyReport latency_metrics(const Trace& trace);

// All checkers with the theorem hypotheses wired in as guards: compliance
// gates the dynamically-available properties, healing sets t_after when
// GST > 0, accountable safety always runs.
std::vector<Verdict> run_all_checks(const Trace& trace);

}  // namespace fflab
