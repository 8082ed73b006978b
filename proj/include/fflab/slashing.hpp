#pragma once

#include <map>
#include <set>
#include <span>

#include "fflab/ffg.hpp"
#include "fflab/messages.hpp"

namespace fflab {

// A pair of messages that by itself re-triggers the violated predicate.
struct VotePairEvidence {
  FfgVote first;
  FfgVote second;
};

struct AckEvidence {
  FfgVote vote;
  AckMsg ack;
};

// E1, double voting: two distinct ffg votes whose targets share the
// checkpoint slot.
std::map<ValidatorId, VotePairEvidence> detect_e1(std::span<const FfgVote> votes);

// E2, surround voting: votes C1->C2 and C3->C4 with C3 strictly below C1 in
// the (c, p) order and C2.c < C4.c.
std::map<ValidatorId, VotePairEvidence> detect_e2(std::span<const FfgVote> votes);

// E3, ack surround: an ack for Ca (read as the link Ca->Ca) surrounded by a
// vote C1->C2 with C1 < Ca and Ca.c < C2.c.
std::map<ValidatorId, AckEvidence> detect_e3(std::span<const FfgVote> votes,
                                             std::span<const AckMsg> acks);

struct AccountabilityReport {
  std::set<ValidatorId> flagged;
  std::map<ValidatorId, VotePairEvidence> e1;
  std::map<ValidatorId, VotePairEvidence> e2;
  std::map<ValidatorId, AckEvidence> e3;
};

// Union of the three detectors over every sent vote/ack, given two views that
// finalize conflicting chains. Throws Errc::no_conflict when the greatest
// finalized chains of the two views do not conflict.
AccountabilityReport accountable_set(std::span<const FfgVote> all_votes,
                                     std::span<const AckMsg> all_acks, const View& view1,
                                     const View& view2, std::uint32_t n);

}  // namespace fflab
