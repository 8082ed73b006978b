#pragma once

#include <set>
#include <utility>
#include <vector>

#include "fflab/ffg.hpp"
#include "fflab/messages.hpp"

namespace fflab {

// Expiry period: votes older than eta + 1 slots are ignored by fork choice.
inline std::int64_t eta_for_pi(std::int64_t pi) { return pi > 0 ? pi + 2 : 1; }

struct FcOptions {
  // Experimental: intersect the two mfc vote sets per sender instead of per
  // message. Off by default; the literal rule intersects message sets.
  bool sender_level_intersection = false;
};

using VoteList = std::vector<VoteMsg>;

VoteList view_votes(const View& view);

// Drops every vote by a sender that equivocates within the given set.
VoteList fil_eq(const VoteList& votes);
// Keeps votes from slots >= t - eta - 1.
VoteList fil_exp(const VoteList& votes, Slot t, std::int64_t eta);
// Keeps per sender only the votes with maximal slot.
VoteList fil_lmd(const VoteList& votes);
// The composition lmd(exp(eq(votes), t)).
VoteList fil_rlmd(const VoteList& votes, Slot t, std::int64_t eta);

// Senders with a non-expired vote (no equivocation or latest-message filter).
std::set<ValidatorId> senders_s(const View& view, Slot t, std::int64_t eta);

// Filtered votes for chains extending `chain`.
VoteList votes_for(const View& view, ChainRef chain, Slot t, std::int64_t eta);

// Majority fork choice: the longest chain extending root backed, in both
// views, by latest non-expired votes of more than half the senders counted
// in v_prime. Falls back to root.
ChainRef mfc(const View& v, const View& v_prime, ChainRef root, Slot t, std::int64_t eta,
             const FcOptions& opts = {});

// GHOST walk over latest non-expired non-equivocating votes, children and
// vote tips restricted to slots <= t. Ties go to the smallest block id.
ChainRef rlmd_ghost(const View& view, ChainRef b_start, Slot t, std::int64_t eta);

// Chain backed by slot-t votes of at least ceil(2n/3) distinct senders, with
// the supporting votes; (genesis, {}) when no chain qualifies.
std::pair<ChainRef, VoteList> fast_confirm_simple(const View& view, Slot t, std::uint32_t n);

// fast_confirm_simple result if it extends the greatest justified chain,
// otherwise (GJ(view).chain, {}).
std::pair<ChainRef, VoteList> fast_confirm_gj(const View& view, Slot t, std::uint32_t n,
                                              FfgCache* cache = nullptr);

}  // namespace fflab
