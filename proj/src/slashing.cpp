#include "fflab/slashing.hpp"

#include <algorithm>
#include <vector>

namespace fflab {

namespace {

// Distinct votes per sender, canonically ordered.
std::map<ValidatorId, std::vector<FfgVote>> by_sender(std::span<const FfgVote> votes) {
  std::map<ValidatorId, std::vector<FfgVote>> out;
  for (const FfgVote& v : votes) out[v.sender].push_back(v);
  for (auto& [id, vs] : out) {
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  }
  return out;
}

}  // namespace

std::map<ValidatorId, VotePairEvidence> detect_e1(std::span<const FfgVote> votes) {
  std::map<ValidatorId, VotePairEvidence> out;
  for (auto& [id, vs] : by_sender(votes)) {
    for (std::size_t i = 0; i < vs.size() && !out.count(id); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j)
        if (vs[i].target.c == vs[j].target.c) {
          out.emplace(id, VotePairEvidence{vs[i], vs[j]});
          break;
        }
  }
  return out;
}

std::map<ValidatorId, VotePairEvidence> detect_e2(std::span<const FfgVote> votes) {
  std::map<ValidatorId, VotePairEvidence> out;
  for (auto& [id, vs] : by_sender(votes)) {
    for (std::size_t i = 0; i < vs.size() && !out.count(id); ++i)
      for (std::size_t j = 0; j < vs.size(); ++j) {
        // vs[i] is C1->C2, vs[j] is C3->C4.
        if (i == j) continue;
        if (checkpoint_strict_less(vs[j].source, vs[i].source) &&
            vs[i].target.c < vs[j].target.c) {
          out.emplace(id, VotePairEvidence{vs[i], vs[j]});
          break;
        }
      }
  }
  return out;
}

std::map<ValidatorId, AckEvidence> detect_e3(std::span<const FfgVote> votes,
                                             std::span<const AckMsg> acks) {
  std::map<ValidatorId, std::vector<AckMsg>> acks_by;
  for (const AckMsg& a : acks) acks_by[a.sender].push_back(a);
  for (auto& [id, as] : acks_by) {
    std::sort(as.begin(), as.end());
    as.erase(std::unique(as.begin(), as.end()), as.end());
  }

  std::map<ValidatorId, AckEvidence> out;
  for (auto& [id, vs] : by_sender(votes)) {
    auto ai = acks_by.find(id);
    if (ai == acks_by.end()) continue;
    for (const FfgVote& v : vs) {
      if (out.count(id)) break;
      for (const AckMsg& a : ai->second)
        if (checkpoint_strict_less(v.source, a.checkpoint) && a.checkpoint.c < v.target.c) {
          out.emplace(id, AckEvidence{v, a});
          break;
        }
    }
  }
  return out;
}

AccountabilityReport accountable_set(std::span<const FfgVote> all_votes,
                                     std::span<const AckMsg> all_acks, const View& view1,
                                     const View& view2, std::uint32_t n) {
  // Some chain finalized per view1 must conflict with some chain finalized
  // per view2; the joint tree interprets both sides' tips.
  BlockTree joint = view1.tree();
  joint.merge(view2.tree());
  bool conflict = false;
  for (const Checkpoint& c1 : finalized_set(view1, n)) {
    for (const Checkpoint& c2 : finalized_set(view2, n))
      if (joint.conflicts(c1.chain, c2.chain)) conflict = true;
  }
  if (!conflict)
    raise(Errc::no_conflict, "accountable_set: finalized chains do not conflict");

  AccountabilityReport r;
  r.e1 = detect_e1(all_votes);
  r.e2 = detect_e2(all_votes);
  r.e3 = detect_e3(all_votes, all_acks);
  for (const auto& [id, ev] : r.e1) r.flagged.insert(id);
  for (const auto& [id, ev] : r.e2) r.flagged.insert(id);
  for (const auto& [id, ev] : r.e3) r.flagged.insert(id);
  return r;
}

}  // namespace fflab
