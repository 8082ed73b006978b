#include "fflab/forkchoice.hpp"

#include <algorithm>
#include <map>

namespace fflab {

VoteList view_votes(const View& view) {
  return VoteList(view.votes().begin(), view.votes().end());
}

VoteList fil_eq(const VoteList& votes) {
  std::set<ValidatorId> eq;
  std::map<std::pair<ValidatorId, Slot>, ChainRef> seen;
  for (const VoteMsg& v : votes) {
    auto [it, fresh] = seen.emplace(std::make_pair(v.sender, v.slot), v.chain);
    if (!fresh && it->second != v.chain) eq.insert(v.sender);
  }
  VoteList out;
  for (const VoteMsg& v : votes)
    if (!eq.count(v.sender)) out.push_back(v);
  return out;
}

VoteList fil_exp(const VoteList& votes, Slot t, std::int64_t eta) {
  VoteList out;
  for (const VoteMsg& v : votes)
    if (v.slot >= t - eta - 1) out.push_back(v);
  return out;
}

VoteList fil_lmd(const VoteList& votes) {
  std::map<ValidatorId, Slot> latest;
  for (const VoteMsg& v : votes) {
    auto [it, fresh] = latest.emplace(v.sender, v.slot);
    if (!fresh && v.slot > it->second) it->second = v.slot;
  }
  VoteList out;
  for (const VoteMsg& v : votes)
    if (v.slot == latest.at(v.sender)) out.push_back(v);
  return out;
}

VoteList fil_rlmd(const VoteList& votes, Slot t, std::int64_t eta) {
  return fil_lmd(fil_exp(fil_eq(votes), t, eta));
}

std::set<ValidatorId> senders_s(const View& view, Slot t, std::int64_t eta) {
  std::set<ValidatorId> out;
  for (const VoteMsg& v : view.votes())
    if (v.slot >= t - eta - 1) out.insert(v.sender);
  return out;
}

VoteList votes_for(const View& view, ChainRef chain, Slot t, std::int64_t eta) {
  VoteList out;
  const BlockTree& tree = view.tree();
  // A chain this view has never seen cannot be a prefix of any of its votes:
  // every vote's ancestors are present in the tree.
  if (!tree.contains(chain.tip)) return out;
  for (const VoteMsg& v : fil_rlmd(view_votes(view), t, eta))
    if (tree.is_prefix(chain, v.chain)) out.push_back(v);
  return out;
}

namespace {

// Accumulates one unit onto every block from tip (inclusive) up to stop
// (inclusive); tip must extend stop.
void bump_path(const BlockTree& tree, BlockId tip, BlockId stop,
               std::map<BlockId, std::uint64_t>& w) {
  BlockId cur = tip;
  for (;;) {
    ++w[cur];
    if (cur == stop) return;
    cur = tree.block(cur).parent;
  }
}

ChainRef best_of(const BlockTree& tree, const std::vector<BlockId>& qualifying) {
  ChainRef best{qualifying.front()};
  Slot best_slot = tree.tip_slot(best);
  for (BlockId id : qualifying) {
    Slot s = tree.tip_slot(ChainRef{id});
    if (s > best_slot || (s == best_slot && id < best.tip)) {
      best = ChainRef{id};
      best_slot = s;
    }
  }
  return best;
}

}  // namespace

ChainRef mfc(const View& v, const View& v_prime, ChainRef root, Slot t, std::int64_t eta,
             const FcOptions& opts) {
  // v_prime's tree answers all ancestry questions: every integrated vote is
  // resolvable within its own view, and the protocol only passes frozen views
  // that are subsets of the current one.
  const BlockTree& tree = v_prime.tree();
  if (!tree.contains(root.tip)) raise(Errc::unknown_root, "mfc: root not resolvable");

  VoteList a = fil_rlmd(view_votes(v), t, eta);
  VoteList b = fil_rlmd(view_votes(v_prime), t, eta);
  const std::size_t s = senders_s(v_prime, t, eta).size();

  std::map<BlockId, std::uint64_t> weight;
  if (!opts.sender_level_intersection) {
    // Message-identity intersection; both lists are duplicate-free and sorted.
    VoteList inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    for (const VoteMsg& m : inter)
      if (tree.is_prefix(root, m.chain)) bump_path(tree, m.chain.tip, root.tip, weight);
  } else {
    // A sender counts for chi when its latest votes in both views extend chi:
    // bump the common prefix of each sender's tips across the two lists.
    std::map<ValidatorId, std::vector<ChainRef>> ta, tb;
    for (const VoteMsg& m : a) ta[m.sender].push_back(m.chain);
    for (const VoteMsg& m : b) tb[m.sender].push_back(m.chain);
    for (const auto& [sender, tips_a] : ta) {
      auto it = tb.find(sender);
      if (it == tb.end()) continue;
      ChainRef common = tips_a.front();
      for (ChainRef c : tips_a) common = tree.common_prefix(common, c);
      for (ChainRef c : it->second) common = tree.common_prefix(common, c);
      if (tree.is_prefix(root, common)) bump_path(tree, common.tip, root.tip, weight);
    }
  }

  std::vector<BlockId> qualifying{root.tip};
  for (const auto& [id, w] : weight)
    if (2 * w > s) qualifying.push_back(id);
  return best_of(tree, qualifying);
}

ChainRef rlmd_ghost(const View& view, ChainRef b_start, Slot t, std::int64_t eta) {
  const BlockTree& tree = view.tree();
  if (!tree.contains(b_start.tip)) raise(Errc::unknown_block, "rlmd_ghost: unknown start");

  std::map<BlockId, std::uint64_t> weight;
  for (const VoteMsg& m : fil_rlmd(view_votes(view), t, eta))
    if (tree.tip_slot(m.chain) <= t) bump_path(tree, m.chain.tip, tree.genesis().tip, weight);

  auto w_of = [&](BlockId id) {
    auto it = weight.find(id);
    return it == weight.end() ? std::uint64_t{0} : it->second;
  };

  BlockId cur = b_start.tip;
  for (;;) {
    BlockId best = 0;
    bool found = false;
    std::uint64_t best_w = 0;
    for (BlockId kid : tree.children_of(cur)) {  // ascending id: first max wins ties
      if (tree.block(kid).slot > t) continue;
      std::uint64_t w = w_of(kid);
      if (!found || w > best_w) {
        best = kid;
        best_w = w;
        found = true;
      }
    }
    if (!found) return ChainRef{cur};
    cur = best;
  }
}

std::pair<ChainRef, VoteList> fast_confirm_simple(const View& view, Slot t, std::uint32_t n) {
  const BlockTree& tree = view.tree();

  // Distinct-sender support per block over raw slot-t votes.
  std::map<ValidatorId, std::set<BlockId>> tips;
  for (const VoteMsg& v : view.votes())
    if (v.slot == t) tips[v.sender].insert(v.chain.tip);

  std::map<BlockId, std::uint32_t> support;
  for (const auto& [sender, sender_tips] : tips) {
    std::set<BlockId> visited;
    for (BlockId tip : sender_tips) {
      BlockId cur = tip;
      for (;;) {
        if (!visited.insert(cur).second) break;
        ++support[cur];
        if (cur == tree.genesis().tip) break;
        cur = tree.block(cur).parent;
      }
    }
  }

  std::vector<BlockId> qualifying;
  for (const auto& [id, sup] : support)
    if (sup >= quorum_threshold(n)) qualifying.push_back(id);
  if (qualifying.empty()) return {view.genesis(), {}};

  ChainRef best = best_of(tree, qualifying);
  VoteList q;
  for (const VoteMsg& v : view.votes())
    if (v.slot == t && tree.is_prefix(best, v.chain)) q.push_back(v);
  return {best, q};
}

std::pair<ChainRef, VoteList> fast_confirm_gj(const View& view, Slot t, std::uint32_t n,
                                              FfgCache* cache) {
  auto [chain, cert] = fast_confirm_simple(view, t, n);
  Checkpoint gj = cache ? cache->lattice(view, n).gj : greatest_justified(view, n);
  if (view.tree().is_prefix(gj.chain, chain)) return {chain, std::move(cert)};
  return {gj.chain, {}};
}

}  // namespace fflab
