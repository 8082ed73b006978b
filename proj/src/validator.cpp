#include "fflab/validator.hpp"

#include <algorithm>

namespace fflab {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  // b > 0
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

}  // namespace

Round activation_for_wake(Round r, std::int64_t delta) {
  std::int64_t t = ceil_div(r - 2 * delta, 4 * delta) + 1;
  return 4 * delta * t + delta;
}

std::vector<Checkpoint> observer_finalize(std::span<const AckMsg> acks, const View& view,
                                          std::uint32_t n) {
  std::map<Checkpoint, std::set<ValidatorId>> backers;
  for (const AckMsg& a : acks) backers[a.checkpoint].insert(a.sender);
  CheckpointLattice lat = compute_lattice(view, n);
  std::vector<Checkpoint> out;
  for (const auto& [cp, senders] : backers)
    if (senders.size() >= quorum_threshold(n) && lat.is_justified(cp)) out.push_back(cp);
  std::sort(out.begin(), out.end(), checkpoint_before);
  return out;
}

Validator::Validator(ValidatorId id, const ProtocolParams& params, FfgCache* cache)
    : id_(id), params_(params), clock_{params.delta}, cache_(cache) {
  chain_frozen_ = view_.genesis();
  gj_frozen_ = genesis_checkpoint();
  chain_out_ = view_.genesis();
  chainava_ = view_.genesis();
  chainfin_ = view_.genesis();
}

void Validator::start_active() { status_ = Status::active; }

void Validator::wake(Round r) {
  if (status_ != Status::asleep) return;
  status_ = Status::joining;
  activation_round_ = activation_for_wake(r, params_.delta);
}

void Validator::go_to_sleep() { status_ = Status::asleep; }

ChainRef Validator::available_chain() const {
  return variant_is_3sf(params_.variant) ? chainava_ : chain_out_;
}

const CheckpointLattice& Validator::lattice(const View& v) {
  if (cache_) return cache_->lattice(v, params_.n);
  scratch_ = compute_lattice(v, params_.n);
  return scratch_;
}

void Validator::receive(const Message& m, Round r) {
  view_.insert(m);

  // Proposals act only inside the first delta rounds of their slot and only
  // when sent by the elected proposer.
  if (const auto* tob = std::get_if<ProposeTob>(&m)) {
    Slot t = clock_.slot(r);
    bool windowed = tob->slot == t && r <= clock_.vote_round(t) &&
                    current_proposer_ && tob->sender == *current_proposer_;
    if (!windowed) return;
    if (params_.variant == Variant::tob_prob) {
      handle_proposal_tob_prob(*tob);
      window_tob_.push_back(*tob);
    } else if (params_.variant == Variant::tob_3sf) {
      window_tob_.push_back(*tob);  // acted upon at the vote round
    }
    return;
  }
  if (const auto* rl = std::get_if<ProposeRlmd>(&m)) {
    if (!variant_is_tob(params_.variant)) {
      Slot t = clock_.slot(r);
      bool windowed = rl->slot == t && r <= clock_.vote_round(t) &&
                      current_proposer_ && rl->sender == *current_proposer_;
      if (!windowed) return;
      // View-merge: the proposed view joins the frozen view immediately.
      for (const Block& b : rl->view_blocks) v_frozen_.insert(Message{BlockMsg{b}});
      if (rl->tip.id == rl->chain_p.tip) v_frozen_.insert(Message{BlockMsg{rl->tip}});
      for (const VoteMsg& v : rl->view_votes) v_frozen_.insert(Message{v});
    }
  }
}

void Validator::handle_proposal_tob_prob(const ProposeTob& p) {
  const BlockTree& tree = view_.tree();
  if (!tree.contains(p.chain_p.tip) || tree.tip_slot(p.chain_p) != p.slot) return;
  if (!quorum_cert_valid(p.cert, p.fast_chain, p.slot - 1, params_.n, tree, view_.genesis()))
    return;
  if (tree.contains(p.fast_chain.tip) && tree.is_prefix(chain_frozen_, p.fast_chain))
    chain_frozen_ = p.fast_chain;
}

void Validator::evaluate_buffered_proposals(Slot t) {
  // Byzantine proposers may equivocate; evaluate in a deterministic order.
  std::vector<const ProposeTob*> props;
  for (const ProposeTob& p : window_tob_)
    if (p.slot == t) props.push_back(&p);
  std::stable_sort(props.begin(), props.end(), [](const ProposeTob* a, const ProposeTob* b) {
    return a->chain_p.tip < b->chain_p.tip;
  });

  const BlockTree& tree = view_.tree();
  for (const ProposeTob* p : props) {
    if (!p->gj) continue;
    if (!tree.contains(p->chain_p.tip) || tree.tip_slot(p->chain_p) != p->slot) continue;
    if (!quorum_cert_valid(p->cert, p->fast_chain, p->slot - 1, params_.n, tree, p->gj->chain))
      continue;
    if (!lattice(view_).is_justified(*p->gj)) continue;
    if (!checkpoint_leq(gj_frozen_, *p->gj)) continue;
    gj_frozen_ = *p->gj;
    if (!tree.is_prefix(gj_frozen_.chain, chain_frozen_)) chain_frozen_ = gj_frozen_.chain;
    if (tree.contains(p->fast_chain.tip) && tree.is_prefix(chain_frozen_, p->fast_chain))
      chain_frozen_ = p->fast_chain;
  }
}

std::vector<Message> Validator::step(Round r, std::span<const Message> inbox,
                                     std::optional<ValidatorId> proposer,
                                     std::span<const TxId> pool) {
  if (status_ == Status::asleep) return {};
  Slot t = clock_.slot(r);
  if (r == clock_.propose_round(t)) {
    current_proposer_ = proposer;
    window_tob_.clear();
  } else if (proposer) {
    current_proposer_ = proposer;
  }

  for (const Message& m : inbox) receive(m, r);

  if (status_ == Status::joining && r >= activation_round_) status_ = Status::active;

  std::optional<Message> out;
  switch (clock_.phase(r)) {
    case RoundClock::Phase::propose:
      // Joining proposers stay silent; the propose hook has no state updates.
      if (status_ == Status::active && proposer && *proposer == id_)
        out = phase_propose(t, pool);
      break;
    case RoundClock::Phase::vote:
      out = phase_vote(t);
      break;
    case RoundClock::Phase::fastconfirm:
      out = phase_fastconfirm(t);
      break;
    case RoundClock::Phase::merge:
      phase_merge(t);
      break;
    case RoundClock::Phase::other:
      break;
  }

  std::vector<Message> outbox;
  if (out) {
    receive(*out, r);  // own messages enter the own view immediately
    if (status_ == Status::active) outbox.push_back(std::move(*out));
  }
  return outbox;
}

std::optional<Message> Validator::phase_propose(Slot t, std::span<const TxId> pool) {
  const BlockTree& tree = view_.tree();
  switch (params_.variant) {
    case Variant::tob_prob: {
      auto [fast, cert] = fast_confirm_simple(view_, t - 1, params_.n);
      ChainRef can = mfc(view_, view_, fast, t, params_.eta, params_.fc);
      Block b = tree.extend(can, t, pool);
      return Message{ProposeTob{ChainRef{b.id}, b, fast, std::move(cert), std::nullopt, t, id_}};
    }
    case Variant::tob_3sf: {
      auto [fast, cert] = fast_confirm_gj(view_, t - 1, params_.n, cache_);
      ChainRef can = mfc(view_, view_, fast, t, params_.eta, params_.fc);
      Block b = tree.extend(can, t, pool);
      return Message{
          ProposeTob{ChainRef{b.id}, b, fast, std::move(cert), lattice(view_).gj, t, id_}};
    }
    case Variant::rlmd:
    case Variant::rlmd_3sf: {
      ChainRef root = params_.variant == Variant::rlmd ? view_.genesis() : lattice(view_).gj.chain;
      // One-deep prefix: a Byzantine block of slot t must not become the parent.
      ChainRef can = tree.kappa_deep_prefix(rlmd_ghost(view_, root, t, params_.eta), 1, t);
      Block b = tree.extend(can, t, pool);
      ProposeRlmd p;
      p.chain_p = ChainRef{b.id};
      p.tip = b;
      for (const auto& [id, blk] : tree.blocks())
        if (id != view_.genesis().tip) p.view_blocks.push_back(blk);
      p.view_votes.assign(view_.votes().begin(), view_.votes().end());
      p.slot = t;
      p.sender = id_;
      return Message{std::move(p)};
    }
  }
  return std::nullopt;
}

ChainRef Validator::vote_chain_for(Slot t, ChainRef chain_can) const {
  // A proposed chain from slot t extending the fork-choice output, from the
  // elected proposer only; smallest tip id among Byzantine duplicates.
  const BlockTree& tree = view_.tree();
  std::optional<ChainRef> best;
  for (const ProposeTob& p : window_tob_) {
    if (p.slot != t) continue;
    if (!tree.contains(p.chain_p.tip)) continue;
    if (tree.tip_slot(p.chain_p) != t) continue;
    if (!tree.is_prefix(chain_can, p.chain_p)) continue;
    if (!best || p.chain_p.tip < best->tip) best = p.chain_p;
  }
  return best.value_or(chain_can);
}

VoteMsg Validator::make_vote(ChainRef chain, std::optional<FfgVote> ffg, Slot t) const {
  VoteMsg v;
  v.chain = chain;
  v.ffg = std::move(ffg);
  v.slot = t;
  v.sender = id_;
  v.tip = view_.tree().block(chain.tip);
  return v;
}

std::optional<Message> Validator::phase_vote(Slot t) {
  const BlockTree& tree = view_.tree();
  switch (params_.variant) {
    case Variant::tob_prob: {
      ChainRef can = mfc(v_frozen_, view_, chain_frozen_, t, params_.eta, params_.fc);
      ChainRef deep = tree.kappa_deep_prefix(can, params_.kappa, t);
      std::vector<ChainRef> cands;
      for (ChainRef c : {chain_out_, deep})
        if (tree.is_prefix(c, can)) cands.push_back(c);
      chain_out_ = max_chain(tree, cands);
      return Message{make_vote(vote_chain_for(t, can), std::nullopt, t)};
    }
    case Variant::tob_3sf: {
      evaluate_buffered_proposals(t);
      ChainRef can = mfc(v_frozen_, view_, chain_frozen_, t, params_.eta, params_.fc);
      ChainRef deep = tree.kappa_deep_prefix(can, params_.kappa, t);
      std::vector<ChainRef> cands;
      for (ChainRef c : {chainava_, deep, gj_frozen_.chain})
        if (tree.is_prefix(c, can)) cands.push_back(c);
      chainava_ = max_chain(tree, cands);
      chainfin_ = tree.common_prefix(chainava_, lattice(view_).gf.chain);
      Checkpoint target{chainava_, t, tree.tip_slot(chainava_)};
      FfgVote ffg{gj_frozen_, target, id_};
      return Message{make_vote(vote_chain_for(t, can), ffg, t)};
    }
    case Variant::rlmd: {
      ChainRef can = rlmd_ghost(v_frozen_, v_frozen_.genesis(), t, params_.eta);
      ChainRef deep = tree.kappa_deep_prefix(can, params_.kappa, t);
      std::vector<ChainRef> cands;
      for (ChainRef c : {chain_out_, deep})
        if (tree.is_prefix(c, can)) cands.push_back(c);
      chain_out_ = max_chain(tree, cands);
      return Message{make_vote(can, std::nullopt, t)};
    }
    case Variant::rlmd_3sf: {
      Checkpoint gj = lattice(v_frozen_).gj;
      ChainRef can = rlmd_ghost(v_frozen_, gj.chain, t, params_.eta);
      ChainRef deep = tree.kappa_deep_prefix(can, params_.kappa, t);
      std::vector<ChainRef> cands;
      for (ChainRef c : {chainava_, deep, gj.chain})
        if (tree.is_prefix(c, can)) cands.push_back(c);
      chainava_ = max_chain(tree, cands);
      chainfin_ = tree.common_prefix(chainava_, lattice(view_).gf.chain);
      Checkpoint target{chainava_, t, tree.tip_slot(chainava_)};
      FfgVote ffg{gj, target, id_};
      return Message{make_vote(can, ffg, t)};
    }
  }
  return std::nullopt;
}

std::optional<Message> Validator::phase_fastconfirm(Slot t) {
  const BlockTree& tree = view_.tree();
  switch (params_.variant) {
    case Variant::tob_prob:
    case Variant::rlmd: {
      auto [fast, cert] = fast_confirm_simple(view_, t, params_.n);
      if (!cert.empty()) chain_out_ = fast;
      return std::nullopt;
    }
    case Variant::tob_3sf: {
      auto [fast, cert] = fast_confirm_gj(view_, t, params_.n, cache_);
      if (!tree.is_prefix(fast, chainava_)) chainava_ = fast;
      const CheckpointLattice& lat = lattice(view_);
      chainfin_ = params_.uniform_chainfin ? tree.common_prefix(chainava_, lat.gf.chain)
                                           : lat.gf.chain;
      if (params_.acks_enabled && lat.gj.c == t)
        return Message{AckMsg{lat.gj, t, id_}};
      return std::nullopt;
    }
    case Variant::rlmd_3sf: {
      auto [fast, cert] = fast_confirm_gj(view_, t, params_.n, cache_);
      if (!tree.is_prefix(fast, chainava_)) chainava_ = fast;
      const CheckpointLattice& lat = lattice(view_);
      chainfin_ = tree.common_prefix(chainava_, lat.gf.chain);
      if (params_.acks_enabled && lat.gj.c == t)
        return Message{AckMsg{lat.gj, t, id_}};
      return std::nullopt;
    }
  }
  return std::nullopt;
}

void Validator::phase_merge(Slot t) {
  v_frozen_ = view_;
  switch (params_.variant) {
    case Variant::tob_prob:
      chain_frozen_ = fast_confirm_simple(view_, t, params_.n).first;
      break;
    case Variant::tob_3sf: {
      chain_frozen_ = fast_confirm_gj(view_, t, params_.n, cache_).first;
      gj_frozen_ = lattice(view_).gj;
      break;
    }
    case Variant::rlmd:
    case Variant::rlmd_3sf:
      break;
  }
  window_tob_.clear();
}

}  // namespace fflab
