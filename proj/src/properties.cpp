#include "fflab/properties.hpp"

#include <algorithm>
#include <sstream>

#include "fflab/validator.hpp"

namespace fflab {

Verdict make_pass(std::string name, std::string detail) {
  return Verdict{Verdict::Status::pass, std::move(name), std::move(detail)};
}
Verdict make_fail(std::string name, std::string witness) {
  return Verdict{Verdict::Status::fail, std::move(name), std::move(witness)};
}
Verdict make_skip(std::string name, std::string reason) {
  return Verdict{Verdict::Status::skip, std::move(name), std::move(reason)};
}

namespace {

Round total_rounds(const Trace& trace) { return static_cast<Round>(trace.H.size()); }

RoundClock clock_of(const Trace& trace) { return RoundClock{trace.config.delta}; }

std::string fmt(const char* what, std::initializer_list<std::int64_t> xs) {
  std::ostringstream os;
  os << what;
  for (auto x : xs) os << ' ' << x;
  return os.str();
}

// Distinct output tips with one representative (validator, round) witness.
struct TipWitness {
  BlockId tip;
  ValidatorId v;
  Round r;
};

template <typename Pick, typename Filter>
std::vector<TipWitness> collect_tips(const Trace& trace, Pick pick, Filter keep) {
  std::map<BlockId, TipWitness> seen;
  for (Round r = 0; r < total_rounds(trace); ++r) {
    const auto& rows = trace.outputs[static_cast<std::size_t>(r)];
    for (ValidatorId v = 0; v < trace.config.n; ++v) {
      if (!keep(v, r)) continue;
      BlockId tip = pick(rows[v]);
      seen.emplace(tip, TipWitness{tip, v, r});
    }
  }
  std::vector<TipWitness> out;
  for (auto& [id, w] : seen) out.push_back(w);
  return out;
}

std::optional<std::pair<TipWitness, TipWitness>> first_conflict(
    const Trace& trace, const std::vector<TipWitness>& a, const std::vector<TipWitness>& b) {
  for (const TipWitness& x : a)
    for (const TipWitness& y : b)
      if (trace.blocks.conflicts(ChainRef{x.tip}, ChainRef{y.tip})) return std::make_pair(x, y);
  return std::nullopt;
}

}  // namespace

std::optional<ChainRef> honest_proposal(const Trace& trace, Slot t) {
  auto it = trace.proposers.find(t);
  if (it == trace.proposers.end()) return std::nullopt;
  RoundClock clock = clock_of(trace);
  Round pr = clock.propose_round(t);
  if (!trace.honest_at(it->second, pr)) return std::nullopt;
  for (const SendRec& s : trace.sends) {
    if (s.round != pr || s.sender != it->second) continue;
    if (const auto* tob = std::get_if<ProposeTob>(&s.msg)) {
      if (tob->slot == t) return tob->chain_p;
    } else if (const auto* rl = std::get_if<ProposeRlmd>(&s.msg)) {
      if (rl->slot == t) return rl->chain_p;
    }
  }
  return std::nullopt;
}

std::vector<FfgVote> sent_ffg_votes(const Trace& trace, bool honest_only) {
  std::vector<FfgVote> out;
  for (const SendRec& s : trace.sends) {
    if (honest_only && !s.honest_at_send) continue;
    if (const auto* v = std::get_if<VoteMsg>(&s.msg))
      if (v->ffg) out.push_back(*v->ffg);
  }
  return out;
}

std::vector<AckMsg> sent_acks(const Trace& trace, bool honest_only) {
  std::vector<AckMsg> out;
  for (const SendRec& s : trace.sends) {
    if (honest_only && !s.honest_at_send) continue;
    if (const auto* a = std::get_if<AckMsg>(&s.msg)) out.push_back(*a);
  }
  return out;
}

Verdict check_available_safety(const Trace& trace, Round t_after) {
  auto tips = collect_tips(
      trace, [](const OutputsRow& row) { return row.available; },
      [&](ValidatorId v, Round r) { return r >= t_after && trace.honest_at(v, r); });
  if (auto w = first_conflict(trace, tips, tips))
    return make_fail("available_safety",
                     fmt("conflicting available chains: validators/rounds",
                         {w->first.v, w->first.r, w->second.v, w->second.r}));
  return make_pass("available_safety");
}

Verdict check_finalized_safety_and_accountability(const Trace& trace) {
  auto tips = collect_tips(
      trace, [](const OutputsRow& row) { return row.finalized; },
      [&](ValidatorId v, Round r) { return trace.honest_at(v, r); });
  auto w = first_conflict(trace, tips, tips);
  if (!w) return make_pass("finalized_safety", "no conflicting finalizations");

  auto votes = sent_ffg_votes(trace, false);
  auto acks = sent_acks(trace, false);
  View v1 = trace.validator_view(w->first.v, w->first.r);
  View v2 = trace.validator_view(w->second.v, w->second.r);
  AccountabilityReport rep;
  try {
    rep = accountable_set(votes, acks, v1, v2, trace.config.n);
  } catch (const Error& e) {
    return make_fail("finalized_safety", std::string("accountability failed: ") + e.what());
  }
  auto byz = trace.adversarial_ever();
  if (rep.flagged.size() < accountability_threshold(trace.config.n))
    return make_fail("finalized_safety", fmt("too few flagged", {(std::int64_t)rep.flagged.size()}));
  for (ValidatorId id : rep.flagged)
    if (!byz.count(id)) return make_fail("finalized_safety", fmt("honest validator flagged", {id}));
  std::ostringstream os;
  os << "conflict attributed to";
  for (ValidatorId id : rep.flagged) os << ' ' << id;
  return make_pass("finalized_safety", os.str());
}

Verdict check_reorg_resilience(const Trace& trace, Slot t_reorg, Round T_reorg) {
  auto tips = collect_tips(
      trace, [](const OutputsRow& row) { return row.available; },
      [&](ValidatorId v, Round r) { return r >= T_reorg && trace.honest_at(v, r); });
  for (Slot t = t_reorg; t < trace.config.num_slots; ++t) {
    auto chain_p = honest_proposal(trace, t);
    if (!chain_p) continue;
    for (const TipWitness& w : tips)
      if (trace.blocks.conflicts(*chain_p, ChainRef{w.tip}))
        return make_fail("reorg_resilience",
                         fmt("honest proposal reorged: slot/validator/round", {t, w.v, w.r}));
  }
  return make_pass("reorg_resilience");
}

Verdict check_finality_liveness(const Trace& trace) {
  const SimConfig& cfg = trace.config;
  if (!variant_is_3sf(cfg.variant)) return make_skip("finality_liveness", "no finalized output");
  if (trace.adversarial_ever().size() * 3 >= cfg.n)
    return make_skip("finality_liveness", "f >= n/3");
  RoundClock clock = clock_of(trace);
  Round start = std::max(cfg.gst_round, cfg.gat_round) + 4 * cfg.delta;
  bool any = false;
  for (Slot t = 0; t < cfg.num_slots; ++t) {
    if (clock.propose_round(t) < start) continue;
    Round deadline = clock.fastconfirm_round(t + 2);
    if (deadline >= total_rounds(trace)) continue;
    auto chain_p = honest_proposal(trace, t);
    if (!chain_p) continue;
    any = true;
    const auto& rows = trace.outputs[static_cast<std::size_t>(deadline)];
    for (ValidatorId v = 0; v < cfg.n; ++v) {
      if (!trace.active_at(v, deadline)) continue;
      ChainRef fin{rows[v].finalized};
      if (!trace.blocks.is_prefix(*chain_p, fin))
        return make_fail("finality_liveness", fmt("slot/validator", {t, v}));
      for (const auto& [inj, tx] : trace.txs)
        if (inj <= clock.propose_round(t) && !trace.blocks.chain_contains_tx(fin, tx))
          return make_fail("finality_liveness", fmt("tx missing: slot/tx", {t, (std::int64_t)tx}));
    }
  }
  return make_pass("finality_liveness", any ? "" : "no qualifying slots");
}

Verdict check_two_slot_liveness(const Trace& trace) {
  const SimConfig& cfg = trace.config;
  if (!cfg.acks_enabled) return make_skip("two_slot_liveness", "acks disabled");
  RoundClock clock = clock_of(trace);
  Round start = std::max(cfg.gst_round, cfg.gat_round) + 4 * cfg.delta;
  bool any = false;
  for (Slot t = 0; t < cfg.num_slots; ++t) {
    if (clock.propose_round(t) < start) continue;
    Round deadline = clock.merge_round(t + 1);
    if (deadline >= total_rounds(trace)) continue;
    auto chain_p = honest_proposal(trace, t);
    if (!chain_p) continue;
    any = true;
    View obs = trace.global_view(deadline);
    std::vector<AckMsg> acks(obs.acks().begin(), obs.acks().end());
    auto finals = observer_finalize(acks, obs, cfg.n);
    bool ok = false;
    for (const Checkpoint& c : finals)
      if (obs.tree().contains(c.chain.tip) && obs.tree().contains(chain_p->tip) &&
          obs.tree().is_prefix(*chain_p, c.chain))
        ok = true;
    if (!ok) return make_fail("two_slot_liveness", fmt("slot", {t}));
  }
  return make_pass("two_slot_liveness", any ? "" : "no qualifying slots");
}

Verdict check_fastconf_liveness(const Trace& trace) {
  const SimConfig& cfg = trace.config;
  RoundClock clock = clock_of(trace);
  bool any = false;
  for (Slot t = 0; t < cfg.num_slots; ++t) {
    // The lemma leans on synchrony from the merge round preceding the slot
    // (the frozen views feeding the vote) through the fast-confirm round.
    Round window_from = t > 0 ? clock.merge_round(t - 1) : clock.propose_round(t);
    if (window_from < cfg.gst_round) continue;
    bool touches_async = false;
    for (Round r = window_from; r <= clock.fastconfirm_round(t); ++r)
      if (cfg.in_async_window(r)) touches_async = true;
    if (touches_async) continue;
    Round vote_r = clock.vote_round(t);
    Round fc_r = clock.fastconfirm_round(t);
    if (fc_r >= total_rounds(trace)) continue;
    if (trace.H[static_cast<std::size_t>(vote_r)].size() < quorum_threshold(cfg.n)) continue;
    auto chain_p = honest_proposal(trace, t);
    if (!chain_p) continue;
    any = true;
    const auto& rows = trace.outputs[static_cast<std::size_t>(fc_r)];
    for (ValidatorId v : trace.H[static_cast<std::size_t>(fc_r)])
      if (!trace.blocks.is_prefix(*chain_p, ChainRef{rows[v].available}))
        return make_fail("fastconf_liveness", fmt("slot/validator", {t, v}));
  }
  return make_pass("fastconf_liveness", any ? "" : "no qualifying slots");
}

Verdict check_kappa_liveness(const Trace& trace) {
  const SimConfig& cfg = trace.config;
  if (!is_eta_compliant(trace, cfg)) return make_skip("kappa_liveness", "not eta-compliant");
  if (trace.adversarial_ever().size() * 3 >= cfg.n) return make_skip("kappa_liveness", "f >= n/3");
  const Round t_conf = 8 * cfg.kappa * cfg.delta + cfg.delta;
  for (const auto& [inj, tx] : trace.txs) {
    for (Round r = inj + t_conf; r < total_rounds(trace); ++r) {
      const auto& rows = trace.outputs[static_cast<std::size_t>(r)];
      for (ValidatorId v : trace.H[static_cast<std::size_t>(r)])
        if (!trace.blocks.chain_contains_tx(ChainRef{rows[v].available}, tx))
          return make_fail("kappa_liveness",
                           fmt("tx/validator/round", {(std::int64_t)tx, v, r}));
    }
  }
  return make_pass("kappa_liveness");
}

Verdict check_prefix_and_monotone(const Trace& trace) {
  const SimConfig& cfg = trace.config;
  for (ValidatorId v = 0; v < cfg.n; ++v) {
    ChainRef prev_fin{trace.blocks.genesis()};
    for (Round r = 0; r < total_rounds(trace); ++r) {
      if (!trace.honest_at(v, r)) break;  // corruption is permanent
      const OutputsRow& row = trace.outputs[static_cast<std::size_t>(r)][v];
      if (!trace.blocks.is_prefix(ChainRef{row.finalized}, ChainRef{row.available}))
        return make_fail("prefix_and_monotone", fmt("fin not prefix of ava", {v, r}));
      if (!trace.blocks.is_prefix(prev_fin, ChainRef{row.finalized}))
        return make_fail("prefix_and_monotone", fmt("fin regressed", {v, r}));
      prev_fin = ChainRef{row.finalized};
    }
  }
  return make_pass("prefix_and_monotone");
}

Verdict check_async_resilience(const Trace& trace) {
  const SimConfig& cfg = trace.config;
  if (cfg.pi <= 0 || !cfg.t_a) return make_skip("async_resilience", "pi = 0");
  RoundClock clock = clock_of(trace);

  // Guarantees start at slot 0 for GST = 0 runs; otherwise only from the
  // GST-healing slot onwards (the definitions' t_reorg / T_after).
  Slot from_slot = 0;
  Round from_round = 0;
  if (cfg.gst_round > 0) {
    auto heal = find_t_heal(trace);
    if (!heal) return make_skip("async_resilience", "no healing slot before the window");
    from_slot = *heal;
    from_round = clock.fastconfirm_round(*heal);
  }

  auto aware_tips = collect_tips(
      trace, [](const OutputsRow& row) { return row.available; },
      [&](ValidatorId v, Round r) { return r >= from_round && trace.aware_at(v, r); });

  for (Slot t = from_slot; t <= *cfg.t_a; ++t) {
    auto chain_p = honest_proposal(trace, t);
    if (!chain_p) continue;
    for (const TipWitness& w : aware_tips)
      if (trace.blocks.conflicts(*chain_p, ChainRef{w.tip}))
        return make_fail("async_resilience",
                         fmt("pre-window proposal reorged: slot/validator/round", {t, w.v, w.r}));
  }

  Round cutoff = clock.vote_round(*cfg.t_a);
  auto early_tips = collect_tips(
      trace, [](const OutputsRow& row) { return row.available; },
      [&](ValidatorId v, Round r) {
        return r >= from_round && r <= cutoff && trace.honest_at(v, r);
      });
  if (auto w = first_conflict(trace, early_tips, aware_tips))
    return make_fail("async_resilience",
                     fmt("pre-window chain conflicts: validators/rounds",
                         {w->first.v, w->first.r, w->second.v, w->second.r}));
  return make_pass("async_resilience");
}

Verdict check_honest_never_slashable(const Trace& trace) {
  auto votes = sent_ffg_votes(trace, true);
  auto acks = sent_acks(trace, true);
  if (!detect_e1(votes).empty()) return make_fail("honest_never_slashable", "E1 over honest votes");
  if (!detect_e2(votes).empty()) return make_fail("honest_never_slashable", "E2 over honest votes");
  if (!detect_e3(votes, acks).empty())
    return make_fail("honest_never_slashable", "E3 over honest messages");

  // Per-sender discipline: one ffg vote per slot with target slot = vote
  // slot, sources non-decreasing across slots.
  std::map<ValidatorId, std::map<Slot, FfgVote>> per;
  for (const SendRec& s : trace.sends) {
    if (!s.honest_at_send) continue;
    const auto* v = std::get_if<VoteMsg>(&s.msg);
    if (!v || !v->ffg) continue;
    auto [it, fresh] = per[v->sender].emplace(v->slot, *v->ffg);
    if (!fresh && !(it->second == *v->ffg))
      return make_fail("honest_never_slashable", fmt("two ffg votes in slot", {v->sender, v->slot}));
    if (v->ffg->target.c != v->slot)
      return make_fail("honest_never_slashable", fmt("target slot mismatch", {v->sender, v->slot}));
  }
  for (const auto& [sender, by_slot] : per) {
    const FfgVote* prev = nullptr;
    for (const auto& [slot, vote] : by_slot) {
      if (prev && !checkpoint_leq(prev->source, vote.source))
        return make_fail("honest_never_slashable", fmt("source regressed", {sender, slot}));
      prev = &vote;
    }
  }
  return make_pass("honest_never_slashable");
}

namespace {

// First slot at or after `threshold` whose proposer is honest and proposed,
// with every honest validator active at the slot's fast-confirm round.
std::optional<Slot> heal_slot_from(const Trace& trace, Round threshold) {
  const SimConfig& cfg = trace.config;
  RoundClock clock = clock_of(trace);
  for (Slot t = 0; t < cfg.num_slots; ++t) {
    if (clock.propose_round(t) < threshold) continue;
    Round fc = clock.fastconfirm_round(t);
    if (fc >= total_rounds(trace)) break;
    bool all_active = true;
    for (ValidatorId v = 0; v < cfg.n; ++v)
      if (trace.honest_at(v, fc) && !trace.active_at(v, fc)) all_active = false;
    if (!all_active) continue;
    if (!honest_proposal(trace, t)) continue;
    return t;
  }
  return std::nullopt;
}

// Round from which unconditional synchrony holds again: past GST and past
// the asynchronous window, if either exists.
Round synchrony_resumes_at(const SimConfig& cfg) {
  Round threshold = cfg.gst_round == 0 ? 0 : cfg.gst_round + cfg.delta;
  if (cfg.pi > 0 && cfg.t_a)
    threshold = std::max(threshold, cfg.async_window_end() + cfg.delta);
  return threshold;
}

}  // namespace

std::optional<Slot> find_t_heal(const Trace& trace) {
  const SimConfig& cfg = trace.config;
  return heal_slot_from(trace, cfg.gst_round == 0 ? 0 : cfg.gst_round + cfg.delta);
}

LatencyReport latency_metrics(const Trace& trace) {
  LatencyReport rep;
  const SimConfig& cfg = trace.config;
  for (const auto& [inj, tx] : trace.txs) {
    LatencyReport::Item item;
    item.tx = tx;
    item.injected = inj;
    for (Round r = inj; r < total_rounds(trace) && !item.available_delay; ++r) {
      bool all = !trace.H[static_cast<std::size_t>(r)].empty();
      for (ValidatorId v : trace.H[static_cast<std::size_t>(r)])
        if (!trace.blocks.chain_contains_tx(
                ChainRef{trace.outputs[static_cast<std::size_t>(r)][v].available}, tx))
          all = false;
      if (all) item.available_delay = r - inj;
    }
    if (variant_is_3sf(cfg.variant)) {
      for (Round r = inj; r < total_rounds(trace) && !item.finalized_delay; ++r) {
        bool all = !trace.H[static_cast<std::size_t>(r)].empty();
        for (ValidatorId v : trace.H[static_cast<std::size_t>(r)])
          if (!trace.blocks.chain_contains_tx(
                  ChainRef{trace.outputs[static_cast<std::size_t>(r)][v].finalized}, tx))
            all = false;
        if (all) item.finalized_delay = r - inj;
      }
    }
    rep.items.push_back(item);
  }

  auto median = [](std::vector<Round> xs) -> std::optional<Round> {
    if (xs.empty()) return std::nullopt;
    std::sort(xs.begin(), xs.end());
    return xs[xs.size() / 2];
  };
  std::vector<Round> av, fin;
  for (const auto& it : rep.items) {
    if (it.available_delay) av.push_back(*it.available_delay);
    if (it.finalized_delay) fin.push_back(*it.finalized_delay);
  }
  rep.median_available = median(std::move(av));
  rep.median_finalized = median(std::move(fin));
  return rep;
}

std::vector<Verdict> run_all_checks(const Trace& trace) {
  const SimConfig& cfg = trace.config;
  RoundClock clock = clock_of(trace);
  std::vector<Verdict> out;

  bool compliant = is_eta_compliant(trace, cfg);
  std::optional<Slot> t_heal = find_t_heal(trace);

  std::optional<Round> t_after;
  std::optional<Slot> reorg_from;
  if (cfg.gst_round == 0) {
    t_after = 0;
    reorg_from = 0;
  } else if (t_heal) {
    t_after = clock.fastconfirm_round(*t_heal);
    reorg_from = *t_heal;
  }

  if (!compliant) {
    out.push_back(make_skip("available_safety", "not eta-compliant"));
    out.push_back(make_skip("reorg_resilience", "not eta-compliant"));
  } else if (!t_after) {
    out.push_back(make_skip("available_safety", "no healing slot"));
    out.push_back(make_skip("reorg_resilience", "no healing slot"));
  } else {
    out.push_back(check_available_safety(trace, *t_after));
    out.push_back(check_reorg_resilience(trace, *reorg_from, *t_after));
  }

  out.push_back(check_finalized_safety_and_accountability(trace));
  out.push_back(check_prefix_and_monotone(trace));
  out.push_back(check_honest_never_slashable(trace));
  out.push_back(check_finality_liveness(trace));
  out.push_back(check_two_slot_liveness(trace));
  out.push_back(check_fastconf_liveness(trace));
  out.push_back(compliant ? check_kappa_liveness(trace)
                          : make_skip("kappa_liveness", "not eta-compliant"));
  out.push_back(check_async_resilience(trace));
  return out;
}

}  // namespace fflab
