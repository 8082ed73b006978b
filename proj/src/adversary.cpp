#include "fflab/adversary.hpp"

#include <algorithm>
#include <optional>

namespace fflab {

namespace {

std::set<ValidatorId> to_set(const std::vector<ValidatorId>& v) {
  return std::set<ValidatorId>(v.begin(), v.end());
}

std::set<ValidatorId> set_minus(const std::set<ValidatorId>& a, const std::set<ValidatorId>& b) {
  std::set<ValidatorId> out;
  for (ValidatorId v : a)
    if (!b.count(v)) out.insert(v);
  return out;
}

std::set<ValidatorId> set_union(const std::set<ValidatorId>& a, const std::set<ValidatorId>& b) {
  std::set<ValidatorId> out = a;
  out.insert(b.begin(), b.end());
  return out;
}

}  // namespace

MembershipRecord::MembershipRecord(const Trace& trace) : h_(trace.H), a_(trace.A) {}

MembershipRecord::MembershipRecord(std::vector<std::vector<ValidatorId>> h,
                                   std::vector<std::vector<ValidatorId>> a)
    : h_(std::move(h)), a_(std::move(a)) {}

std::set<ValidatorId> MembershipRecord::H_at(Round r) const {
  if (r < 0 || h_.empty()) return {};
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(r), h_.size() - 1);
  return to_set(h_[i]);
}

std::set<ValidatorId> MembershipRecord::A_at(Round r) const {
  if (a_.empty()) return {};
  if (r < 0) return to_set(a_.front());
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(r), a_.size() - 1);
  return to_set(a_[i]);
}

std::set<ValidatorId> MembershipRecord::H_range(Round from, Round to) const {
  std::set<ValidatorId> out;
  for (Round r = std::max<Round>(from, 0); r <= to && r < static_cast<Round>(h_.size()); ++r)
    for (ValidatorId v : h_[static_cast<std::size_t>(r)]) out.insert(v);
  return out;
}

std::set<ValidatorId> MembershipRecord::A_inf() const {
  return a_.empty() ? std::set<ValidatorId>{} : to_set(a_.back());
}

bool eval_constraint_1(const MembershipRecord& rec, const RoundClock& clock, Slot t,
                       std::int64_t eta) {
  auto h_t = rec.H_at(clock.vote_round(t));
  auto a_next = rec.A_at(clock.vote_round(t + 1));
  auto lhs = set_minus(h_t, a_next);
  auto stale = set_minus(rec.H_range(clock.vote_round(t - eta + 1), clock.vote_round(t - 1)), h_t);
  return lhs.size() > set_union(a_next, stale).size();
}

bool eval_constraint_2(const MembershipRecord& rec, const RoundClock& clock, Slot t_a,
                       std::int64_t pi, std::int64_t eta) {
  auto h_ta = rec.H_at(clock.vote_round(t_a));
  for (Slot tp = t_a + 1; tp <= t_a + pi + 2; ++tp) {
    auto a_tp = rec.A_at(clock.vote_round(tp));
    auto lhs = set_minus(h_ta, a_tp);
    auto stale =
        set_minus(rec.H_range(clock.vote_round(tp - eta), clock.vote_round(tp - 1)), h_ta);
    if (lhs.size() <= set_union(a_tp, stale).size()) return false;
  }
  return true;
}

bool eval_constraint_3(const MembershipRecord& rec, const RoundClock& clock, Slot t_a,
                       std::int64_t delta) {
  auto survivors = set_minus(rec.H_at(clock.vote_round(t_a)), rec.A_at(clock.vote_round(t_a + 1)));
  auto later = rec.H_at(clock.vote_round(t_a) + delta);
  return std::includes(later.begin(), later.end(), survivors.begin(), survivors.end());
}

bool eval_constraint_4(const MembershipRecord& rec, const RoundClock& clock, Slot t_a,
                       std::int64_t pi, std::uint32_t n, std::uint32_t num, std::uint32_t den) {
  auto woken =
      set_minus(rec.H_range(clock.vote_round(t_a + 1), clock.vote_round(t_a + pi + 1)),
                rec.H_at(clock.vote_round(t_a)));
  auto lhs = set_union(woken, rec.A_inf());
  return lhs.size() * den < static_cast<std::uint64_t>(n) * num;
}

bool eval_constraint_5(const MembershipRecord& rec, const RoundClock& clock, Slot t,
                       std::int64_t eta) {
  auto h_t = rec.H_at(clock.vote_round(t));
  auto a_next = rec.A_at(clock.vote_round(t + 1));
  auto stale = set_minus(rec.H_range(clock.vote_round(t - eta + 1), clock.vote_round(t - 1)), h_t);
  return h_t.size() > set_union(a_next, stale).size();
}

bool is_eta_compliant(const MembershipRecord& rec, const SimConfig& cfg) {
  RoundClock clock{cfg.delta};
  const std::int64_t eta = cfg.eta();
  Slot from = clock.slot(cfg.gst_round);
  Slot last = cfg.num_slots - 2;  // voting(t+1) must lie inside the record
  for (Slot t = from; t <= last; ++t) {
    bool ok = variant_is_tob(cfg.variant) ? eval_constraint_1(rec, clock, t, eta)
                                          : eval_constraint_5(rec, clock, t, eta);
    if (!ok) return false;
  }
  if (cfg.pi > 0 && cfg.t_a) {
    if (!eval_constraint_2(rec, clock, *cfg.t_a, cfg.pi, eta)) return false;
    if (!eval_constraint_3(rec, clock, *cfg.t_a, cfg.delta)) return false;
    if (!eval_constraint_4(rec, clock, *cfg.t_a, cfg.pi, cfg.n, cfg.c4_num, cfg.c4_den))
      return false;
  }
  return true;
}

bool is_eta_compliant(const Trace& trace, const SimConfig& cfg) {
  return is_eta_compliant(MembershipRecord(trace), cfg);
}

MembershipRecord derive_membership(const SimConfig& cfg) {
  const Round total = cfg.rounds_total();
  std::vector<std::vector<ValidatorId>> h(static_cast<std::size_t>(total));
  std::vector<std::vector<ValidatorId>> a(static_cast<std::size_t>(total));

  auto awake = [&cfg](ValidatorId v, Round r) {
    if (r >= cfg.gat_round) return true;
    auto it = cfg.sleep.find(v);
    if (it == cfg.sleep.end()) return true;
    for (const SleepInterval& s : it->second)
      if (r >= s.from && r < s.to) return false;
    return true;
  };

  for (ValidatorId v = 0; v < cfg.n; ++v) {
    Round corrupt_at = total;
    if (auto it = cfg.corruptions.find(v); it != cfg.corruptions.end()) corrupt_at = it->second;

    bool was_awake = awake(v, 0);
    bool active = was_awake;
    Round activation = 0;
    bool joining = false;
    for (Round r = 0; r < total; ++r) {
      if (r >= corrupt_at) {
        a[static_cast<std::size_t>(r)].push_back(v);
        continue;
      }
      bool now = awake(v, r);
      if (now && !was_awake && r > 0) {
        joining = true;
        active = false;
        activation = activation_for_wake(r, cfg.delta);
      } else if (!now) {
        joining = false;
        active = false;
      }
      if (joining && now && r >= activation) {
        joining = false;
        active = true;
      }
      if (now && active) h[static_cast<std::size_t>(r)].push_back(v);
      was_awake = now;
    }
  }
  return MembershipRecord(std::move(h), std::move(a));
}

FuzzSchedule generate_compliant_sleep(const SimConfig& base, std::uint64_t seed,
                                      std::uint32_t max_tries) {
  const Round total = base.rounds_total();

  // Rounds during which a validator must stay awake so that every slot it
  // proposes in actually gets an active, honest proposal.
  auto protected_zone = [&](ValidatorId v, Round from, Round to) {
    for (Slot t = 0; t < base.num_slots; ++t) {
      if (elect_proposer(base.seed, t, base.n) != v) continue;
      Round z0 = std::max<Round>(0, 4 * base.delta * (t - 2));
      Round z1 = 4 * base.delta * (t + 1);
      if (from < z1 && to > z0) return true;
    }
    return false;
  };

  std::uint32_t n_honest = 0;
  for (ValidatorId v = 0; v < base.n; ++v)
    if (!base.corruptions.count(v)) ++n_honest;
  std::uint32_t f = base.n - n_honest;
  std::uint32_t cap = n_honest > f + 1 ? n_honest - f - 1 : 0;

  FuzzSchedule out;
  for (std::uint32_t attempt = 0; attempt < max_tries; ++attempt) {
    Rng rng(hash_combine(seed, attempt));
    std::map<ValidatorId, std::vector<SleepInterval>> sleep;
    std::vector<std::uint32_t> asleep_count(static_cast<std::size_t>(total), 0);

    for (ValidatorId v = 0; v < base.n; ++v) {
      if (base.corruptions.count(v)) continue;
      std::uint64_t naps = rng.next_below(3);  // 0..2 naps per validator
      for (std::uint64_t k = 0; k < naps; ++k) {
        Slot start = static_cast<Slot>(1 + rng.next_below(
                         static_cast<std::uint64_t>(std::max<Slot>(1, base.num_slots - 3))));
        Slot len = static_cast<Slot>(1 + rng.next_below(3));
        Round from = 4 * base.delta * start;
        Round to = std::min<Round>(total, 4 * base.delta * (start + len));
        if (base.gat_round < to) to = std::min<Round>(to, std::max<Round>(from, base.gat_round));
        if (to <= from) continue;
        if (protected_zone(v, from, to)) continue;
        bool over_cap = false;
        for (Round r = from; r < to && !over_cap; ++r)
          if (asleep_count[static_cast<std::size_t>(r)] + 1 > cap) over_cap = true;
        if (over_cap) continue;
        for (Round r = from; r < to; ++r) ++asleep_count[static_cast<std::size_t>(r)];
        sleep[v].push_back(SleepInterval{from, to});
      }
    }
    for (auto& [v, intervals] : sleep) std::sort(intervals.begin(), intervals.end());

    SimConfig probe = base;
    probe.sleep = sleep;
    if (is_eta_compliant(derive_membership(probe), probe)) {
      out.sleep = std::move(sleep);
      out.compliant = true;
      return out;
    }
    out.sleep = std::move(sleep);
  }
  out.compliant = false;
  return out;
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<ValidatorId>> default_groups(const SimConfig& cfg) {
  if (!cfg.adversary_groups.empty()) return cfg.adversary_groups;
  std::vector<ValidatorId> honest;
  for (ValidatorId v = 0; v < cfg.n; ++v)
    if (!cfg.corruptions.count(v)) honest.push_back(v);
  std::vector<std::vector<ValidatorId>> groups(2);
  for (std::size_t i = 0; i < honest.size(); ++i) groups[i % 2 ? 1 : 0].push_back(honest[i]);
  std::sort(groups[0].begin(), groups[0].end());
  std::sort(groups[1].begin(), groups[1].end());
  return groups;
}

int group_of(const std::vector<std::vector<ValidatorId>>& groups, ValidatorId v) {
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (std::find(groups[g].begin(), groups[g].end(), v) != groups[g].end())
      return static_cast<int>(g);
  return -1;
}

class PassiveStrategy final : public Strategy {};

class MaxDelayStrategy final : public Strategy {
 public:
  Round delivery_round(const Message&, ValidatorId, Round, ValidatorId, Round, Round hi,
                       Rng&) override {
    return hi;
  }
};

class PartitionStrategy : public Strategy {
 public:
  explicit PartitionStrategy(const SimConfig& cfg)
      : gst_(cfg.gst_round), groups_(default_groups(cfg)) {}

  Round delivery_round(const Message&, ValidatorId from, Round send_round, ValidatorId to,
                       Round lo, Round hi, Rng&) override {
    if (send_round >= gst_) return lo;
    int gf = group_of(groups_, from);
    int gt = group_of(groups_, to);
    if (gf >= 0 && gf == gt) return lo;
    return hi;
  }

 protected:
  Round gst_;
  std::vector<std::vector<ValidatorId>> groups_;
};

// Picks this round's honest vote with the smallest sender among `among`
// (or among everyone when `among` is null).
std::optional<VoteMsg> smallest_honest_vote(const std::vector<SendRec>& sends,
                                            const std::vector<ValidatorId>* among) {
  std::optional<VoteMsg> best;
  for (const SendRec& s : sends) {
    if (!s.honest_at_send) continue;
    const auto* v = std::get_if<VoteMsg>(&s.msg);
    if (!v) continue;
    if (among && std::find(among->begin(), among->end(), v->sender) == among->end()) continue;
    if (!best || v->sender < best->sender) best = *v;
  }
  return best;
}

// Corrupted validators cast two votes per slot for different chains; the
// expiry-equivocation filter must end up discarding them everywhere.
class EquivocatorStrategy : public Strategy {
 public:
  void on_round_end(Simulation& sim) override {
    const SimConfig& cfg = sim.config();
    RoundClock clock{cfg.delta};
    Round r = sim.round();
    Slot t = clock.slot(r);
    if (r != clock.vote_round(t)) return;
    auto sends = sim.sends_this_round();
    std::optional<VoteMsg> base = smallest_honest_vote(sends, nullptr);
    if (!base) return;
    const BlockTree& blocks = sim.global_blocks();
    if (base->chain.tip == blocks.genesis().tip) return;

    std::map<ValidatorId, Round> everyone;
    for (ValidatorId v = 0; v < cfg.n; ++v) everyone[v] = r + 1;

    for (ValidatorId b : sim.corrupted()) {
      VoteMsg va = *base;
      va.sender = b;
      if (va.ffg) va.ffg->sender = b;
      VoteMsg vb = va;
      BlockId parent = blocks.block(base->chain.tip).parent;
      vb.chain = ChainRef{parent};
      vb.tip = blocks.block(parent);
      if (vb.ffg) vb.ffg->target = Checkpoint{vb.chain, t, blocks.block(parent).slot};
      sim.fabricate(Message{va}, everyone);
      sim.fabricate(Message{vb}, everyone);
    }
  }
};

class EquivocatorMaxDelayStrategy final : public EquivocatorStrategy {
 public:
  Round delivery_round(const Message&, ValidatorId, Round, ValidatorId, Round, Round hi,
                       Rng&) override {
    return hi;
  }
};

// Corrupted validators vote toward a stale checkpoint and the votes surface
// only at the legal delivery bound.
class FfgWithholderStrategy final : public Strategy {
 public:
  void on_round_end(Simulation& sim) override {
    const SimConfig& cfg = sim.config();
    if (!variant_is_3sf(cfg.variant)) return;
    RoundClock clock{cfg.delta};
    Round r = sim.round();
    Slot t = clock.slot(r);
    if (r != clock.vote_round(t)) return;

    std::map<ValidatorId, Round> late;
    for (ValidatorId v = 0; v < cfg.n; ++v) late[v] = r + 4 * cfg.delta;  // clamped to the bound

    Checkpoint gen = genesis_checkpoint();
    for (ValidatorId b : sim.corrupted()) {
      VoteMsg v;
      v.chain = gen.chain;
      v.tip = make_genesis();
      v.slot = t;
      v.sender = b;
      v.ffg = FfgVote{gen, Checkpoint{gen.chain, t, kGenesisSlot}, b};
      sim.fabricate(Message{v}, late);
    }
  }
};

// Pre-GST partition with mirror double-voting: every corrupted validator
// echoes, inside each partition side, the vote of that side's first honest
// sender, which double-signs the checkpoint slot across sides.
class PartitionDoubleVoteStrategy final : public PartitionStrategy {
 public:
  explicit PartitionDoubleVoteStrategy(const SimConfig& cfg) : PartitionStrategy(cfg) {}

  void on_round_end(Simulation& sim) override {
    const SimConfig& cfg = sim.config();
    RoundClock clock{cfg.delta};
    Round r = sim.round();
    Slot t = clock.slot(r);
    if (r != clock.vote_round(t) || r >= gst_) return;
    auto sends = sim.sends_this_round();
    for (const auto& group : groups_) {
      std::optional<VoteMsg> base = smallest_honest_vote(sends, &group);
      if (!base) continue;
      std::map<ValidatorId, Round> within;
      for (ValidatorId v : group) within[v] = r + 1;
      for (ValidatorId b : sim.corrupted()) {
        VoteMsg mv = *base;
        mv.sender = b;
        if (mv.ffg) mv.ffg->sender = b;
        sim.fabricate(Message{mv}, within);
      }
    }
  }
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(const SimConfig& cfg) {
  if (cfg.adversary == "passive") return std::make_unique<PassiveStrategy>();
  if (cfg.adversary == "max_delay") return std::make_unique<MaxDelayStrategy>();
  if (cfg.adversary == "partitioner") return std::make_unique<PartitionStrategy>(cfg);
  if (cfg.adversary == "equivocator") return std::make_unique<EquivocatorStrategy>();
  if (cfg.adversary == "equivocator_max_delay")
    return std::make_unique<EquivocatorMaxDelayStrategy>();
  if (cfg.adversary == "ffg_withholder") return std::make_unique<FfgWithholderStrategy>();
  if (cfg.adversary == "partition_double_vote")
    return std::make_unique<PartitionDoubleVoteStrategy>(cfg);
  raise(Errc::constraint_error, "unknown adversary strategy: " + cfg.adversary);
}

}  // namespace fflab
