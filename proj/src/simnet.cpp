#include "fflab/simnet.hpp"

#include <algorithm>
#include <cassert>

namespace fflab {

ValidatorId elect_proposer(std::uint64_t seed, Slot slot, std::uint32_t n) {
  return static_cast<ValidatorId>(mix64(mix64(seed) ^ static_cast<std::uint64_t>(slot)) % n);
}

bool Trace::honest_at(ValidatorId v, Round r) const {
  if (r < 0 || r >= static_cast<Round>(A.size())) return false;
  const auto& a = A[static_cast<std::size_t>(r)];
  return !std::binary_search(a.begin(), a.end(), v);
}

bool Trace::active_at(ValidatorId v, Round r) const {
  if (r < 0 || r >= static_cast<Round>(H.size())) return false;
  const auto& h = H[static_cast<std::size_t>(r)];
  return std::binary_search(h.begin(), h.end(), v);
}

bool Trace::aware_at(ValidatorId v, Round r) const {
  if (r < 0 || r >= static_cast<Round>(W.size())) return false;
  const auto& w = W[static_cast<std::size_t>(r)];
  return std::binary_search(w.begin(), w.end(), v);
}

std::set<ValidatorId> Trace::adversarial_ever() const {
  std::set<ValidatorId> out;
  if (!A.empty())
    for (ValidatorId v : A.back()) out.insert(v);
  return out;
}

View Trace::global_view(Round r) const {
  std::map<Hash64, const Message*> by_hash;
  for (const SendRec& s : sends) by_hash.emplace(s.hash, &s.msg);
  View v;
  std::set<Hash64> seen;
  for (const RecvRec& rec : recvs) {
    if (rec.round > r) continue;
    if (!seen.insert(rec.hash).second) continue;
    auto it = by_hash.find(rec.hash);
    if (it != by_hash.end()) v.insert(*it->second);
  }
  return v;
}

View Trace::validator_view(ValidatorId who, Round r) const {
  std::map<Hash64, const Message*> by_hash;
  for (const SendRec& s : sends) by_hash.emplace(s.hash, &s.msg);
  View v;
  for (const RecvRec& rec : recvs) {
    if (rec.to != who || rec.round > r) continue;
    auto it = by_hash.find(rec.hash);
    if (it != by_hash.end()) v.insert(*it->second);
  }
  // Own messages are part of the own view.
  for (const SendRec& s : sends)
    if (s.sender == who && s.honest_at_send && s.round <= r) v.insert(s.msg);
  return v;
}

Simulation::Simulation(SimConfig cfg, std::unique_ptr<Strategy> strategy)
    : cfg_(std::move(cfg)),
      strategy_(strategy ? std::move(strategy) : make_strategy(cfg_)),
      rng_(hash_combine(cfg_.seed, 0x73696dull)),
      clock_{cfg_.delta} {
  ProtocolParams pp = cfg_.protocol_params();
  validators_.reserve(cfg_.n);
  for (ValidatorId v = 0; v < cfg_.n; ++v) validators_.emplace_back(v, pp, &cache_);
  awake_.assign(cfg_.n, false);
  inbox_.resize(cfg_.n);
  sleep_queue_.resize(cfg_.n);
  trace_.config = cfg_;
}

bool Simulation::awake_per_schedule(ValidatorId v, Round r) const {
  if (r >= cfg_.gat_round) return true;  // after GAT everyone is awake
  auto it = cfg_.sleep.find(v);
  if (it == cfg_.sleep.end()) return true;
  for (const SleepInterval& s : it->second)
    if (r >= s.from && r < s.to) return false;
  return true;
}

Round Simulation::legal_hi(Round send_round) const {
  if (send_round >= cfg_.gst_round && !cfg_.in_async_window(send_round))
    return send_round + cfg_.delta;
  Round bound = cfg_.gst_round;
  if (cfg_.in_async_window(send_round)) bound = std::max(bound, cfg_.async_window_end());
  return std::max(bound + cfg_.delta, send_round + 1);
}

std::size_t Simulation::intern(const Message& m) {
  Hash64 h = message_hash(m);
  auto it = msg_index_.find(h);
  if (it != msg_index_.end()) return it->second;
  msgs_.push_back(MsgState{m, {}, {}});
  msg_index_.emplace(h, msgs_.size() - 1);
  return msgs_.size() - 1;
}

void Simulation::schedule_at(std::size_t idx, ValidatorId to, Round when) {
  MsgState& st = msgs_[idx];
  if (st.delivered.count(to)) return;
  auto [it, fresh] = st.best_pending.emplace(to, when);
  if (!fresh) {
    if (it->second <= when) return;
    it->second = when;
  }
  due_[when].push_back({idx, to});
}

void Simulation::schedule(std::size_t idx, ValidatorId from, Round send_round, ValidatorId to) {
  Round lo = send_round + 1;
  Round hi = legal_hi(send_round);
  Round when = strategy_->delivery_round(msgs_[idx].msg, from, send_round, to, lo, hi, rng_);
  when = std::clamp(when, lo, hi);
  schedule_at(idx, to, when);
}

void Simulation::record_send(ValidatorId sender, const Message& m) {
  SendRec rec;
  rec.round = round_;
  rec.sender = sender;
  rec.honest_at_send = !corrupted_.count(sender);
  rec.hash = message_hash(m);
  rec.msg = m;
  trace_.sends.push_back(std::move(rec));

  // The global registry accumulates across the run so ancestors sent in
  // earlier messages resolve the blocks carried now.
  global_view_.insert(m);
}

void Simulation::fabricate(const Message& m, const std::map<ValidatorId, Round>& deliveries) {
  ValidatorId sender = message_sender(m);
  if (!corrupted_.count(sender))
    raise(Errc::constraint_error, "fabricate: sender is not corrupted");
  record_send(sender, m);
  std::size_t idx = intern(m);
  Round lo = round_ + 1;
  Round hi = legal_hi(round_);
  for (const auto& [to, when] : deliveries) {
    if (to >= cfg_.n) continue;
    schedule_at(idx, to, std::clamp(when, lo, hi));
  }
}

std::optional<ValidatorId> Simulation::proposer_revealed(Slot t) const {
  if (round_ < clock_.propose_round(t)) return std::nullopt;
  return elect_proposer(cfg_.seed, t, cfg_.n);
}

std::vector<SendRec> Simulation::sends_this_round() const {
  return std::vector<SendRec>(trace_.sends.begin() + static_cast<std::ptrdiff_t>(sends_round_begin_),
                              trace_.sends.end());
}

void Simulation::apply_schedules() {
  for (const auto& [id, when] : cfg_.corruptions)
    if (when == round_ && id < cfg_.n) corrupted_.insert(id);

  for (ValidatorId v = 0; v < cfg_.n; ++v) {
    if (corrupted_.count(v)) continue;
    bool now = awake_per_schedule(v, round_);
    if (now && !awake_[v]) {
      awake_[v] = true;
      if (round_ == 0) {
        validators_[v].start_active();
      } else {
        validators_[v].wake(round_);
        // Messages queued while asleep are delivered at the wake round.
        for (std::size_t idx : sleep_queue_[v]) {
          if (msgs_[idx].delivered.insert(v).second) {
            inbox_[v].push_back(msgs_[idx].msg);
            trace_.recvs.push_back(RecvRec{round_, v, message_hash(msgs_[idx].msg)});
            if (relayable(msgs_[idx].msg))
              for (ValidatorId w = 0; w < cfg_.n; ++w)
                if (w != v) schedule(idx, v, round_, w);
          }
        }
        sleep_queue_[v].clear();
      }
    } else if (!now && awake_[v]) {
      awake_[v] = false;
      validators_[v].go_to_sleep();
    }
  }

  for (const auto& [when, tx] : cfg_.tx_schedule) {
    if (when != round_) continue;
    if (txpool_ids_.insert(tx).second) {
      txpool_.push_back(tx);
      trace_.txs.push_back({round_, tx});
    }
  }
}

void Simulation::deliver_due() {
  auto it = due_.find(round_);
  if (it == due_.end()) return;
  auto entries = std::move(it->second);
  due_.erase(it);
  for (auto [idx, to] : entries) {
    MsgState& st = msgs_[idx];
    auto best = st.best_pending.find(to);
    if (best == st.best_pending.end() || best->second != round_) continue;  // superseded
    st.best_pending.erase(best);
    if (st.delivered.count(to)) continue;
    if (corrupted_.count(to)) {
      st.delivered.insert(to);  // the adversary reads everything anyway
      continue;
    }
    if (!awake_[to]) {
      sleep_queue_[to].push_back(idx);
      continue;
    }
    st.delivered.insert(to);
    inbox_[to].push_back(st.msg);
    trace_.recvs.push_back(RecvRec{round_, to, message_hash(st.msg)});
    // Gossip: honest recipients re-broadcast on first receipt.
    if (relayable(st.msg))
      for (ValidatorId w = 0; w < cfg_.n; ++w)
        if (w != to) schedule(idx, to, round_, w);
  }
}

bool Simulation::relayable(const Message& m) const {
  // A proposal from slot t is gossiped only during the first delta rounds of
  // its slot; everything else travels at any time.
  if (std::holds_alternative<ProposeTob>(m) || std::holds_alternative<ProposeRlmd>(m))
    return round_ < clock_.vote_round(message_slot(m));
  return true;
}

void Simulation::step_validators() {
  Slot t = clock_.slot(round_);
  ValidatorId proposer = elect_proposer(cfg_.seed, t, cfg_.n);
  if (round_ == clock_.propose_round(t)) trace_.proposers.emplace(t, proposer);

  for (ValidatorId v = 0; v < cfg_.n; ++v) {
    if (corrupted_.count(v) || !awake_[v]) {
      inbox_[v].clear();
      continue;
    }
    auto outbox = validators_[v].step(round_, inbox_[v], proposer, txpool_);
    inbox_[v].clear();
    for (const Message& m : outbox) {
      record_send(v, m);
      std::size_t idx = intern(m);
      msgs_[idx].delivered.insert(v);  // own message, already in the own view
      for (ValidatorId w = 0; w < cfg_.n; ++w)
        if (w != v) schedule(idx, v, round_, w);
    }
  }
}

void Simulation::record_round() {
  std::vector<ValidatorId> h, a;
  for (ValidatorId v = 0; v < cfg_.n; ++v) {
    if (corrupted_.count(v)) {
      a.push_back(v);
      continue;
    }
    if (awake_[v] && validators_[v].status() == Status::active) h.push_back(v);
  }
  trace_.H.push_back(std::move(h));
  trace_.A.push_back(std::move(a));

  std::vector<OutputsRow> rows;
  rows.reserve(cfg_.n);
  for (ValidatorId v = 0; v < cfg_.n; ++v) {
    OutputsRow row;
    row.available = validators_[v].available_chain().tip;
    row.finalized = validators_[v].finalized_chain().tip;
    rows.push_back(row);
  }
  trace_.outputs.push_back(std::move(rows));
}

void Simulation::finalize_aware_sets() {
  // W_r needs H at voting(t_a), which may lie after r inside slot t_a, so the
  // aware sets are derived once the whole H history exists.
  trace_.W.clear();
  trace_.W.reserve(trace_.H.size());
  for (Round r = 0; r < static_cast<Round>(trace_.H.size()); ++r) {
    Slot t = clock_.slot(r);
    bool restricted = cfg_.t_a && cfg_.pi > 0 && t >= *cfg_.t_a && t <= *cfg_.t_a + cfg_.pi + 1;
    const auto& h = trace_.H[static_cast<std::size_t>(r)];
    if (!restricted) {
      trace_.W.push_back(h);
      continue;
    }
    Round ref = clock_.vote_round(*cfg_.t_a);
    std::vector<ValidatorId> w;
    for (ValidatorId v : h)
      if (trace_.active_at(v, ref)) w.push_back(v);
    trace_.W.push_back(std::move(w));
  }
}

Trace Simulation::run() {
  const Round total = cfg_.rounds_total();
  for (round_ = 0; round_ < total; ++round_) {
    sends_round_begin_ = trace_.sends.size();
    apply_schedules();
    strategy_->on_round_begin(*this);
    deliver_due();
    step_validators();
    strategy_->on_round_end(*this);
    record_round();
  }
  finalize_aware_sets();
  trace_.blocks = global_view_.tree();
  return std::move(trace_);
}

Trace run_simulation(const SimConfig& cfg) { return Simulation(cfg).run(); }

}  // namespace fflab
