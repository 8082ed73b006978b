#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fflab/validator.hpp"

namespace fflab {

struct SleepInterval {
  Round from = 0;
  Round to = 0;  // asleep in [from, to)

  auto operator<=>(const SleepInterval&) const = default;
};

struct SimConfig {
  std::uint32_t n = 4;
  Variant variant = Variant::tob_3sf;
  bool acks_enabled = false;
  std::int64_t delta = 1;
  std::int64_t kappa = 2;
  std::int64_t pi = 0;
  std::optional<Slot> t_a;  // start of the single short asynchronous period
  Round gst_round = 0;
  Round gat_round = 0;
  Slot num_slots = 10;
  std::uint64_t seed = 1;
  std::map<ValidatorId, Round> corruptions;                    // id -> corruption round
  std::map<ValidatorId, std::vector<SleepInterval>> sleep;     // honest sleep schedule
  std::vector<std::pair<Round, TxId>> tx_schedule;             // sorted by round
  std::string adversary = "passive";
  std::vector<std::vector<ValidatorId>> adversary_groups;      // partition strategies
  bool uniform_chainfin = false;
  bool sender_level_intersection = false;
  std::uint32_t c4_num = 2;  // constraint-4 threshold, as a fraction of n
  std::uint32_t c4_den = 3;

  bool operator==(const SimConfig&) const = default;

  std::int64_t eta() const { return eta_for_pi(pi); }
  Round rounds_total() const { return 4 * delta * num_slots; }
  Round async_window_begin() const { return t_a ? 4 * delta * (*t_a + 1) : 0; }
  Round async_window_end() const { return t_a ? 4 * delta * (*t_a + pi + 1) : 0; }
  bool in_async_window(Round r) const {
    return t_a && pi > 0 && r >= async_window_begin() && r < async_window_end();
  }

  ProtocolParams protocol_params() const {
    ProtocolParams p;
    p.variant = variant;
    p.acks_enabled = acks_enabled;
    p.n = n;
    p.delta = delta;
    p.kappa = kappa;
    p.eta = eta();
    p.uniform_chainfin = uniform_chainfin;
    p.fc.sender_level_intersection = sender_level_intersection;
    return p;
  }
};

// Deterministic function of (seed, slot), uniform over validators.
ValidatorId elect_proposer(std::uint64_t seed, Slot slot, std::uint32_t n);

struct SendRec {
  Round round = 0;
  ValidatorId sender = 0;
  bool honest_at_send = true;
  Hash64 hash = 0;
  Message msg;
};

struct RecvRec {
  Round round = 0;
  ValidatorId to = 0;
  Hash64 hash = 0;
};

struct OutputsRow {
  BlockId available = 0;
  BlockId finalized = 0;

  auto operator<=>(const OutputsRow&) const = default;
};

// Append-only record of one run: the substrate of every property check.
// Checkers are black-box over this data; they never look inside validators.
struct Trace {
  SimConfig config;
  std::vector<std::vector<ValidatorId>> H;  // active honest per round
  std::vector<std::vector<ValidatorId>> A;  // adversarial per round
  std::vector<std::vector<ValidatorId>> W;  // aware per round
  std::vector<std::vector<OutputsRow>> outputs;  // [round][validator]
  std::vector<SendRec> sends;
  std::vector<RecvRec> recvs;
  std::map<Slot, ValidatorId> proposers;
  std::vector<std::pair<Round, TxId>> txs;
  BlockTree blocks;  // every block carried by any sent message

  bool honest_at(ValidatorId v, Round r) const;
  bool active_at(ValidatorId v, Round r) const;
  bool aware_at(ValidatorId v, Round r) const;
  std::set<ValidatorId> adversarial_ever() const;

  // View of everything delivered to at least one honest validator by `r`
  // (the observer's view), or of one validator's deliveries.
  View global_view(Round r) const;
  View validator_view(ValidatorId v, Round r) const;
};

// Legal delivery window and adversary hooks. The simulator clamps every
// choice into [lo, hi]; fabricated senders must already be corrupted.
class Simulation;

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual void on_round_begin(Simulation&) {}
  // Pick a delivery round in [lo, hi]; `from` is the sending or relaying
  // validator.
  virtual Round delivery_round(const Message&, ValidatorId from, Round send_round,
                               ValidatorId to, Round lo, Round hi, Rng&) {
    (void)from;
    (void)send_round;
    (void)to;
    (void)hi;
    return lo;
  }
  // Runs after honest validators stepped; may inject messages from corrupted
  // senders via Simulation::fabricate.
  virtual void on_round_end(Simulation&) {}
};

std::unique_ptr<Strategy> make_strategy(const SimConfig& cfg);

class Simulation {
 public:
  Simulation(SimConfig cfg, std::unique_ptr<Strategy> strategy = nullptr);

  Trace run();

  // --- adversary-facing surface ---
  Round round() const { return round_; }
  const SimConfig& config() const { return cfg_; }
  const std::set<ValidatorId>& corrupted() const { return corrupted_; }
  // Proposer identity, revealed only from the slot's propose round onwards.
  std::optional<ValidatorId> proposer_revealed(Slot t) const;
  // Every block carried by any message sent so far.
  const BlockTree& global_blocks() const { return global_view_.tree(); }
  // Copies of the sends recorded during the current round (fabricate may
  // grow the underlying log, so no references are handed out).
  std::vector<SendRec> sends_this_round() const;
  // Injects a message from a corrupted sender; deliveries outside the legal
  // window are clamped, recipients not listed get no direct delivery.
  void fabricate(const Message& m, const std::map<ValidatorId, Round>& deliveries);

 private:
  struct MsgState {
    Message msg;
    std::set<ValidatorId> delivered;
    std::map<ValidatorId, Round> best_pending;
  };

  void apply_schedules();
  void deliver_due();
  void step_validators();
  void record_round();
  void finalize_aware_sets();
  void schedule(std::size_t idx, ValidatorId from, Round send_round, ValidatorId to);
  void schedule_at(std::size_t idx, ValidatorId to, Round when);
  std::size_t intern(const Message& m);
  Round legal_hi(Round send_round) const;
  bool awake_per_schedule(ValidatorId v, Round r) const;
  bool relayable(const Message& m) const;
  void record_send(ValidatorId sender, const Message& m);

  SimConfig cfg_;
  std::unique_ptr<Strategy> strategy_;
  Rng rng_;
  FfgCache cache_;
  RoundClock clock_;

  Round round_ = 0;
  std::vector<Validator> validators_;
  std::set<ValidatorId> corrupted_;
  std::vector<bool> awake_;
  std::vector<std::vector<Message>> inbox_;
  std::vector<std::vector<std::size_t>> sleep_queue_;  // message pool indices
  std::vector<TxId> txpool_;
  std::set<TxId> txpool_ids_;

  std::vector<MsgState> msgs_;
  std::map<Hash64, std::size_t> msg_index_;
  std::map<Round, std::vector<std::pair<std::size_t, ValidatorId>>> due_;
  View global_view_;

  Trace trace_;
  std::size_t sends_round_begin_ = 0;  // first send index of the current round
};

// Convenience: build the strategy from the config and run.
Trace run_simulation(const SimConfig& cfg);

}  // namespace fflab
