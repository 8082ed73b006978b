#pragma once

#include "fflab/simnet.hpp"

namespace fflab {

// Membership sets extracted from a trace, with the range unions the
// participation constraints quantify over. H_at(r) is empty for r < 0 and
// frozen at the last recorded round beyond the end.
class MembershipRecord {
 public:
  explicit MembershipRecord(const Trace& trace);

  // Direct construction for oracle tests.
  MembershipRecord(std::vector<std::vector<ValidatorId>> h, std::vector<std::vector<ValidatorId>> a);

  std::set<ValidatorId> H_at(Round r) const;
  std::set<ValidatorId> A_at(Round r) const;
  std::set<ValidatorId> H_range(Round from, Round to) const;  // union over [from, to]
  std::set<ValidatorId> A_inf() const;
  Round last_round() const { return static_cast<Round>(h_.size()) - 1; }

 private:
  std::vector<std::vector<ValidatorId>> h_;
  std::vector<std::vector<ValidatorId>> a_;
};

// The participation constraints: inputs are voting rounds derived from slots
// via the clock. All evaluate over a finite record; set terms beyond the
// recorded horizon are treated as at the horizon.
bool eval_constraint_1(const MembershipRecord& rec, const RoundClock& clock, Slot t,
                       std::int64_t eta);
bool eval_constraint_2(const MembershipRecord& rec, const RoundClock& clock, Slot t_a,
                       std::int64_t pi, std::int64_t eta);
bool eval_constraint_3(const MembershipRecord& rec, const RoundClock& clock, Slot t_a,
                       std::int64_t delta);
bool eval_constraint_4(const MembershipRecord& rec, const RoundClock& clock, Slot t_a,
                       std::int64_t pi, std::uint32_t n, std::uint32_t num, std::uint32_t den);
bool eval_constraint_5(const MembershipRecord& rec, const RoundClock& clock, Slot t,
                       std::int64_t eta);

// TOB variants need constraint 1 for every slot from slot(GST); RLMD variants
// need constraint 5 instead; both need constraints 2-4 when pi > 0.
bool is_eta_compliant(const Trace& trace, const SimConfig& cfg);
bool is_eta_compliant(const MembershipRecord& rec, const SimConfig& cfg);

// Schedule generation for fuzzing: seeded random sleep intervals that keep
// every slot's proposer active around its slot, rejection-sampled until the
// analytically derived membership record is compliant.
struct FuzzSchedule {
  std::map<ValidatorId, std::vector<SleepInterval>> sleep;
  bool compliant = false;
};
FuzzSchedule generate_compliant_sleep(const SimConfig& base, std::uint64_t seed,
                                      std::uint32_t max_tries = 64);

// Membership record a schedule would realize (without running the network):
// active = awake per schedule, joined per the joining-window rule, not
// corrupted.
MembershipRecord derive_membership(const SimConfig& cfg);

}  // namespace fflab
