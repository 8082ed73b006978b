#include <algorithm>

#include "doctest.h"
#include "fflab/properties.hpp"
#include "fflab/trace_io.hpp"

using namespace fflab;

namespace {

SimConfig clean_config(Variant variant, std::uint32_t n = 4, Slot slots = 8) {
  SimConfig cfg;
  cfg.n = n;
  cfg.variant = variant;
  cfg.delta = 1;
  cfg.kappa = 2;
  cfg.num_slots = slots;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("clean synchronous runs pass every applicable check") {
  for (Variant variant :
       {Variant::tob_prob, Variant::tob_3sf, Variant::rlmd, Variant::rlmd_3sf}) {
    CAPTURE(static_cast<int>(variant));
    SimConfig cfg = clean_config(variant);
    cfg.tx_schedule = {{2, 700}};
    cfg.acks_enabled = variant_is_3sf(variant);
    Trace trace = run_simulation(cfg);
    for (const Verdict& v : run_all_checks(trace)) {
      CAPTURE(v.name);
      CAPTURE(v.detail);
      CHECK_FALSE(v.failed());
    }
  }
}

TEST_CASE("detector sanity: injected conflicting outputs fail available safety") {
  SimConfig cfg = clean_config(Variant::tob_3sf);
  Trace trace = run_simulation(cfg);
  CHECK(check_available_safety(trace, 0).status == Verdict::Status::pass);

  // Hand-inject a conflicting branch for one validator at one round.
  Block rogue = trace.blocks.extend(trace.blocks.genesis(), 1, std::vector<TxId>{999});
  trace.blocks.insert(rogue);
  trace.outputs[20][2].available = rogue.id;
  Verdict v = check_available_safety(trace, 0);
  CHECK(v.failed());
  CHECK(v.detail.find("conflicting") != std::string::npos);

  // The same injection before t_after is invisible.
  CHECK(check_available_safety(trace, 21).status == Verdict::Status::pass);
}

TEST_CASE("detector sanity: reorged proposal and broken prefix invariants") {
  SimConfig cfg = clean_config(Variant::tob_3sf);
  Trace trace = run_simulation(cfg);
  CHECK(check_reorg_resilience(trace, 0, 0).status == Verdict::Status::pass);
  CHECK(check_prefix_and_monotone(trace).status == Verdict::Status::pass);

  Block rogue = trace.blocks.extend(trace.blocks.genesis(), 2, std::vector<TxId>{998});
  trace.blocks.insert(rogue);
  trace.outputs[26][1].available = rogue.id;
  CHECK(check_reorg_resilience(trace, 0, 0).failed());

  // finalized must stay a prefix of available.
  SimConfig cfg2 = clean_config(Variant::rlmd_3sf);
  Trace t2 = run_simulation(cfg2);
  Block rogue2 = t2.blocks.extend(t2.blocks.genesis(), 3, std::vector<TxId>{997});
  t2.blocks.insert(rogue2);
  t2.outputs[30][0].finalized = rogue2.id;
  CHECK(check_prefix_and_monotone(t2).failed());

  // Regressing the finalized chain trips the monotonicity side.
  SimConfig cfg3 = clean_config(Variant::tob_3sf);
  Trace t3 = run_simulation(cfg3);
  BlockId late = t3.outputs[t3.outputs.size() - 1][0].finalized;
  REQUIRE(late != t3.blocks.genesis().tip);
  t3.outputs[t3.outputs.size() - 2][0].finalized = late;
  t3.outputs[t3.outputs.size() - 1][0].finalized = t3.blocks.genesis().tip;
  Verdict v3 = check_prefix_and_monotone(t3);
  CHECK(v3.failed());
  CHECK(v3.detail.find("regressed") != std::string::npos);
}

TEST_CASE("finality liveness holds at the exact deadline on clean runs") {
  for (Variant variant : {Variant::tob_3sf, Variant::rlmd_3sf}) {
    SimConfig cfg = clean_config(variant, 4, 8);
    cfg.tx_schedule = {{1, 321}};
    Trace trace = run_simulation(cfg);
    CHECK(check_finality_liveness(trace).status == Verdict::Status::pass);
    CHECK(check_fastconf_liveness(trace).status == Verdict::Status::pass);
  }
  // Probabilistic variants have no finalized output to check.
  SimConfig cfg = clean_config(Variant::rlmd);
  Trace trace = run_simulation(cfg);
  CHECK(check_finality_liveness(trace).status == Verdict::Status::skip);
}

TEST_CASE("two-slot liveness: skipped without acks, checked with them") {
  SimConfig cfg = clean_config(Variant::tob_3sf);
  Trace off = run_simulation(cfg);
  CHECK(check_two_slot_liveness(off).status == Verdict::Status::skip);

  cfg.acks_enabled = true;
  Trace on = run_simulation(cfg);
  CHECK(check_two_slot_liveness(on).status == Verdict::Status::pass);
}

TEST_CASE("kappa liveness sees every transaction within 8k+1 rounds") {
  SimConfig cfg = clean_config(Variant::tob_3sf, 4, 10);
  cfg.tx_schedule = {{0, 11}, {7, 12}, {17, 13}};
  Trace trace = run_simulation(cfg);
  CHECK(check_kappa_liveness(trace).status == Verdict::Status::pass);

  // Non-compliant schedules skip the check: empty the active set mid-run by
  // putting everyone to sleep for two slots.
  SimConfig napping = cfg;
  napping.gat_round = napping.rounds_total();
  for (ValidatorId v = 0; v < cfg.n; ++v) napping.sleep[v] = {SleepInterval{12, 20}};
  Trace napped = run_simulation(napping);
  CHECK_FALSE(is_eta_compliant(napped, napping));
  CHECK(check_kappa_liveness(napped).status == Verdict::Status::skip);
}

TEST_CASE("find_t_heal: slot 0 under GST = 0, the first full slot after GST otherwise") {
  SimConfig cfg = clean_config(Variant::tob_3sf);
  Trace trace = run_simulation(cfg);
  auto heal = find_t_heal(trace);
  REQUIRE(heal.has_value());
  CHECK(*heal == 0);

  SimConfig late = cfg;
  late.gst_round = 9;
  late.adversary = "max_delay";
  Trace t2 = run_simulation(late);
  auto heal2 = find_t_heal(t2);
  REQUIRE(heal2.has_value());
  // First slot with a propose round >= gst + delta.
  CHECK(*heal2 == 3);
}

TEST_CASE("latency metrics are deterministic and match deadline arithmetic") {
  SimConfig cfg = clean_config(Variant::tob_3sf, 4, 10);
  cfg.tx_schedule = {{0, 42}};
  Trace trace = run_simulation(cfg);
  LatencyReport rep = latency_metrics(trace);
  REQUIRE(rep.items.size() == 1);
  REQUIRE(rep.items[0].available_delay.has_value());
  // Injected at round 0, proposed in slot 0, fast-confirmed at round 2.
  CHECK(*rep.items[0].available_delay == 2);
  REQUIRE(rep.items[0].finalized_delay.has_value());
  // Finalized at the fast-confirm round of slot 2.
  CHECK(*rep.items[0].finalized_delay == 10);

  LatencyReport again = latency_metrics(trace);
  CHECK(serialize_metrics(rep) == serialize_metrics(again));

  SimConfig none = clean_config(Variant::tob_3sf);
  Trace empty_run = run_simulation(none);
  CHECK(latency_metrics(empty_run).items.empty());
}

TEST_CASE("honest-never-slashable holds on clean and equivocator runs") {
  SimConfig cfg = clean_config(Variant::tob_3sf, 5, 8);
  Trace trace = run_simulation(cfg);
  CHECK(check_honest_never_slashable(trace).status == Verdict::Status::pass);

  SimConfig adv = cfg;
  adv.corruptions[4] = 0;
  adv.adversary = "equivocator";
  Trace t2 = run_simulation(adv);
  CHECK(check_honest_never_slashable(t2).status == Verdict::Status::pass);
}

TEST_CASE("emitted ffg votes are valid links whose target prefixes the vote chain") {
  // From slot 1 onward every honest ffg vote is a valid link; the slot-0
  // link (genesis,0) -> (.,0) is degenerate by construction and inert. The
  // vote chain always extends the target chain.
  for (Variant variant : {Variant::tob_3sf, Variant::rlmd_3sf}) {
    SimConfig cfg = clean_config(variant, 5, 8);
    Trace trace = run_simulation(cfg);
    std::size_t checked = 0;
    for (const SendRec& s : trace.sends) {
      const auto* v = std::get_if<VoteMsg>(&s.msg);
      if (!v || !s.honest_at_send || !v->ffg) continue;
      CHECK(trace.blocks.is_prefix(v->ffg->target.chain, v->chain));
      if (v->slot >= 1) {
        ++checked;
        CHECK(ffg_vote_valid(*v->ffg, trace.blocks));
      }
    }
    CHECK(checked > 0);
  }
}
