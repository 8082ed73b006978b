#include "doctest.h"
#include "fflab/slashing.hpp"
#include "helpers.hpp"

using namespace fflab;
using test::ViewBuilder;

TEST_CASE("E1: distinct votes sharing a target checkpoint slot") {
  ViewBuilder vb;
  vb.add(0, 0, {1});  // A
  vb.add(0, 0, {2});  // B conflicting A

  FfgVote lone{vb.cp(0, 0), vb.cp(1, 2), 1};
  CHECK(detect_e1(std::vector<FfgVote>{lone}).empty());

  // Identical duplicates are not distinct.
  CHECK(detect_e1(std::vector<FfgVote>{lone, lone}).empty());

  FfgVote other{vb.cp(0, 0), vb.cp(2, 2), 1};
  auto hits = detect_e1(std::vector<FfgVote>{lone, other});
  REQUIRE(hits.size() == 1);
  CHECK(hits.count(1));

  // The returned pair alone re-triggers the predicate.
  auto& ev = hits.at(1);
  CHECK(detect_e1(std::vector<FfgVote>{ev.first, ev.second}).count(1));
}

TEST_CASE("E2: surround voting over the strict (c, p) order") {
  ViewBuilder vb;
  vb.add(0, 0);      // index 1: slot 0 (chain B's base)
  vb.add(1, 1);      // index 2: B at p=1
  vb.add(2, 2);      // index 3: C at p=2
  vb.add(3, 4);      // index 4: X at p=4
  vb.add(4, 5);      // index 5: Y at p=5

  // Source shifts backwards: (C,3) -> (X,4) then (B,3) -> (Y,5) with
  // (3, p=1) < (3, p=2).
  FfgVote v1{vb.cp(3, 3), vb.cp(4, 4), 2};
  FfgVote v2{vb.cp(2, 3), vb.cp(5, 5), 2};
  auto hits = detect_e2(std::vector<FfgVote>{v1, v2});
  REQUIRE(hits.size() == 1);
  CHECK(hits.count(2));
  auto& ev = hits.at(2);
  CHECK(detect_e2(std::vector<FfgVote>{ev.first, ev.second}).count(2));

  // A normal advancing ladder is clean.
  FfgVote a{vb.cp(0, 0), vb.cp(2, 1), 3};
  FfgVote b{vb.cp(2, 1), vb.cp(3, 2), 3};
  CHECK(detect_e2(std::vector<FfgVote>{a, b}).empty());

  // Both orderings of the pair are tried: (B,2)->(X,5) and (C,3)->(Y,4).
  FfgVote p{vb.cp(2, 2), vb.cp(4, 5), 4};
  FfgVote q{vb.cp(3, 3), vb.cp(5, 4), 4};
  CHECK(detect_e2(std::vector<FfgVote>{p, q}).count(4));
  CHECK(detect_e2(std::vector<FfgVote>{q, p}).count(4));
}

TEST_CASE("E3: ack read as a checkpoint self-link") {
  ViewBuilder vb;
  vb.add(0, 0);  // A base
  vb.add(1, 2);  // A at p=2
  vb.add(2, 3);  // B at p=3
  vb.add(3, 4);  // deeper

  // Ack at (A,3) together with vote (A,3) -> (B,4): source equals the acked
  // checkpoint, no violation.
  AckMsg ack{vb.cp(2, 3), 3, 5};
  FfgVote fine{vb.cp(2, 3), vb.cp(3, 4), 5};
  CHECK(detect_e3(std::vector<FfgVote>{fine}, std::vector<AckMsg>{ack}).empty());

  // Vote (genesis,0) -> (X,5) surrounds the ack at checkpoint slot 3.
  FfgVote wide{vb.cp(0, 0), vb.cp(4, 5), 5};
  auto hits = detect_e3(std::vector<FfgVote>{wide}, std::vector<AckMsg>{ack});
  REQUIRE(hits.size() == 1);
  CHECK(hits.count(5));
  auto& ev = hits.at(5);
  CHECK(detect_e3(std::vector<FfgVote>{ev.vote}, std::vector<AckMsg>{ev.ack}).count(5));

  CHECK(detect_e3(std::vector<FfgVote>{wide}, {}).empty());
}

TEST_CASE("detectors are monotone in the message set") {
  ViewBuilder vb;
  vb.add(0, 0, {1});
  vb.add(0, 0, {2});
  std::vector<FfgVote> votes{
      FfgVote{vb.cp(0, 0), vb.cp(1, 2), 1},
      FfgVote{vb.cp(0, 0), vb.cp(2, 2), 1},
      FfgVote{vb.cp(0, 0), vb.cp(1, 1), 2},
  };
  auto small = detect_e1(std::vector<FfgVote>(votes.begin(), votes.begin() + 2));
  auto large = detect_e1(votes);
  for (const auto& [id, ev] : small) CHECK(large.count(id));
}

TEST_CASE("accountable_set: needs genuinely conflicting finalized chains") {
  // Build two 3-validator views finalizing conflicting chains with validator
  // 2 double-voting (minimal double finalization).
  ViewBuilder va;
  ChainRef a = va.add(0, 0, {1});
  ViewBuilder vc;
  ChainRef c = vc.add(0, 0, {2});
  (void)a;
  (void)c;

  const std::uint32_t n = 3;  // quorum 2
  // Side A: validators 0 and 2 justify then finalize (A,1).
  std::vector<FfgVote> all;
  for (ValidatorId s : {0u, 2u}) {
    va.insert(va.ffg_vote(1, 1, s, 0, 0, 1, 1));
    all.push_back(FfgVote{va.cp(0, 0), va.cp(1, 1), s});
  }
  va.add(1, 1);  // A2 extends A
  for (ValidatorId s : {0u, 2u}) {
    va.insert(va.ffg_vote(2, 2, s, 1, 1, 2, 2));
    all.push_back(FfgVote{va.cp(1, 1), va.cp(2, 2), s});
  }
  // Side C: validators 1 and 2 justify then finalize (C,1).
  for (ValidatorId s : {1u, 2u}) {
    vc.insert(vc.ffg_vote(1, 1, s, 0, 0, 1, 1));
    all.push_back(FfgVote{vc.cp(0, 0), vc.cp(1, 1), s});
  }
  vc.add(1, 1);
  for (ValidatorId s : {1u, 2u}) {
    vc.insert(vc.ffg_vote(2, 2, s, 1, 1, 2, 2));
    all.push_back(FfgVote{vc.cp(1, 1), vc.cp(2, 2), s});
  }

  CHECK(greatest_finalized(va.view, n) == va.cp(1, 1));
  CHECK(greatest_finalized(vc.view, n) == vc.cp(1, 1));

  auto rep = accountable_set(all, {}, va.view, vc.view, n);
  CHECK(rep.flagged == std::set<ValidatorId>{2});
  CHECK(rep.flagged.size() >= accountability_threshold(n));

  // Same chain on both sides: no conflict to account for.
  try {
    (void)accountable_set(all, {}, va.view, va.view, n);
    FAIL("expected NoConflict");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_conflict);
  }
}
