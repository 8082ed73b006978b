#include <algorithm>

#include "doctest.h"
#include "fflab/forkchoice.hpp"
#include "fflab/simnet.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fflab;
using test::ViewBuilder;

TEST_CASE("fil_eq removes every vote of an equivocator, all slots") {
  ViewBuilder vb;
  vb.add(0, 0, {1});
  vb.add(0, 0, {2});
  VoteList votes{vb.vote(1, 2, 1), vb.vote(2, 2, 1), vb.vote(1, 5, 1), vb.vote(1, 2, 2)};
  VoteList out = fil_eq(votes);
  REQUIRE(out.size() == 1);
  CHECK(out[0].sender == 2);

  CHECK(fil_eq({}).empty());
  VoteList clean{vb.vote(1, 2, 1), vb.vote(1, 3, 1)};
  CHECK(fil_eq(clean).size() == 2);
}

TEST_CASE("fil_exp keeps exactly the slots >= t - eta - 1") {
  ViewBuilder vb;
  vb.add(0, 0);
  VoteList votes{vb.vote(1, 2, 0), vb.vote(1, 3, 1), vb.vote(1, 5, 2)};
  VoteList out = fil_exp(votes, 5, 1);  // boundary 5 - 1 - 1 = 3
  REQUIRE(out.size() == 2);
  CHECK(out[0].slot == 3);
  CHECK(out[1].slot == 5);

  // t = 0 keeps everything.
  CHECK(fil_exp(votes, 0, 1).size() == 3);
}

TEST_CASE("fil_lmd keeps per-sender latest votes, same-slot pairs included") {
  ViewBuilder vb;
  vb.add(0, 0, {1});
  vb.add(0, 0, {2});
  VoteList votes{vb.vote(1, 2, 1), vb.vote(1, 4, 1), vb.vote(2, 3, 2)};
  VoteList out = fil_lmd(votes);
  REQUIRE(out.size() == 2);
  CHECK(out[0].slot == 4);  // input order preserved: sender 1's latest first
  CHECK(out[1].slot == 3);

  // Equivocating same-slot votes both survive lmd; fil_eq handles them.
  VoteList eq{vb.vote(1, 2, 1), vb.vote(2, 2, 1)};
  CHECK(fil_lmd(eq).size() == 2);
  CHECK(fil_rlmd(eq, 2, 1).empty());
}

TEST_CASE("senders_s counts non-expired senders, equivocators included") {
  ViewBuilder vb;
  vb.add(0, 0, {1});
  vb.add(0, 0, {2});
  vb.insert(vb.vote(1, 2, 1));
  vb.insert(vb.vote(2, 2, 1));  // equivocation
  vb.insert(vb.vote(1, 0, 2));  // expired for t = 3, eta = 1

  View empty;
  CHECK(senders_s(empty, 3, 1).empty());
  auto s = senders_s(vb.view, 3, 1);
  CHECK(s == std::set<ValidatorId>{1});
  CHECK(fil_rlmd(view_votes(vb.view), 3, 1).empty());  // fil_eq would drop 1
}

TEST_CASE("votes_for restricts the filtered votes to extensions of a chain") {
  ViewBuilder vb;
  ChainRef a = vb.add(0, 0, {1});
  ChainRef a1 = vb.add(1, 1);
  ChainRef b = vb.add(0, 0, {2});
  (void)a1;
  vb.insert(vb.vote(2, 1, 0));  // for a1
  vb.insert(vb.vote(2, 1, 1));
  vb.insert(vb.vote(3, 1, 2));  // for b
  vb.insert(vb.vote(3, 0, 3));  // older vote for b

  CHECK(votes_for(vb.view, vb.genesis(), 1, 2).size() == 4);
  CHECK(votes_for(vb.view, a, 1, 2).size() == 2);
  CHECK(votes_for(vb.view, b, 1, 2).size() == 2);

  // A chain conflicting with every vote gathers nothing.
  ChainRef c = vb.add(0, 0, {3});
  CHECK(votes_for(vb.view, c, 1, 2).empty());
}

TEST_CASE("mfc follows the worked majority example") {
  // n = 4, eta = 1, t = 1; slot-0 votes: v1, v2, v3 for B, v4 for B'.
  ViewBuilder vb;
  ChainRef b = vb.add(0, 0, {1});
  ChainRef b2 = vb.add(0, 0, {2});
  for (ValidatorId s : {1u, 2u, 3u}) vb.insert(vb.vote(1, 0, s));
  vb.insert(vb.vote(2, 0, 4));
  (void)b2;

  // Same view twice: |S| = 4, count(B) = 3 > 2.
  CHECK(mfc(vb.view, vb.view, vb.genesis(), 1, 1) == b);

  // Frozen view missing v3's vote: count drops to 2, not a majority.
  View frozen;
  for (const auto& [id, blk] : vb.view.tree().blocks()) frozen.insert(Message{BlockMsg{blk}});
  frozen.insert(Message{vb.vote(1, 0, 1)});
  frozen.insert(Message{vb.vote(1, 0, 2)});
  frozen.insert(Message{vb.vote(2, 0, 4)});
  CHECK(mfc(frozen, vb.view, vb.genesis(), 1, 1) == vb.genesis());

  // No votes at all: the root comes back.
  View none;
  CHECK(mfc(none, none, none.genesis(), 1, 1) == none.genesis());

  // Unresolvable root.
  CHECK_THROWS_AS((void)mfc(vb.view, vb.view, ChainRef{0xbad}, 1, 1), Error);
}

TEST_CASE("mfc output always extends the root") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto fx = oracle::random_forkchoice_fixture(seed);
    ChainRef out = mfc(fx.v, fx.v_prime, fx.root, fx.t, fx.eta);
    CHECK(fx.v_prime.tree().is_prefix(fx.root, out));
  }
}

TEST_CASE("rlmd_ghost walks the heaviest subtree") {
  // genesis -> {A, B}, A -> A1; 2 votes for A1, 1 for B.
  ViewBuilder vb;
  ChainRef a = vb.add(0, 0, {1});
  ChainRef b = vb.add(0, 0, {2});
  ChainRef a1 = vb.add(1, 1);
  (void)a;
  (void)b;
  vb.insert(vb.vote(3, 1, 0));
  vb.insert(vb.vote(3, 1, 1));
  vb.insert(vb.vote(2, 1, 2));
  CHECK(rlmd_ghost(vb.view, vb.genesis(), 1, 2) == a1);

  // No votes: the walk still descends eligible children deterministically,
  // and an empty tree returns the start.
  View bare;
  CHECK(rlmd_ghost(bare, bare.genesis(), 3, 1) == bare.genesis());

  // Equal weights on two children: smaller id wins, input order irrelevant.
  ViewBuilder tie;
  ChainRef x = tie.add(0, 0, {1});
  ChainRef y = tie.add(0, 0, {2});
  tie.insert(tie.vote(1, 1, 0));
  tie.insert(tie.vote(2, 1, 1));
  CHECK(rlmd_ghost(tie.view, tie.genesis(), 1, 2).tip == std::min(x.tip, y.tip));

  // Children beyond slot t are not eligible.
  ViewBuilder deep;
  ChainRef d = deep.add(0, 5);
  (void)d;
  deep.insert(deep.vote(1, 5, 0));
  CHECK(rlmd_ghost(deep.view, deep.genesis(), 4, 2) == deep.genesis());
  CHECK(rlmd_ghost(deep.view, deep.genesis(), 5, 2) == d);
}

TEST_CASE("rlmd_ghost tip never exceeds the current slot") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto fx = oracle::random_forkchoice_fixture(seed);
    ChainRef out = rlmd_ghost(fx.v_prime, fx.v_prime.genesis(), fx.t, fx.eta);
    CHECK(fx.v_prime.tree().tip_slot(out) <= fx.t);
  }
}

TEST_CASE("filters are idempotent") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto fx = oracle::random_forkchoice_fixture(seed);
    VoteList once = fil_rlmd(view_votes(fx.v_prime), fx.t, fx.eta);
    VoteList twice = fil_rlmd(once, fx.t, fx.eta);
    CHECK(once == twice);
  }
}

TEST_CASE("fast_confirm_simple: quorum support with deterministic maximum") {
  // n = 3 (threshold 2): all three vote chain C in slot t.
  ViewBuilder vb;
  ChainRef c = vb.add(0, 0);
  for (ValidatorId s : {0u, 1u, 2u}) vb.insert(vb.vote(1, 4, s));
  auto [chain, cert] = fast_confirm_simple(vb.view, 4, 3);
  CHECK(chain == c);
  CHECK(cert.size() == 3);

  // One vote only: no candidate.
  ViewBuilder one;
  one.add(0, 0);
  one.insert(one.vote(1, 4, 0));
  auto [g, q] = fast_confirm_simple(one.view, 4, 3);
  CHECK(g == one.genesis());
  CHECK(q.empty());

  // 2 vote C, 1 votes child C1: C has support 3, C1 only 1; max is C.
  ViewBuilder mix;
  ChainRef cc = mix.add(0, 0);
  ChainRef c1 = mix.add(1, 1);
  (void)c1;
  mix.insert(mix.vote(1, 4, 0));
  mix.insert(mix.vote(1, 4, 1));
  mix.insert(mix.vote(2, 4, 2));
  auto [best, bq] = fast_confirm_simple(mix.view, 4, 3);
  CHECK(best == cc);
  CHECK(bq.size() == 3);
}

TEST_CASE("fast_confirm_gj falls back to the greatest justified chain") {
  // Empty view: genesis with empty certificate.
  View none;
  auto [g, q] = fast_confirm_gj(none, 0, 3);
  CHECK(g == none.genesis());
  CHECK(q.empty());

  // Quorum on a branch conflicting with the justified chain: GJ wins.
  ViewBuilder vb;
  ChainRef a = vb.add(0, 0, {1});  // justified branch
  ChainRef b = vb.add(0, 0, {2});  // quorum branch
  (void)b;
  const std::uint32_t n = 3;
  for (ValidatorId s = 0; s < n; ++s) vb.insert(vb.ffg_vote(1, 1, s, 0, 0, 1, 1));
  for (ValidatorId s = 0; s < n; ++s) vb.insert(vb.vote(2, 2, s));
  auto [chain, cert] = fast_confirm_gj(vb.view, 2, n);
  CHECK(chain == a);
  CHECK(cert.empty());

  // With GJ still genesis the result matches fast_confirm_simple.
  ViewBuilder plain;
  ChainRef p = plain.add(0, 0);
  for (ValidatorId s = 0; s < n; ++s) plain.insert(plain.vote(1, 2, s));
  CHECK(fast_confirm_gj(plain.view, 2, n).first == p);
  CHECK(fast_confirm_gj(plain.view, 2, n) == fast_confirm_simple(plain.view, 2, n));
}

TEST_CASE("oracle equivalence on seeded fixtures") {
  for (std::uint64_t seed = 0; seed < 250; ++seed) {
    auto fx = oracle::random_forkchoice_fixture(seed);
    CHECK(mfc(fx.v, fx.v_prime, fx.root, fx.t, fx.eta) ==
          oracle::mfc_brute(fx.v, fx.v_prime, fx.root, fx.t, fx.eta));
    CHECK(rlmd_ghost(fx.v_prime, fx.root, fx.t, fx.eta) ==
          oracle::rlmd_ghost_brute(fx.v_prime, fx.root, fx.t, fx.eta));
  }
}

TEST_CASE("graded delivery on harness-generated view triples") {
  // Under synchrony, for any slot t: the frozen view of a validator at its
  // vote round is contained in the proposer's view at the propose round,
  // which is contained in the validator's view at the vote round. Whenever
  // the frozen/current intersection clears the majority for a chain, the
  // proposer's view alone must clear its own majority for it.
  SimConfig cfg;
  cfg.n = 5;
  cfg.variant = Variant::tob_3sf;
  cfg.delta = 1;
  cfg.kappa = 2;
  cfg.num_slots = 8;
  cfg.seed = 77;
  Trace trace = run_simulation(cfg);
  RoundClock clock{cfg.delta};

  std::size_t tested = 0;
  for (Slot t = 1; t < cfg.num_slots; ++t) {
    auto it = trace.proposers.find(t);
    REQUIRE(it != trace.proposers.end());
    View vp = trace.validator_view(it->second, clock.propose_round(t));
    for (ValidatorId i = 0; i < cfg.n; ++i) {
      View frozen = trace.validator_view(i, clock.merge_round(t - 1));
      View current = trace.validator_view(i, clock.vote_round(t));
      std::size_t s_cur = senders_s(current, t, cfg.eta()).size();
      std::size_t s_p = senders_s(vp, t, cfg.eta()).size();
      for (const auto& [id, blk] : current.tree().blocks()) {
        ChainRef chi{id};
        auto a = votes_for(frozen, chi, t, cfg.eta());
        auto b = votes_for(current, chi, t, cfg.eta());
        VoteList inter;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                              std::back_inserter(inter));
        if (2 * inter.size() > s_cur) {
          ++tested;
          CHECK(2 * votes_for(vp, chi, t, cfg.eta()).size() > s_p);
        }
      }
    }
  }
  CHECK(tested > 0);
}

TEST_CASE("sender-level intersection flag agrees on clean synchronous views") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto fx = oracle::random_forkchoice_fixture(seed);
    FcOptions message_level;
    FcOptions sender_level;
    sender_level.sender_level_intersection = true;
    ChainRef a = mfc(fx.v_prime, fx.v_prime, fx.root, fx.t, fx.eta, message_level);
    ChainRef b = mfc(fx.v_prime, fx.v_prime, fx.root, fx.t, fx.eta, sender_level);
    // With identical views the two readings coincide: each sender's latest
    // votes are the same messages on both sides.
    CHECK(a == b);
  }
}
