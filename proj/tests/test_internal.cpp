// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include "gadget/checkers.hpp"
#include "gadget/internal.hpp"
#include "gadget/scripted_oracle.hpp"
#include "gadget/simple_sync.hpp"
#include "gadget/simulator.hpp"
#include "support/oracles.hpp"

namespace gadget::internal {
namespace {

struct Fixture {
    KeyRegistry keys;
    InstanceId inst;

    explicit Fixture(std::uint32_t n) : keys(n, 17), inst(0, Ledger{}, ValidatorSet::first_n(n), 0) {}

    VoteRef vote(std::uint32_t v, Ledger l) const {
        return std::make_shared<const FinalityVote>(FinalityVote::make(keys.issue(v), inst, std::move(l)));
    }
    Witness witness(std::vector<VoteRef> votes) const { return Witness{inst, std::move(votes)}; }
};

TEST(WitnessConsume, QuorumOnMixedLedgers) {
    Fixture f(3);
    auto r = witness_consume(f.keys, f.inst, f.witness({f.vote(0, {1}), f.vote(1, {1, 2})}));
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.ledger, (Ledger{1}));
}

TEST(WitnessConsume, UnanimousQuorum) {
    Fixture f(3);
    auto r = witness_consume(f.keys, f.inst, f.witness({f.vote(0, {1, 2}), f.vote(1, {1, 2})}));
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.ledger, (Ledger{1, 2}));
}

TEST(WitnessConsume, BelowQuorum) {
    Fixture f(3);
    EXPECT_EQ(witness_consume(f.keys, f.inst, f.witness({f.vote(0, {1})})).error, WitnessError::below_quorum);
}

TEST(WitnessConsume, Rejections) {
    Fixture f(3);
    EXPECT_EQ(witness_consume(f.keys, f.inst, f.witness({f.vote(0, {1}), f.vote(0, {1, 2})})).error,
              WitnessError::duplicate_signer);
    InstanceId other(1, Ledger{}, ValidatorSet::first_n(3), 5);
    EXPECT_EQ(witness_consume(f.keys, other, f.witness({f.vote(0, {1}), f.vote(1, {1})})).error,
              WitnessError::wrong_instance);
    KeyRegistry wrong(3, 99);
    auto forged = std::make_shared<const FinalityVote>(FinalityVote::make(wrong.issue(2), f.inst, Ledger{1}));
    EXPECT_EQ(witness_consume(f.keys, f.inst, f.witness({f.vote(0, {1}), forged})).error, WitnessError::bad_signature);

    InstanceId restart(1, Ledger{7}, ValidatorSet::first_n(3), 10);
    auto off_genesis = [&](std::uint32_t v) {
        return std::make_shared<const FinalityVote>(FinalityVote::make(f.keys.issue(v), restart, Ledger{8}));
    };
    EXPECT_EQ(witness_consume(f.keys, restart, Witness{restart, {off_genesis(0), off_genesis(1)}}).error,
              WitnessError::genesis_mismatch);
}

TEST(WitnessProduce, QuorumOnOneLedger) {
    Fixture f(3);
    auto w = witness_produce(f.keys, f.inst, {f.vote(0, {1}), f.vote(1, {1})});
    ASSERT_TRUE(w);
    EXPECT_EQ(witness_consume(f.keys, f.inst, *w).ledger, (Ledger{1}));
}

TEST(WitnessProduce, BelowQuorumGivesNothing) {
    Fixture f(3);
    EXPECT_FALSE(witness_produce(f.keys, f.inst, {f.vote(0, {1})}));
    EXPECT_FALSE(witness_produce(f.keys, f.inst, {f.vote(0, {1}), f.vote(0, {1, 2})}));
}

TEST(WitnessProduce, PicksTheLongestObtainable) {
    Fixture f(3);
    std::vector<VoteRef> pool{f.vote(0, {1, 2}), f.vote(1, {1, 2}), f.vote(2, {1})};
    auto w = witness_produce(f.keys, f.inst, pool);
    ASSERT_TRUE(w);
    EXPECT_EQ(witness_consume(f.keys, f.inst, *w).ledger, (Ledger{1, 2}));
    std::set<std::uint32_t> signers;
    for (const auto& v : w->votes) signers.insert(v->signer().index);
    EXPECT_EQ(signers, (std::set<std::uint32_t>{0, 1}));
    EXPECT_EQ(oracle::brute_best_witness_length(f.keys, f.inst, pool), 2u);
}

TEST(VotePoolTest, VersionMovesOnlyWhenSupportChanges) {
    Fixture f(3);
    VotePool pool(f.keys, f.inst);
    EXPECT_TRUE(pool.add(f.vote(0, {1, 2})));
    auto v1 = pool.version();
    EXPECT_TRUE(pool.add(f.vote(0, {1})));  // prefix of a kept vote
    EXPECT_EQ(pool.version(), v1);
    EXPECT_TRUE(pool.add(f.vote(1, {1})));
    EXPECT_GT(pool.version(), v1);
    EXPECT_EQ(pool.best_ledger(), (Ledger{1}));
    KeyRegistry wrong(3, 5);
    EXPECT_FALSE(pool.add(std::make_shared<const FinalityVote>(FinalityVote::make(wrong.issue(2), f.inst, Ledger{1}))));
}

TEST(Forgery, MinorityCannotCertifyAConflict) {
    // n = 10: every 4-subset of corrupted signers, every choice of signers
    // placed in a witness. Honest signers only sign [1,2]; corrupted ones
    // sign [1,3]. No accepted witness may conflict with [1,2].
    Fixture f(10);
    std::vector<VoteRef> honest_vote, bad_vote;
    for (std::uint32_t v = 0; v < 10; ++v) {
        honest_vote.push_back(f.vote(v, {1, 2}));
        bad_vote.push_back(f.vote(v, {1, 3}));
    }
    std::size_t accepted = 0;
    for (std::uint32_t corrupt = 0; corrupt < (1u << 10); ++corrupt) {
        if (__builtin_popcount(corrupt) != 4) continue;
        for (std::uint32_t signers = 0; signers < (1u << 10); ++signers) {
            Witness w{f.inst, {}};
            for (std::uint32_t v = 0; v < 10; ++v) {
                if ((signers >> v) & 1u) w.votes.push_back(((corrupt >> v) & 1u) ? bad_vote[v] : honest_vote[v]);
            }
            auto r = witness_consume(f.keys, f.inst, w);
            if (!r.ok()) continue;
            ++accepted;
            ASSERT_TRUE(consistent(r.ledger, Ledger{1, 2})) << "corrupt=" << corrupt << " signers=" << signers;
        }
    }
    EXPECT_GT(accepted, 0u);
}

TEST(Forgery, MajorityCanCertifyBothForks) {
    Fixture f(10);
    Witness a{f.inst, {}}, b{f.inst, {}};
    for (std::uint32_t v = 4; v < 10; ++v) {
        a.votes.push_back(f.vote(v, {1, 2}));
        b.votes.push_back(f.vote(v, {1, 3}));
    }
    EXPECT_EQ(witness_consume(f.keys, f.inst, a).ledger, (Ledger{1, 2}));
    EXPECT_EQ(witness_consume(f.keys, f.inst, b).ledger, (Ledger{1, 3}));
}

TEST(SimpleSync, HonestRunFinalizesWithinConfiguredLatency) {
    ScenarioConfig c;
    c.n = 4;
    c.delta = 1;
    c.horizon = 80;
    c.clients = {{0, kNever}};
    c.txs = {{1, 0, {}}};
    Trace t = run(c);
    std::set<std::uint32_t> finalized;
    for (const auto& e : t.events()) {
        if (e.kind == EventKind::finalize && e.ledger && !e.ledger->txs.empty() && e.ledger->txs[0] == 1) {
            EXPECT_LE(e.round, c.u_pi());
            finalized.insert(e.party->index);
        }
    }
    EXPECT_EQ(finalized.size(), 4u);
    auto lat = check::measure_u_pi(t);
    EXPECT_GT(lat.samples, 0u);
    EXPECT_LE(lat.worst, c.u_pi());
}

TEST(SimpleSync, SilentLeaderIsSkipped) {
    ScenarioConfig c;
    c.n = 4;
    c.delta = 1;
    c.horizon = 80;
    c.clients = {{0, kNever}};
    c.corruptions = {{0, 0}};  // leader of epoch 0 never speaks
    c.txs = {{1, 0, {1, 2, 3}}};
    Trace t = run(c);
    bool confirmed = false;
    for (const auto& e : t.events()) {
        if (e.kind == EventKind::confirm && e.ledger && e.ledger->size() == 1) confirmed = true;
    }
    EXPECT_TRUE(confirmed);
    for (const auto& v : check::check_all(t)) EXPECT_TRUE(v.pass) << v.name << ": " << v.evidence;
}

TEST(SimpleSync, HonestFinalizedLedgersStayConsistentUnderDoubleVoting) {
    // Half the validators corrupted from round 20 and double-spending:
    // whatever the adversary certifies, honest finalization never forks.
    ScenarioConfig c;
    c.n = 4;
    c.delta = 1;
    c.horizon = 120;
    c.gadget = GadgetKind::freezing;
    c.r_maj = 20;
    c.corruptions = {{2, 20}, {3, 20}};
    c.clients = {{0, kNever}, {0, kNever}};
    c.txs = {{1, 0, {}}, {2, 10, {}}, {3, 30, {0}}};
    c.adversary.strategy = "double_spend";
    Trace t = run(c);
    std::vector<Ledger> fins;
    for (const auto& e : t.events()) {
        if (e.kind == EventKind::finalize && e.ledger) fins.push_back(*e.ledger);
    }
    ASSERT_FALSE(fins.empty());
    for (const auto& a : fins) {
        for (const auto& b : fins) EXPECT_TRUE(consistent(a, b));
    }
}

TEST(ScriptedOracle, AppendsReadyTransactionsAfterTheDelay) {
    InstanceId inst(0, Ledger{}, ValidatorSet::first_n(3), 0);
    OracleScript script(inst, 6, 2, std::nullopt);
    EXPECT_EQ(script.finality_delay(), 4);
    auto all_honest = [](std::uint32_t, Round) { return true; };
    script.record_receipt(0, 7, 1);
    script.advance(1, all_honest);
    script.record_receipt(1, 7, 2);
    script.advance(2, all_honest);
    EXPECT_TRUE(script.canonical().empty());
    script.record_receipt(2, 7, 3);  // ready from round 3
    for (Round r = 3; r < 7; ++r) {
        script.advance(r, all_honest);
        EXPECT_TRUE(script.canonical().empty()) << r;
    }
    script.advance(7, all_honest);
    EXPECT_EQ(script.canonical(), (Ledger{7}));
}

TEST(ScriptedOracle, CorruptedValidatorsAreNotWaitedFor) {
    InstanceId inst(0, Ledger{}, ValidatorSet::first_n(3), 0);
    OracleScript script(inst, 2, 1, std::nullopt);
    auto two_honest = [](std::uint32_t v, Round) { return v != 2; };
    script.record_receipt(0, 5, 0);
    script.record_receipt(1, 5, 0);
    script.advance(0, two_honest);
    script.advance(1, two_honest);
    EXPECT_EQ(script.canonical(), (Ledger{5}));
}

TEST(ScriptedOracle, StallStopsGrowth) {
    InstanceId inst(0, Ledger{}, ValidatorSet::first_n(1), 0);
    OracleScript script(inst, 1, 1, Round{3});
    auto honest = [](std::uint32_t, Round) { return true; };
    script.record_receipt(0, 1, 0);
    script.advance(0, honest);
    EXPECT_EQ(script.canonical(), (Ledger{1}));
    script.record_receipt(0, 2, 3);
    for (Round r = 3; r < 10; ++r) script.advance(r, honest);
    EXPECT_EQ(script.canonical(), (Ledger{1}));
    EXPECT_THROW(OracleScript(inst, 0, 1, std::nullopt), std::invalid_argument);
}

}  // namespace
}  // namespace gadget::internal
