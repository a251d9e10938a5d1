// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include "gadget/adversary.hpp"
#include "gadget/checkers.hpp"
#include "gadget/internal.hpp"
#include "gadget/simulator.hpp"

namespace gadget::adv {
namespace {

ScenarioConfig attack(std::uint32_t n, std::size_t corrupt, std::string strategy) {
    ScenarioConfig c;
    c.n = n;
    c.delta = 2;
    c.horizon = 70;
    c.gadget = GadgetKind::freezing;
    c.r_maj = 20;
    for (std::uint32_t v = n - static_cast<std::uint32_t>(corrupt); v < n; ++v) c.corruptions.push_back({v, 20});
    c.clients = {{0, kNever}, {0, kNever}};
    c.txs = {{1, 1, {}}, {2, 25, {}}};
    c.adversary.strategy = std::move(strategy);
    return c;
}

std::size_t count(const Trace& t, EventKind k) {
    std::size_t n = 0;
    for (const auto& e : t.events()) n += e.kind == k;
    return n;
}

TEST(Forging, QuorumOfCorruptedKeysSignsAConflict) {
    // 6 of 10 keys: a witness for a fork is accepted by C.
    KeyRegistry keys(10, 5);
    InstanceId inst(0, Ledger{}, ValidatorSet::first_n(10), 0);
    Witness w{inst, {}};
    for (std::uint32_t v = 4; v < 10; ++v) {
        w.votes.push_back(std::make_shared<const FinalityVote>(FinalityVote::make(keys.issue(v), inst, Ledger{kAdversaryTxBase})));
    }
    auto r = internal::witness_consume(keys, inst, w);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.ledger, (Ledger{kAdversaryTxBase}));
}

TEST(Forging, MinorityOfKeysIsBelowQuorum) {
    KeyRegistry keys(10, 5);
    InstanceId inst(0, Ledger{}, ValidatorSet::first_n(10), 0);
    Witness w{inst, {}};
    for (std::uint32_t v = 6; v < 10; ++v) {
        w.votes.push_back(std::make_shared<const FinalityVote>(FinalityVote::make(keys.issue(v), inst, Ledger{kAdversaryTxBase})));
    }
    EXPECT_EQ(internal::witness_consume(keys, inst, w).error, internal::WitnessError::below_quorum);
}

TEST(Forging, RunWithMajorityOfKeysInjectsConflicts) {
    Trace t = run(attack(10, 6, "double_spend"));
    EXPECT_GT(count(t, EventKind::inject), 0u);
    EXPECT_GT(count(t, EventKind::freeze), 0u);
    EXPECT_TRUE(check::check_safety(t).pass);
}

TEST(Forging, RunWithMinorityOfKeysNeverFreezes) {
    Trace t = run(attack(10, 4, "double_spend"));
    EXPECT_EQ(count(t, EventKind::freeze), 0u);
    for (const auto& v : check::check_all(t)) EXPECT_TRUE(v.pass) << v.name << ": " << v.evidence;
}

TEST(Strategies, SameSeedSameTrace) {
    for (const char* s : {"passive", "double_spend"}) {
        auto c = attack(4, 3, s);
        c.seed = 9;
        EXPECT_EQ(run(c).to_jsonl(), run(c).to_jsonl()) << s;
    }
}

TEST(Strategies, SeedDrivesTheSkew) {
    auto a = attack(4, 3, "double_spend");
    auto b = a;
    a.seed = 1;
    b.seed = 2;
    EXPECT_NE(run(a).to_jsonl(), run(b).to_jsonl());
}

TEST(Strategies, LongNameIsAnAlias) {
    auto a = attack(4, 3, "double_spend");
    auto b = attack(4, 3, "double_spend_equivocator");
    EXPECT_TRUE(b.problems().empty());
    EXPECT_EQ(run(a).to_jsonl(), run(b).to_jsonl());
}

TEST(Strategies, UnknownNameIsRejected) {
    AdversarySpec spec;
    spec.strategy = "chaos";
    EXPECT_THROW(make_strategy(spec, 1), std::invalid_argument);
    auto c = attack(4, 3, "chaos");
    EXPECT_FALSE(c.problems().empty());
}

TEST(Strategies, PassiveCorruptionOnlySilences) {
    Trace t = run(attack(4, 3, "passive"));
    EXPECT_EQ(count(t, EventKind::inject), 0u);
    EXPECT_EQ(count(t, EventKind::freeze), 0u);
    EXPECT_TRUE(check::check_safety(t).pass);
}

}  // namespace
}  // namespace gadget::adv
