// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include "gadget/checkers.hpp"
#include "gadget/recovery.hpp"
#include "gadget/simulator.hpp"

namespace gadget::recovery {
namespace {

using Delivered = std::map<std::uint32_t, std::optional<Ledger>>;

TEST(NewGenesis, MajorityOfBookmarks) {
    Delivered d{{0, Ledger{1, 2}}, {1, Ledger{1, 2}}, {2, Ledger{1}}};
    EXPECT_EQ(compute_new_genesis(d, 3), (Ledger{1, 2}));
}

TEST(NewGenesis, BottomCountsAgainst) {
    Delivered d{{0, Ledger{1, 2}}, {1, std::nullopt}, {2, Ledger{1}}};
    EXPECT_EQ(compute_new_genesis(d, 3), (Ledger{1}));
}

TEST(NewGenesis, NoMajorityGivesEmpty) {
    Delivered d{{0, Ledger{1}}, {1, Ledger{2}}, {2, std::nullopt}};
    EXPECT_EQ(compute_new_genesis(d, 3), Ledger{});
}

TEST(NewGenesis, LiarsInTheMinorityCannotMoveIt) {
    // Honest bookmarks {1,2} twice; a liar proposes a conflicting branch.
    Delivered d{{0, Ledger{1, 2}}, {1, Ledger{1, 2}}, {2, Ledger{9, 9, 9}}};
    EXPECT_EQ(compute_new_genesis(d, 3), (Ledger{1, 2}));
}

TEST(Carryover, DropsGenesisTxsAndDuplicates) {
    EXPECT_EQ(carryover({1, 2, 3, 2, 4}, Ledger{1, 2}), (std::vector<TxId>{3, 4}));
    EXPECT_EQ(carryover({}, Ledger{1}), std::vector<TxId>{});
}

TEST(RestartInstance, FieldsAreBound) {
    auto a = restart_instance(Ledger{1}, ValidatorSet({0, 1, 2}), 30);
    EXPECT_EQ(a.epoch_tag(), 1);
    EXPECT_EQ(a.genesis(), (Ledger{1}));
    EXPECT_EQ(a.valset(), ValidatorSet({0, 1, 2}));
    EXPECT_FALSE(a == restart_instance(Ledger{1}, ValidatorSet({0, 1, 2}), 31));
}

TEST(GenesisTallyTest, DecidesOnStrictMajorityOfNewSet) {
    KeyRegistry keys(5, 2);
    ValidatorSet v_new({0, 1, 2});
    GenesisTally tally(keys, v_new);
    auto inst = restart_instance(Ledger{1}, v_new, 20);
    EXPECT_TRUE(tally.add(GenesisVote::make(keys.issue(0), inst)));
    EXPECT_FALSE(tally.decided());
    EXPECT_TRUE(tally.add(GenesisVote::make(keys.issue(0), inst)));  // repeat signer
    EXPECT_FALSE(tally.decided());
    EXPECT_TRUE(tally.add(GenesisVote::make(keys.issue(1), inst)));
    ASSERT_TRUE(tally.decided());
    EXPECT_TRUE(*tally.decided() == inst);
}

TEST(GenesisTallyTest, RejectsOutsidersAndForgeries) {
    KeyRegistry keys(5, 2);
    ValidatorSet v_new({0, 1, 2});
    GenesisTally tally(keys, v_new);
    auto inst = restart_instance(Ledger{1}, v_new, 20);
    EXPECT_FALSE(tally.add(GenesisVote::make(keys.issue(4), inst)));  // killed validator
    KeyRegistry other(5, 3);
    EXPECT_FALSE(tally.add(GenesisVote::make(other.issue(1), inst)));
    auto wrong_set = restart_instance(Ledger{1}, ValidatorSet({0, 1}), 20);
    EXPECT_FALSE(tally.add(GenesisVote::make(keys.issue(1), wrong_set)));
    auto original = InstanceId(0, Ledger{}, v_new, 20);
    EXPECT_FALSE(tally.add(GenesisVote::make(keys.issue(1), original)));
}

TEST(GenesisTallyTest, TwoQuorumsAreAContractViolation) {
    KeyRegistry keys(3, 2);
    ValidatorSet v_new({0, 1, 2});
    GenesisTally tally(keys, v_new);
    auto a = restart_instance(Ledger{1}, v_new, 20);
    auto b = restart_instance(Ledger{2}, v_new, 20);
    tally.add(GenesisVote::make(keys.issue(0), a));
    tally.add(GenesisVote::make(keys.issue(1), a));
    tally.add(GenesisVote::make(keys.issue(1), b));
    EXPECT_THROW(tally.add(GenesisVote::make(keys.issue(2), b)), ContractViolation);
}

ScenarioConfig timeline() {
    ScenarioConfig c;
    c.n = 5;
    c.delta = 2;
    c.horizon = 200;
    c.r_maj = 30;
    c.r_rec = 60;
    c.kill = {3, 4};
    c.corruptions = {{2, 30}, {3, 30}, {4, 30}};
    c.clients = {{0, kNever}, {0, kNever}};
    c.txs = {{1, 2, {}}, {2, 14, {}}, {3, 40, {}}, {4, 120, {}}};
    c.adversary.strategy = "eve_confuser";
    return c;
}

TEST(RecoveryRun, RestartsOnOneGenesisAndConfirmsAgain) {
    Trace t = run(timeline());
    std::set<std::string> genesis_seen;
    Round restart = kNever;
    for (const auto& e : t.events()) {
        if (e.kind == EventKind::new_genesis && e.ledger) {
            std::ostringstream os;
            os << *e.ledger;
            genesis_seen.insert(os.str());
        }
        if (e.kind == EventKind::restart) restart = std::min(restart, e.round);
    }
    EXPECT_EQ(genesis_seen.size(), 1u);
    ASSERT_NE(restart, kNever);
    EXPECT_GE(restart, 60 + 4);  // no earlier than r_rec + u_BC
    bool confirmed_after = false;
    for (const auto& e : t.events()) {
        if (e.kind == EventKind::confirm && e.round > restart && e.ledger && e.ledger->contains(4)) confirmed_after = true;
    }
    EXPECT_TRUE(confirmed_after);
    for (const auto& v : check::check_all(t)) EXPECT_TRUE(v.pass) << v.name << ": " << v.evidence;
}

}  // namespace
}  // namespace gadget::recovery
