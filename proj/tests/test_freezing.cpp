// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include "gadget/checkers.hpp"
#include "gadget/freezing.hpp"
#include "gadget/simulator.hpp"

namespace gadget::freezing {
namespace {

TEST(FreezeCore, ConfirmsAfterTheWait) {
    FreezeCore c(2);
    c.on_witness({1}, 3);
    EXPECT_FALSE(c.fire_timers(4));
    auto got = c.fire_timers(5);
    ASSERT_TRUE(got);
    EXPECT_EQ(*got, (Ledger{1}));
    EXPECT_EQ(c.confirmed(), (Ledger{1}));
    EXPECT_EQ(c.pending_timers(), 0u);
}

TEST(FreezeCore, ConflictArrivingDuringTheWaitBlocksConfirmation) {
    FreezeCore c(2);
    c.on_witness({1, 2}, 3);
    auto out = c.on_witness({1, 3}, 4);
    EXPECT_TRUE(out.new_ledger);
    EXPECT_TRUE(out.first_conflict);
    EXPECT_TRUE(c.has_conflict());
    EXPECT_FALSE(c.fire_timers(10));
    EXPECT_EQ(c.confirmed(), Ledger{});
}

TEST(FreezeCore, CommonPrefixOfAConflictStillConfirms) {
    FreezeCore c(1);
    c.on_witness({1, 2}, 0);
    c.on_witness({1, 3}, 0);
    c.on_witness({1}, 0);
    EXPECT_EQ(c.fire_timers(1), (Ledger{1}));
    c.on_witness({1, 2, 4}, 2);
    EXPECT_FALSE(c.fire_timers(5));  // frozen at [1]
}

TEST(FreezeCore, ShorterCandidateNeverReplacesConfirmed) {
    FreezeCore c(1, Ledger{1, 2});
    c.on_witness({1}, 0);
    EXPECT_FALSE(c.fire_timers(1));
    EXPECT_EQ(c.confirmed(), (Ledger{1, 2}));
}

TEST(FreezeCore, EqualLengthCandidateDoesNotReconfirm) {
    FreezeCore c(1);
    c.on_witness({1}, 0);
    EXPECT_TRUE(c.fire_timers(1));
    c.on_witness({1}, 3);
    EXPECT_FALSE(c.fire_timers(4));
}

TEST(FreezeCore, RepeatedLedgerReArmsButIsNotNew) {
    FreezeCore c(3);
    EXPECT_TRUE(c.on_witness({1}, 0).new_ledger);
    EXPECT_FALSE(c.on_witness({1}, 1).new_ledger);
    EXPECT_EQ(c.seen().size(), 1u);
    EXPECT_EQ(c.pending_timers(), 2u);
}

TEST(FreezeCore, SecondConflictIsNotFirst) {
    FreezeCore c(1);
    c.on_witness({1}, 0);
    EXPECT_TRUE(c.on_witness({2}, 0).first_conflict);
    EXPECT_FALSE(c.on_witness({3}, 0).first_conflict);
}

TEST(FreezeCore, DiscardKeepsConfirmed) {
    FreezeCore c(1);
    c.on_witness({1}, 0);
    c.fire_timers(1);
    c.on_witness({1, 2}, 1);
    c.discard_timers();
    EXPECT_EQ(c.pending_timers(), 0u);
    EXPECT_FALSE(c.fire_timers(5));
    EXPECT_EQ(c.confirmed(), (Ledger{1}));
}

TEST(FreezeCore, ExtensionsConfirmInOrder) {
    FreezeCore c(2);
    c.on_witness({1}, 0);
    c.on_witness({1, 2}, 1);
    c.on_witness({1, 2, 3}, 1);
    EXPECT_EQ(c.fire_timers(2), (Ledger{1}));
    EXPECT_EQ(c.fire_timers(3), (Ledger{1, 2, 3}));
}

ScenarioConfig double_spend(std::uint32_t n, std::size_t corrupt, Round wait_deltas) {
    ScenarioConfig c;
    c.n = n;
    c.delta = 2;
    c.horizon = 90;
    c.gadget = GadgetKind::freezing;
    c.validator_wait_deltas = 1;
    c.client_wait_deltas = wait_deltas;
    c.r_maj = 20;
    for (std::uint32_t v = n - static_cast<std::uint32_t>(corrupt); v < n; ++v) c.corruptions.push_back({v, 20});
    c.clients = {{0, kNever}, {0, kNever}};
    c.txs = {{1, 1, {}}};
    c.adversary.strategy = "double_spend";
    return c;
}

TEST(FreezingRun, DoubleSpendAfterMajorityLossIsContained) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto c = double_spend(4, 3, 1);
        c.seed = seed;
        Trace t = run(c);
        EXPECT_TRUE(check::check_safety(t).pass) << seed;
        std::size_t freezes = 0;
        for (const auto& e : t.events()) freezes += e.kind == EventKind::freeze;
        EXPECT_GT(freezes, 0u) << "attack never surfaced, seed " << seed;
    }
}

TEST(FreezingRun, NinetyPercentCorruptionIsContained) {
    auto c = double_spend(10, 9, 1);
    Trace t = run(c);
    EXPECT_TRUE(check::check_safety(t).pass) << check::check_safety(t).evidence;
}

TEST(FreezingRun, ZeroWaitLetsClientsFork) {
    bool forked = false;
    for (std::uint64_t seed = 1; seed <= 5 && !forked; ++seed) {
        auto c = double_spend(4, 3, 0);
        c.seed = seed;
        forked = !check::check_safety(run(c)).pass;
    }
    EXPECT_TRUE(forked);
}

}  // namespace
}  // namespace gadget::freezing
