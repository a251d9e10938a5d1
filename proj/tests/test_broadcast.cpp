// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include "gadget/broadcast.hpp"

namespace gadget::bcast {
namespace {

struct Group {
    KeyRegistry keys;
    DsParams params;
    std::vector<DsRelay> relays;

    Group(std::uint32_t n, Round start, Round delta) : keys(n, 11) {
        params.start = start;
        params.delta = delta;
        params.members = ValidatorSet::first_n(n);
        params.context = ds_context(start, params.members);
        for (std::uint32_t v = 0; v < n; ++v) relays.emplace_back(keys, keys.issue(v), params);
    }

    SignatureChain chain(std::uint32_t sender, const Ledger& value, std::vector<std::uint32_t> extra) const {
        SignatureChain c{params.context, PartyId::validator(sender), value, {}};
        auto bytes = SignatureChain::signing_bytes(c.context, c.sender, c.value);
        c.chain.push_back(sign(keys.issue(sender), bytes));
        for (auto s : extra) c.chain.push_back(sign(keys.issue(s), bytes));
        return c;
    }
};

TEST(DsParamsTest, RoundIndexing) {
    Group g(5, 10, 2);
    EXPECT_EQ(g.params.tolerance(), 2u);
    EXPECT_EQ(g.params.u_bc(), 6);
    EXPECT_EQ(g.params.deliver_round(), 16);
    EXPECT_EQ(g.params.ds_round_at(10), 0u);
    EXPECT_EQ(g.params.ds_round_at(11), 1u);
    EXPECT_EQ(g.params.ds_round_at(12), 1u);
    EXPECT_EQ(g.params.ds_round_at(13), 2u);
    EXPECT_EQ(g.params.ds_round_at(16), 3u);
    EXPECT_EQ(g.params.ds_round_at(17), 0u);
}

TEST(DsRelayTest, HonestSenderIsDeliveredByAll) {
    Group g(4, 0, 1);
    auto c = g.relays[0].start({1, 2});
    for (std::uint32_t v = 1; v < 4; ++v) {
        auto relay = g.relays[v].on_chain(c, 1);
        ASSERT_TRUE(relay);
        EXPECT_EQ(relay->chain.size(), 2u);
    }
    for (auto& r : g.relays) EXPECT_EQ(r.deliver(0), (Ledger{1, 2}));
}

TEST(DsRelayTest, SilentSenderDeliversBottom) {
    Group g(4, 0, 1);
    for (auto& r : g.relays) EXPECT_EQ(r.deliver(2), std::nullopt);
    auto all = g.relays[0].deliver_all();
    EXPECT_EQ(all.size(), 4u);
    EXPECT_FALSE(all.at(2));
}

TEST(DsRelayTest, ShortChainLateIsRejected) {
    // One signature at DS-round 3 falls short of the required three.
    Group g(5, 0, 1);
    auto c = g.chain(4, {7}, {});
    EXPECT_FALSE(g.relays[0].valid(c, 3));
    EXPECT_FALSE(g.relays[0].on_chain(c, 3));
    EXPECT_TRUE(g.relays[0].extracted(4).empty());
    auto long_enough = g.chain(4, {7}, {3, 2});
    EXPECT_TRUE(g.relays[0].valid(long_enough, 3));
    EXPECT_FALSE(g.relays[0].on_chain(long_enough, 3));  // last DS-round: extracted, not relayed
    EXPECT_EQ(g.relays[0].deliver(4), (Ledger{7}));
}

TEST(DsRelayTest, EquivocationDeliversBottom) {
    Group g(4, 0, 1);
    g.relays[0].on_chain(g.chain(3, {1}, {}), 1);
    auto second = g.relays[0].on_chain(g.chain(3, {2}, {}), 1);
    ASSERT_TRUE(second);  // relayed so the others learn it too
    EXPECT_EQ(g.relays[0].extracted(3).size(), 2u);
    EXPECT_EQ(g.relays[0].deliver(3), std::nullopt);
    EXPECT_FALSE(g.relays[0].on_chain(g.chain(3, {3}, {}), 1));  // a third value is not relayed
}

TEST(DsRelayTest, RelaysAtMostOncePerValue) {
    Group g(4, 0, 1);
    auto c = g.chain(1, {5}, {});
    EXPECT_TRUE(g.relays[0].on_chain(c, 1));
    EXPECT_FALSE(g.relays[0].on_chain(c, 1));
    EXPECT_FALSE(g.relays[0].on_chain(g.chain(1, {5}, {2}), 2));
}

TEST(DsRelayTest, LastRoundChainsAreExtractedNotRelayed) {
    Group g(3, 0, 1);  // t = 1, delivery at round 2
    auto c = g.chain(2, {4}, {1});
    EXPECT_FALSE(g.relays[0].on_chain(c, 2));
    EXPECT_EQ(g.relays[0].deliver(2), (Ledger{4}));
}

TEST(DsRelayTest, StructuralRejections) {
    Group g(4, 0, 1);
    auto dup = g.chain(1, {5}, {1});
    EXPECT_FALSE(g.relays[0].valid(dup, 1));
    auto wrong_first = g.chain(1, {5}, {});
    wrong_first.sender = PartyId::validator(2);
    EXPECT_FALSE(g.relays[0].valid(wrong_first, 1));
    auto wrong_ctx = g.chain(1, {5}, {});
    wrong_ctx.context ^= 1;
    EXPECT_FALSE(g.relays[0].valid(wrong_ctx, 1));
    auto tampered = g.chain(1, {5}, {2});
    tampered.value = Ledger{6};
    EXPECT_FALSE(g.relays[0].valid(tampered, 1));
    KeyRegistry outsider(6, 11);
    auto foreign = g.chain(1, {5}, {});
    foreign.chain.push_back(sign(outsider.issue(5), SignatureChain::signing_bytes(foreign.context, foreign.sender, foreign.value)));
    EXPECT_FALSE(g.relays[0].valid(foreign, 2));
    EXPECT_FALSE(g.relays[0].on_chain(g.chain(1, {5}, {}), 0));  // before the first window
    EXPECT_FALSE(g.relays[0].on_chain(g.chain(1, {5}, {2, 3}), 5));  // after delivery
}

}  // namespace
}  // namespace gadget::bcast
