// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "gadget/demos.hpp"
#include "gadget/gadget.hpp"

namespace gadget {
namespace {

nlohmann::json base() {
    return nlohmann::json::parse(R"({"name": "t", "n": 4, "delta": 1, "horizon": 50, "n_clients": 1,
                                     "txs": [{"id": 1, "round": 0}]})");
}

bool mentions(const ConfigError& e, std::string_view needle) {
    for (const auto& p : e.problems()) {
        if (p.find(needle) != std::string::npos) return true;
    }
    return false;
}

std::size_t count(const Trace& t, EventKind k) {
    std::size_t n = 0;
    for (const auto& e : t.events()) n += e.kind == k;
    return n;
}

TEST(Config, MinimalScenarioParses) {
    auto c = parse_config(base());
    EXPECT_EQ(c.n, 4u);
    EXPECT_EQ(c.clients.size(), 1u);
    EXPECT_TRUE(c.problems().empty());
    EXPECT_EQ(c.client_wait(), 3);  // recovery default: 3Δ
    EXPECT_EQ(c.u_pi(), 48);
}

TEST(Config, UnknownKeyIsRejected) {
    auto j = base();
    j["colour"] = "blue";
    try {
        (void)parse_config(j);
        FAIL() << "accepted an unknown key";
    } catch (const ConfigError& e) {
        EXPECT_TRUE(mentions(e, "colour"));
    }
}

TEST(Config, CorruptMajorityBeforeRMajIsRejected) {
    auto j = base();
    j["r_maj"] = 10;
    j["corruptions"] = nlohmann::json::parse(R"([{"validator": 0, "round": 5}, {"validator": 1, "round": 9}])");
    auto c = parse_config(j);
    EXPECT_FALSE(c.problems().empty());
    EXPECT_THROW(c.validate(), ConfigError);
    j["corruptions"][1]["round"] = 10;
    EXPECT_TRUE(parse_config(j).problems().empty());
}

TEST(Config, RecoveryNeedsOrderedRoundsAndHonestNewSet) {
    auto j = base();
    j["r_maj"] = 20;
    j["r_rec"] = 20;
    EXPECT_FALSE(parse_config(j).problems().empty());
    j["r_rec"] = 30;
    j["kill"] = {0};
    j["corruptions"] = nlohmann::json::parse(R"([{"validator": 1, "round": 20}, {"validator": 2, "round": 20}])");
    try {
        parse_config(j).validate();
        FAIL() << "V_new without an honest majority accepted";
    } catch (const ConfigError& e) {
        EXPECT_TRUE(mentions(e, "V_new"));
    }
    j["kill"] = {1, 2};
    EXPECT_TRUE(parse_config(j).problems().empty());
}

TEST(Config, FreezingHasNoRecovery) {
    auto j = base();
    j["gadget"] = "freezing";
    j["r_maj"] = 5;
    j["r_rec"] = 9;
    EXPECT_FALSE(parse_config(j).problems().empty());
}

TEST(Config, TxStreamExpands) {
    auto j = base();
    j["tx_stream"] = nlohmann::json::parse(R"({"every": 10, "from": 5, "until": 25, "rotate": true})");
    auto c = parse_config(j);
    ASSERT_EQ(c.txs.size(), 4u);
    EXPECT_EQ(c.txs[1].id, 2u);
    EXPECT_EQ(c.txs[3].round, 25);
    EXPECT_EQ(c.txs[3].to, (std::vector<std::uint32_t>{2}));
}

TEST(Config, MalformedValuesAreConfigErrors) {
    auto j = base();
    j["n"] = "four";
    EXPECT_THROW(parse_config(j), ConfigError);
    j = base();
    j["adversary"] = {{"strategy", "chaos"}};
    EXPECT_FALSE(parse_config(j).problems().empty());
    j = base();
    j["txs"].push_back({{"id", 1}, {"round", 3}});
    EXPECT_FALSE(parse_config(j).problems().empty());
}

TEST(Simulator, HonestRunConfirmsWithoutRejections) {
    auto c = parse_config(base());
    c.horizon = 100;
    Trace t = run(c);
    EXPECT_GT(count(t, EventKind::confirm), 0u);
    EXPECT_EQ(count(t, EventKind::witness_reject), 0u);
    for (const auto& v : check::check_all(t)) EXPECT_TRUE(v.pass) << v.name << ": " << v.evidence;
}

TEST(Simulator, RunsAreByteIdentical) {
    auto c = parse_config(base());
    c.n = 5;
    c.horizon = 120;
    c.r_maj = 30;
    c.r_rec = 60;
    c.kill = {3, 4};
    c.corruptions = {{2, 30}, {3, 30}, {4, 30}};
    c.adversary.strategy = "eve_confuser";
    c.clients = {{0, kNever}, {0, kNever}};
    EXPECT_EQ(run(c).to_jsonl(), run(c).to_jsonl());
}

TEST(Simulator, HeaderCarriesTheScenario) {
    auto c = parse_config(base());
    c.r_maj = 40;
    Trace t = run(c);
    EXPECT_EQ(t.header.n, 4u);
    EXPECT_EQ(t.header.n_clients, 1u);
    EXPECT_EQ(t.header.u_pi, c.u_pi());
    EXPECT_EQ(t.header.client_wait, c.client_wait());
    EXPECT_EQ(t.header.r_maj, 40);
    EXPECT_EQ(t.header.seed, c.seed);
}

TEST(Simulator, InvalidScenarioDoesNotRun) {
    auto c = parse_config(base());
    c.corruptions = {{0, 0}, {1, 0}};
    EXPECT_THROW((void)run(c), ConfigError);
}

TEST(Suite, ExpectationSemantics) {
    suite::Outcome o;
    o.seeds = 3;
    EXPECT_TRUE(suite::meets(o, {}));
    o.failures["safety"] = 3;
    EXPECT_FALSE(suite::meets(o, {}));
    EXPECT_TRUE(suite::meets(o, {false, {"safety"}}));
    EXPECT_FALSE(suite::meets(o, {false, {"safety", "liveness"}}));
    o.failures["safety"] = 2;  // must fail on every seed
    EXPECT_FALSE(suite::meets(o, {false, {"safety"}}));
    o.failures["safety"] = 3;
    o.failures["liveness"] = 1;  // unlisted failure
    EXPECT_FALSE(suite::meets(o, {false, {"safety"}}));
    suite::Outcome aborted;
    aborted.seeds = 1;
    aborted.aborted = 1;
    EXPECT_FALSE(suite::meets(aborted, {}));
}

TEST(Suite, CorpusLoadsAndCoversTheAttacks) {
    auto corpus = suite::load_corpus(GADGET_SCENARIO_DIR);
    EXPECT_GE(corpus.size(), 30u);
    std::set<std::string> strategies;
    bool negative = false;
    for (const auto& s : corpus) {
        strategies.insert(s.cfg.adversary.strategy);
        negative |= !s.cfg.expect.pass;
        EXPECT_TRUE(s.cfg.problems().empty()) << s.path;
    }
    EXPECT_TRUE(strategies.contains("double_spend"));
    EXPECT_TRUE(strategies.contains("eve_confuser"));
    EXPECT_TRUE(strategies.contains("bookmark_liar"));
    EXPECT_TRUE(negative);
}

TEST(Suite, TwoSeedsOfTheCorpusMeetExpectations) {
    auto report = suite::run_corpus(suite::load_corpus(GADGET_SCENARIO_DIR), 2);
    std::ostringstream os;
    suite::print_table(os, report);
    EXPECT_TRUE(report.ok()) << os.str();
}

TEST(Demos, StoriesEndAsAdvertised) {
    auto outcome = [](std::string_view name) {
        const auto* d = demo::find(name);
        EXPECT_NE(d, nullptr) << name;
        return check::check_all(run(demo::config_of(*d)));
    };
    auto verdict = [](const std::vector<check::Verdict>& vs, std::string_view n) {
        for (const auto& v : vs) {
            if (v.name == n) return v.pass;
        }
        return false;
    };
    auto eve = outcome("eve");
    for (const auto& v : eve) EXPECT_TRUE(v.pass) << "eve " << v.name << ": " << v.evidence;
    EXPECT_FALSE(verdict(outcome("no-wait"), "safety"));
    EXPECT_TRUE(verdict(outcome("double-spend"), "safety"));
    EXPECT_EQ(demo::find("nope"), nullptr);
}

TEST(Demos, TimelineShowsTheFreeze) {
    std::ostringstream os;
    demo::run_demo(os, *demo::find("double-spend"));
    EXPECT_NE(os.str().find("freezes at"), std::string::npos) << os.str();
}

}  // namespace
}  // namespace gadget
