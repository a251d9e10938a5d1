// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "gadget/checkers.hpp"
#include "gadget/config.hpp"
#include "gadget/simulator.hpp"

namespace gadget::demo {

struct Demo {
    std::string_view name;
    std::string_view blurb;
    std::string_view config;  // scenario JSON
};

inline constexpr Demo kDemos[] = {
    {"eve",
     "Eve holds a validator majority after round 30 and tries to split Alice (c0) from Bob (c1). "
     "Alice confirms the honest ledger first, so Bob's forged fork loses; recovery at round 60 "
     "builds a new genesis that extends what Alice confirmed.",
     R"({"name": "demo_eve", "n": 5, "delta": 2, "horizon": 260,
         "r_maj": 30, "r_rec": 60, "kill": [3, 4],
         "corruptions": [{"validator": 2, "round": 30}, {"validator": 3, "round": 30}, {"validator": 4, "round": 30}],
         "clients": [{"wake": 0}, {"wake": 0}],
         "txs": [{"id": 1, "round": 2}, {"id": 2, "round": 14}, {"id": 3, "round": 40}, {"id": 4, "round": 150}],
         "adversary": {"strategy": "eve_confuser"}})"},
    {"no-wait",
     "The freezing gadget with the client delay switched off. A majority adversary shows one fork to "
     "the even clients and another to the odd ones; each side confirms at once and safety breaks.",
     R"({"name": "demo_no_wait", "n": 4, "delta": 2, "horizon": 80, "gadget": "freezing",
         "client_wait_deltas": 0, "r_maj": 20,
         "corruptions": [{"validator": 1, "round": 20}, {"validator": 2, "round": 20}, {"validator": 3, "round": 20}],
         "n_clients": 2, "txs": [{"id": 1, "round": 1}],
         "adversary": {"strategy": "double_spend", "params": {"offset_b": 1}}})"},
    {"double-spend",
     "Same attack with the Δ delay in place. Each side hears of the other fork through gossip before its "
     "timer fires, so both freeze and nothing conflicting is confirmed.",
     R"({"name": "demo_double_spend", "n": 4, "delta": 2, "horizon": 80, "gadget": "freezing",
         "r_maj": 20,
         "corruptions": [{"validator": 1, "round": 20}, {"validator": 2, "round": 20}, {"validator": 3, "round": 20}],
         "n_clients": 2, "txs": [{"id": 1, "round": 1}],
         "adversary": {"strategy": "double_spend", "params": {"offset_b": 1}}})"},
};

inline const Demo* find(std::string_view name) {
    for (const auto& d : kDemos) {
        if (d.name == name) return &d;
    }
    return nullptr;
}

inline ScenarioConfig config_of(const Demo& d) { return parse_config(nlohmann::json::parse(d.config)); }

/// One line per event a reader follows: environment steps, client
/// confirmations and freezes, forged deliveries, recovery milestones.
inline std::optional<std::string> annotate(const Event& e) {
    auto who = [&] { return e.party ? to_string(*e.party) : std::string("env"); };
    auto led = [&] {
        std::ostringstream os;
        if (e.ledger) os << *e.ledger;
        return os.str();
    };
    switch (e.kind) {
        case EventKind::corrupt: return who() + " is corrupted";
        case EventKind::kill: return who() + " is killed";
        case EventKind::recover: return who() + " receives the recover signal";
        case EventKind::inject: return "adversary injects a " + e.msg_kind + (e.detail.empty() ? "" : " (" + e.detail + ")");
        case EventKind::confirm:
            if (!e.party || !e.party->is_client()) return std::nullopt;
            return who() + " confirms " + led() + (e.detail.empty() ? "" : " [" + e.detail + "]");
        case EventKind::freeze:
            if (!e.party || !e.party->is_client()) return std::nullopt;
            return who() + " freezes at " + led() + (e.detail.empty() ? "" : " [" + e.detail + "]");
        case EventKind::witness_accept:
            if (!e.party || !e.party->is_client() || e.detail == "own") return std::nullopt;
            return who() + " accepts a witness for " + led();
        case EventKind::new_genesis: return who() + " computes new genesis " + led();
        case EventKind::restart: return who() + " restarts from " + led();
        default: return std::nullopt;
    }
}

inline void print_timeline(std::ostream& os, const Trace& t) {
    std::map<PartyId, Ledger> last_accept;
    for (const auto& e : t.events()) {
        if (e.kind == EventKind::witness_accept && e.party && e.ledger) {
            auto [it, fresh] = last_accept.try_emplace(*e.party, *e.ledger);
            if (!fresh && it->second == *e.ledger) continue;
            it->second = *e.ledger;
        }
        if (auto line = annotate(e)) os << "  r" << e.round << "\t" << *line << '\n';
    }
}

/// Runs a demo and prints its story, timeline and verdicts.
inline void run_demo(std::ostream& os, const Demo& d) {
    ScenarioConfig cfg = config_of(d);
    cfg.validate();
    Trace t = run(cfg);
    os << d.name << ": " << d.blurb << "\n\n";
    print_timeline(os, t);
    os << '\n';
    for (const auto& v : check::check_all(t)) {
        os << (v.pass ? "  pass  " : "  FAIL  ") << v.name << ": " << v.evidence << '\n';
    }
}

}  // namespace gadget::demo
