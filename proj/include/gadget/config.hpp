// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gadget/core.hpp"
#include "gadget/netsim.hpp"

namespace gadget {

/// Transaction ids at or above this value are reserved for the adversary.
inline constexpr TxId kAdversaryTxBase = 1'000'000;

enum class GadgetKind : std::uint8_t { recovery, freezing };
enum class InternalKind : std::uint8_t { simple_sync, scripted_oracle };

struct TxSpec {
    TxId id = 0;
    Round round = 0;
    std::vector<std::uint32_t> to;  // empty: every validator
};

struct CorruptionSpec {
    std::uint32_t validator = 0;
    Round round = 0;
};

struct AdversarySpec {
    std::string strategy = "passive";
    nlohmann::json params = nlohmann::json::object();
};

/// What the suite expects of a scenario: every checker passes, or exactly
/// the listed checkers fail (for every seed).
struct Expectation {
    bool pass = true;
    std::vector<std::string> failing;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

    [[nodiscard]] const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& ps) {
        std::string s = "invalid scenario:";
        for (const auto& p : ps) s += "\n  - " + p;
        return s;
    }
    std::vector<std::string> problems_;
};

/// Full description of one experiment.
struct ScenarioConfig {
    std::string name = "unnamed";
    std::uint32_t n = 4;
    Round delta = 1;
    Round horizon = 100;
    GadgetKind gadget = GadgetKind::recovery;
    InternalKind internal = InternalKind::simple_sync;
    std::optional<Round> u_pi_override;
    bool stall_after_maj = false;
    Round validator_wait_deltas = 1;
    std::optional<Round> client_wait_deltas;
    bool client_gossip = true;
    std::optional<Round> r_maj;
    std::optional<Round> r_rec;
    std::vector<std::uint32_t> kill;
    std::vector<CorruptionSpec> corruptions;
    std::vector<net::ClientWindow> clients;
    std::vector<TxSpec> txs;
    AdversarySpec adversary;
    std::uint64_t seed = 1;
    Expectation expect;

    /// Configured internal-protocol latency. SimpleSync defaults to
    /// 8Δ(n+2); the scripted oracle to 4Δ.
    [[nodiscard]] Round u_pi() const {
        if (u_pi_override) return *u_pi_override;
        return internal == InternalKind::simple_sync ? 8 * delta * (static_cast<Round>(n) + 2) : 4 * delta;
    }
    [[nodiscard]] Round validator_wait() const { return validator_wait_deltas * delta; }
    [[nodiscard]] Round client_wait() const {
        Round k = client_wait_deltas ? *client_wait_deltas : (gadget == GadgetKind::recovery ? 3 : 1);
        return k * delta;
    }

    [[nodiscard]] ValidatorSet v_new() const {
        std::vector<std::uint32_t> m;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (std::find(kill.begin(), kill.end(), v) == kill.end()) m.push_back(v);
        }
        return ValidatorSet(std::move(m));
    }
    /// (⌊n'/2⌋+1)Δ when recovery is configured, 0 otherwise.
    [[nodiscard]] Round u_bc() const {
        if (!r_rec) return 0;
        return static_cast<Round>(v_new().size() / 2 + 1) * delta;
    }

    [[nodiscard]] Round corrupt_round(std::uint32_t v) const {
        Round r = kNever;
        for (const auto& c : corruptions) {
            if (c.validator == v) r = std::min(r, c.round);
        }
        return r;
    }

    [[nodiscard]] std::size_t corrupted_at(Round r, const ValidatorSet* among = nullptr) const {
        std::size_t k = 0;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (among && !among->contains(v)) continue;
            if (corrupt_round(v) <= r) ++k;
        }
        return k;
    }

    [[nodiscard]] net::CorruptionSchedule schedule() const {
        net::CorruptionSchedule s;
        s.corrupt_round.resize(n);
        for (std::uint32_t v = 0; v < n; ++v) s.corrupt_round[v] = corrupt_round(v);
        s.kill_set = kill;
        s.r_maj = r_maj;
        s.r_rec = r_rec;
        return s;
    }

    [[nodiscard]] net::NetConfig net_config() const {
        return net::NetConfig{n, clients, delta, client_gossip, schedule()};
    }

    /// Every violated model constraint, one message each.
    [[nodiscard]] std::vector<std::string> problems() const;

    void validate() const {
        auto ps = problems();
        if (!ps.empty()) throw ConfigError(std::move(ps));
    }
};

inline std::vector<std::string> ScenarioConfig::problems() const {
    std::vector<std::string> ps;
    auto add = [&](std::string s) { ps.push_back(std::move(s)); };
    if (n < 1) add("n must be at least 1");
    if (delta < 1) add("delta must be at least 1");
    if (horizon < 0) add("horizon must be non-negative");
    if (validator_wait_deltas < 0) add("validator_wait_deltas must be non-negative");
    if (client_wait_deltas && *client_wait_deltas < 0) add("client_wait_deltas must be non-negative");
    if (internal == InternalKind::scripted_oracle && u_pi() < delta) add("scripted oracle needs u_pi >= delta");
    if (u_pi() < 0) add("u_pi must be non-negative");

    std::set<std::uint32_t> seen_corrupt;
    for (const auto& c : corruptions) {
        if (c.validator >= n) add("corruption of unknown validator v" + std::to_string(c.validator));
        if (c.round < 0) add("corruption round must be non-negative");
        if (!seen_corrupt.insert(c.validator).second) add("validator v" + std::to_string(c.validator) + " corrupted twice");
    }

    // Honest majority before r_maj (everywhere, when there is no r_maj).
    Round last_honest = r_maj ? *r_maj - 1 : horizon;
    if (r_rec) last_honest = std::min(last_honest, *r_rec - 1);
    if (last_honest >= 0 && 2 * corrupted_at(last_honest) >= n) {
        add("adversary must keep f(r) < 1/2 before r_maj (" + std::to_string(corrupted_at(last_honest)) + " of " +
            std::to_string(n) + " corrupted at round " + std::to_string(last_honest) + ")");
    }

    if (r_maj && *r_maj < 0) add("r_maj must be non-negative");
    if (r_rec) {
        if (!r_maj) add("r_rec requires r_maj");
        if (r_maj && !(*r_maj < *r_rec)) add("need r_maj < r_rec");
        if (*r_rec > horizon) add("need r_rec <= horizon");
        if (gadget == GadgetKind::freezing) add("the freezing gadget has no recovery; drop r_rec");
    }
    if (!kill.empty() && !r_rec) add("kill set requires r_rec");
    std::set<std::uint32_t> seen_kill;
    for (std::uint32_t v : kill) {
        if (v >= n) add("kill of unknown validator v" + std::to_string(v));
        if (!seen_kill.insert(v).second) add("validator v" + std::to_string(v) + " killed twice");
    }
    if (r_rec) {
        ValidatorSet vn = v_new();
        if (vn.size() == 0) {
            add("V_new is empty");
        } else {
            Round at = std::max(horizon, *r_rec);
            std::size_t bad = corrupted_at(at, &vn);
            if (2 * bad >= vn.size()) {
                add("V_new needs an honest majority from r_rec on (" + std::to_string(bad) + " of " +
                    std::to_string(vn.size()) + " corrupted)");
            }
        }
    }

    for (std::size_t i = 0; i < clients.size(); ++i) {
        const auto& c = clients[i];
        if (c.wake < 0) add("client c" + std::to_string(i) + " wakes before round 0");
        if (!(c.wake < c.sleep)) add("client c" + std::to_string(i) + " must wake before it sleeps");
    }

    std::set<TxId> ids;
    for (const auto& t : txs) {
        if (t.id >= kAdversaryTxBase) add("tx id " + std::to_string(t.id) + " is in the adversary range");
        if (!ids.insert(t.id).second) add("duplicate tx id " + std::to_string(t.id));
        if (t.round < 0) add("tx " + std::to_string(t.id) + " has a negative round");
        for (std::uint32_t v : t.to) {
            if (v >= n) add("tx " + std::to_string(t.id) + " sent to unknown validator v" + std::to_string(v));
        }
    }

    static const std::set<std::string> kStrategies = {"passive", "double_spend", "double_spend_equivocator",
                                                        "eve_confuser", "bookmark_liar"};
    if (!kStrategies.contains(adversary.strategy)) add("unknown adversary strategy '" + adversary.strategy + "'");
    return ps;
}

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// JSON
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

namespace detail {

inline std::vector<std::uint32_t> recipients_from(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() != "all") throw ConfigError({"tx 'to' must be \"all\" or a list of validators"});
        return {};
    }
    return j.get<std::vector<std::uint32_t>>();
}

}  // namespace detail

/// Parses a scenario. Structural errors (wrong types, unknown keys) raise
/// ConfigError; model constraints are checked by validate().
inline ScenarioConfig parse_config(const nlohmann::json& j) {
    static const std::set<std::string> kKeys = {
        "name",          "n",        "delta",      "horizon",      "gadget",  "internal", "validator_wait_deltas",
        "client_wait_deltas", "client_gossip", "r_maj", "r_rec", "kill", "corruptions", "clients", "n_clients",
        "txs",           "tx_stream", "adversary", "seed",         "expect",  "description"};
    if (!j.is_object()) throw ConfigError({"scenario must be a JSON object"});
    std::vector<std::string> unknown;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!kKeys.contains(it.key())) unknown.push_back("unknown key '" + it.key() + "'");
    }
    if (!unknown.empty()) throw ConfigError(std::move(unknown));

    ScenarioConfig c;
    try {
        c.name = j.value("name", c.name);
        c.n = j.at("n").get<std::uint32_t>();
        c.delta = j.value("delta", c.delta);
        c.horizon = j.at("horizon").get<Round>();
        std::string g = j.value("gadget", std::string("recovery"));
        if (g == "recovery") {
            c.gadget = GadgetKind::recovery;
        } else if (g == "freezing") {
            c.gadget = GadgetKind::freezing;
        } else {
            throw ConfigError({"gadget must be \"recovery\" or \"freezing\""});
        }
        if (j.contains("internal")) {
            const auto& in = j["internal"];
            std::string k = in.value("kind", std::string("simple_sync"));
            if (k == "simple_sync") {
                c.internal = InternalKind::simple_sync;
            } else if (k == "scripted_oracle") {
                c.internal = InternalKind::scripted_oracle;
            } else {
                throw ConfigError({"internal.kind must be \"simple_sync\" or \"scripted_oracle\""});
            }
            if (in.contains("u_pi")) c.u_pi_override = in["u_pi"].get<Round>();
            c.stall_after_maj = in.value("stall_after_maj", false);
        }
        c.validator_wait_deltas = j.value("validator_wait_deltas", c.validator_wait_deltas);
        if (j.contains("client_wait_deltas")) c.client_wait_deltas = j["client_wait_deltas"].get<Round>();
        c.client_gossip = j.value("client_gossip", true);
        if (j.contains("r_maj") && !j["r_maj"].is_null()) c.r_maj = j["r_maj"].get<Round>();
        if (j.contains("r_rec") && !j["r_rec"].is_null()) c.r_rec = j["r_rec"].get<Round>();
        c.kill = j.value("kill", std::vector<std::uint32_t>{});
        for (const auto& cj : j.value("corruptions", nlohmann::json::array())) {
            c.corruptions.push_back({cj.at("validator").get<std::uint32_t>(), cj.at("round").get<Round>()});
        }
        if (j.contains("clients")) {
            for (const auto& cj : j["clients"]) {
                net::ClientWindow w;
                w.wake = cj.value("wake", Round{0});
                if (cj.contains("sleep") && !cj["sleep"].is_null()) w.sleep = cj["sleep"].get<Round>();
                c.clients.push_back(w);
            }
        }
        if (j.contains("n_clients")) {
            auto k = j["n_clients"].get<std::uint32_t>();
            for (std::uint32_t i = 0; i < k; ++i) c.clients.push_back({});
        }
        TxId max_id = 0;
        for (const auto& tj : j.value("txs", nlohmann::json::array())) {
            TxSpec t;
            t.id = tj.at("id").get<TxId>();
            t.round = tj.at("round").get<Round>();
            if (tj.contains("to")) t.to = detail::recipients_from(tj["to"]);
            max_id = std::max(max_id, t.id);
            c.txs.push_back(std::move(t));
        }
        if (j.contains("tx_stream")) {
            const auto& s = j["tx_stream"];
            Round every = s.at("every").get<Round>();
            if (every < 1) throw ConfigError({"tx_stream.every must be at least 1"});
            Round from = s.value("from", Round{0});
            Round until = s.value("until", c.horizon);
            std::vector<std::uint32_t> to;
            if (s.contains("to")) to = detail::recipients_from(s["to"]);
            bool rotate = s.value("rotate", false);
            TxId id = s.value("first_id", max_id + 1);
            std::uint32_t k = 0;
            for (Round r = from; r <= until; r += every, ++k) {
                TxSpec t{id++, r, to};
                if (rotate && c.n > 0) t.to = {k % c.n};
                c.txs.push_back(std::move(t));
            }
        }
        if (j.contains("adversary")) {
            const auto& a = j["adversary"];
            c.adversary.strategy = a.value("strategy", std::string("passive"));
            if (a.contains("params")) c.adversary.params = a["params"];
        }
        c.seed = j.value("seed", c.seed);
        if (j.contains("expect")) {
            const auto& e = j["expect"];
            if (e.is_string() && e.get<std::string>() == "pass") {
                c.expect = {};
            } else if (e.is_object() && e.contains("fail")) {
                c.expect.pass = false;
                c.expect.failing = e["fail"].get<std::vector<std::string>>();
            } else {
                throw ConfigError({"expect must be \"pass\" or {\"fail\": [checkers]}"});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError({std::string("malformed scenario: ") + e.what()});
    }
    return c;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError({path + ": " + e.what()});
    }
    return parse_config(j);
}

}  // namespace gadget
