// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gadget/core.hpp"

namespace gadget {

enum class EventKind : std::uint8_t {
    send,
    deliver,
    inject,
    corrupt,
    kill,
    recover,
    wake,
    sleep,
    tx_input,
    witness_accept,
    witness_reject,
    finalize,
    confirm,
    bookmark,
    freeze,
    ds_broadcast,
    ds_deliver,
    new_genesis,
    genesis_vote,
    restart,
};

inline constexpr std::string_view kEventKindNames[] = {
    "send",           "deliver",        "inject",     "corrupt", "kill",     "recover",      "wake",
    "sleep",          "tx_input",       "witness_accept", "witness_reject", "finalize", "confirm", "bookmark",
    "freeze",         "ds_broadcast",   "ds_deliver", "new_genesis", "genesis_vote", "restart",
};

inline std::string_view to_string(EventKind k) { return kEventKindNames[static_cast<std::size_t>(k)]; }

inline std::optional<EventKind> parse_event_kind(std::string_view s) {
    for (std::size_t i = 0; i < std::size(kEventKindNames); ++i) {
        if (kEventKindNames[i] == s) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

/// One trace record. Optional fields are omitted from the serialized line.
struct Event {
    Round round = 0;
    EventKind kind = EventKind::send;
    std::optional<PartyId> party;  // none: environment or adversary
    std::optional<Ledger> ledger;
    Digest msg = 0;
    std::string msg_kind;
    std::optional<TxId> tx;
    std::optional<PartyId> peer;
    int instance = -1;
    std::string detail;

    friend bool operator==(const Event&, const Event&) = default;
};

/// Scenario parameters the checkers need; first line of a trace file.
struct TraceHeader {
    std::string name;
    std::string gadget = "recovery";
    std::string internal = "simple_sync";
    std::uint32_t n = 0;
    std::uint32_t n_clients = 0;
    Round delta = 1;
    Round horizon = 0;
    Round u_pi = 0;
    Round validator_wait = 0;
    Round client_wait = 0;
    std::optional<Round> r_maj;
    std::optional<Round> r_rec;
    Round u_bc = 0;
    std::vector<std::uint32_t> v_new;
    std::uint64_t seed = 0;

    [[nodiscard]] Round u() const { return u_pi + client_wait; }
    /// u_Π + u_BC + 4Δ
    [[nodiscard]] Round u_rec() const { return u_pi + u_bc + 4 * delta; }

    friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

class Trace {
public:
    TraceHeader header;

    void add(Event e) { events_.push_back(std::move(e)); }
    [[nodiscard]] const std::vector<Event>& events() const { return events_; }
    [[nodiscard]] std::size_t size() const { return events_.size(); }

    void write_jsonl(std::ostream& os) const;
    [[nodiscard]] std::string to_jsonl() const {
        std::ostringstream os;
        write_jsonl(os);
        return os.str();
    }
    static Trace read_jsonl(std::istream& is);
    static Trace load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open trace " + path);
        return read_jsonl(in);
    }
    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write trace " + path);
        write_jsonl(out);
    }

private:
    std::vector<Event> events_;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson ledger_json(const Ledger& l) {
    ojson a = ojson::array();
    for (TxId t : l.txs) a.push_back(t);
    return a;
}

inline Ledger ledger_from(const nlohmann::json& a) {
    Ledger l;
    for (const auto& t : a) l.txs.push_back(t.get<TxId>());
    return l;
}

inline PartyId party_from(const nlohmann::json& j) {
    auto p = parse_party(j.get<std::string>());
    if (!p) throw std::runtime_error("bad party id in trace: " + j.dump());
    return *p;
}

}  // namespace detail

inline void Trace::write_jsonl(std::ostream& os) const {
    using detail::ojson;
    ojson h;
    h["kind"] = "scenario";
    h["name"] = header.name;
    h["gadget"] = header.gadget;
    h["internal"] = header.internal;
    h["n"] = header.n;
    h["n_clients"] = header.n_clients;
    h["delta"] = header.delta;
    h["horizon"] = header.horizon;
    h["u_pi"] = header.u_pi;
    h["validator_wait"] = header.validator_wait;
    h["client_wait"] = header.client_wait;
    h["r_maj"] = header.r_maj ? ojson(*header.r_maj) : ojson(nullptr);
    h["r_rec"] = header.r_rec ? ojson(*header.r_rec) : ojson(nullptr);
    h["u_bc"] = header.u_bc;
    h["v_new"] = header.v_new;
    h["seed"] = header.seed;
    os << h.dump() << '\n';
    for (const auto& e : events_) {
        ojson j;
        j["round"] = e.round;
        j["kind"] = std::string(to_string(e.kind));
        if (e.party) j["party"] = to_string(*e.party);
        if (e.instance >= 0) j["instance"] = e.instance;
        if (e.msg) j["msg"] = hex_digest(e.msg);
        if (!e.msg_kind.empty()) j["msg_kind"] = e.msg_kind;
        if (e.tx) j["tx"] = *e.tx;
        if (e.peer) j["peer"] = to_string(*e.peer);
        if (e.ledger) j["ledger"] = detail::ledger_json(*e.ledger);
        if (!e.detail.empty()) j["detail"] = e.detail;
        os << j.dump() << '\n';
    }
}

inline Trace Trace::read_jsonl(std::istream& is) {
    Trace t;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "scenario") {
            auto& h = t.header;
            h.name = j.value("name", "");
            h.gadget = j.value("gadget", "recovery");
            h.internal = j.value("internal", "simple_sync");
            h.n = j.at("n").get<std::uint32_t>();
            h.n_clients = j.value("n_clients", 0u);
            h.delta = j.at("delta").get<Round>();
            h.horizon = j.at("horizon").get<Round>();
            h.u_pi = j.at("u_pi").get<Round>();
            h.validator_wait = j.at("validator_wait").get<Round>();
            h.client_wait = j.at("client_wait").get<Round>();
            if (!j.at("r_maj").is_null()) h.r_maj = j["r_maj"].get<Round>();
            if (!j.at("r_rec").is_null()) h.r_rec = j["r_rec"].get<Round>();
            h.u_bc = j.at("u_bc").get<Round>();
            h.v_new = j.at("v_new").get<std::vector<std::uint32_t>>();
            h.seed = j.value("seed", std::uint64_t{0});
            have_header = true;
            continue;
        }
        Event e;
        auto k = parse_event_kind(kind);
        if (!k) throw std::runtime_error("unknown trace event kind: " + kind);
        e.kind = *k;
        e.round = j.at("round").get<Round>();
        if (j.contains("party")) e.party = detail::party_from(j["party"]);
        if (j.contains("instance")) e.instance = j["instance"].get<int>();
        if (j.contains("msg")) e.msg = std::stoull(j["msg"].get<std::string>(), nullptr, 16);
        if (j.contains("msg_kind")) e.msg_kind = j["msg_kind"].get<std::string>();
        if (j.contains("tx")) e.tx = j["tx"].get<TxId>();
        if (j.contains("peer")) e.peer = detail::party_from(j["peer"]);
        if (j.contains("ledger")) e.ledger = detail::ledger_from(j["ledger"]);
        if (j.contains("detail")) e.detail = j["detail"].get<std::string>();
        t.add(std::move(e));
    }
    if (!have_header) throw std::runtime_error("trace has no scenario header line");
    return t;
}

}  // namespace gadget
