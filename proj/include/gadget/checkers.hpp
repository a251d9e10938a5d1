// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gadget/core.hpp"
#include "gadget/trace.hpp"

namespace gadget::check {

/// Outcome of one checker. A failing verdict names the first violation
/// found and the indices of the events that witness it.
struct Verdict {
    std::string name;
    bool pass = true;
    std::string evidence;
    std::vector<std::size_t> events;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct ManifestEntry {
    std::string_view checker;
    std::string_view property;
};

/// Checker name to the property it decides.
inline constexpr ManifestEntry kManifest[] = {
    {"safety", "confirmed ledgers of all clients are pairwise consistent at all rounds"},
    {"liveness", "a transaction held by every honest validator reaches every long-awake client within u, "
                 "outside the adversarial window [r_maj, r_rec + u_rec]"},
    {"follow_the_leader", "before r_rec every client's confirmed ledger is a prefix of every honest bookmark"},
    {"recovery", "honest validators agree on the new genesis, which extends every confirmed ledger and the "
                 "common prefix of honest bookmarks from before r_rec; those bookmarks are mutually consistent"},
    {"broadcast", "bookmark broadcast validity, agreement and single delivery, ending exactly at r_rec + u_BC"},
    {"certifiable_safety", "while honest validators hold a majority, every accepted witness ledger is consistent "
                           "with every honest finalized ledger"},
    {"delivery_bound", "a message held by an honest party at t reaches every honest party p by max(t, wake_p) + Δ"},
    {"monotonicity", "confirmed ledgers only grow; bookmarks and finalized ledgers only grow within an instance"},
};

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Facts derived from the trace
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

/// Corruption, kill and wake/sleep facts, read off the trace events.
struct Facts {
    const TraceHeader* h = nullptr;
    std::vector<Round> corrupt;  // per validator
    std::vector<Round> killed;   // per validator
    std::vector<Round> wake;     // per client
    std::vector<Round> sleep;    // per client

    explicit Facts(const Trace& t) : h(&t.header) {
        corrupt.assign(h->n, kNever);
        killed.assign(h->n, kNever);
        wake.assign(h->n_clients, kNever);
        sleep.assign(h->n_clients, kNever);
        for (const auto& e : t.events()) {
            if (!e.party) continue;
            auto i = e.party->index;
            switch (e.kind) {
                case EventKind::corrupt:
                    if (i < h->n) corrupt[i] = std::min(corrupt[i], e.round);
                    break;
                case EventKind::kill:
                    if (i < h->n) killed[i] = std::min(killed[i], e.round);
                    break;
                case EventKind::wake:
                    if (i < h->n_clients) wake[i] = std::min(wake[i], e.round);
                    break;
                case EventKind::sleep:
                    if (i < h->n_clients) sleep[i] = std::min(sleep[i], e.round);
                    break;
                default:
                    break;
            }
        }
    }

    [[nodiscard]] bool honest_alive(std::uint32_t v, Round r) const { return corrupt[v] > r && killed[v] > r; }
    [[nodiscard]] bool awake(std::uint32_t c, Round r) const { return wake[c] <= r && r < sleep[c]; }

    [[nodiscard]] std::size_t corrupted_at(Round r) const {
        return static_cast<std::size_t>(std::count_if(corrupt.begin(), corrupt.end(), [&](Round c) { return c <= r; }));
    }

    /// First round at which at least half the original validators are
    /// corrupted, or kNever.
    [[nodiscard]] Round majority_lost() const {
        std::vector<Round> c = corrupt;
        std::sort(c.begin(), c.end());
        std::size_t need = (h->n + 1) / 2;
        if (need == 0 || need > c.size()) return kNever;
        return c[need - 1];
    }
};

namespace detail {

inline std::string show(const Ledger& l) {
    std::ostringstream os;
    os << l;
    return os.str();
}

inline std::string show(const Event& e) {
    std::ostringstream os;
    os << to_string(e.kind) << '@' << e.round;
    if (e.party) os << ' ' << to_string(*e.party);
    if (e.ledger) os << ' ' << *e.ledger;
    return os.str();
}

inline Verdict fail(std::string name, std::string evidence, std::vector<std::size_t> events = {}) {
    return Verdict{std::move(name), false, std::move(evidence), std::move(events)};
}

inline Verdict pass(std::string name, std::string note = {}) { return Verdict{std::move(name), true, std::move(note), {}}; }

/// Tracks a set of ledgers that must form a prefix chain. Returns the
/// index of a conflicting earlier ledger on violation.
class ChainTracker {
public:
    std::optional<std::size_t> add(const Ledger& l, std::size_t event) {
        if (!consistent(l, longest_)) return longest_event_;
        if (l.size() > longest_.size()) {
            longest_ = l;
            longest_event_ = event;
        }
        return std::nullopt;
    }
    [[nodiscard]] const Ledger& longest() const { return longest_; }

private:
    Ledger longest_;
    std::size_t longest_event_ = 0;
};

}  // namespace detail

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Checkers
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

/// Every pair of confirm events, across clients and rounds, is consistent.
inline Verdict check_safety(const Trace& t) {
    detail::ChainTracker chain;
    const auto& ev = t.events();
    std::size_t n = 0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (ev[i].kind != EventKind::confirm || !ev[i].ledger) continue;
        ++n;
        if (auto j = chain.add(*ev[i].ledger, i)) {
            return detail::fail("safety", "conflicting confirmations: " + detail::show(ev[*j]) + " vs " + detail::show(ev[i]),
                                {*j, i});
        }
    }
    return detail::pass("safety", std::to_string(n) + " confirmations, all consistent");
}

/// Worst observed internal latency: over transactions that every honest
/// validator held before r_maj and clients awake at that round, the gap to
/// the client's first accepted witness containing the transaction.
struct LatencyReport {
    Round worst = 0;
    std::size_t samples = 0;
};

namespace detail {

/// Per-transaction first receipt round at each validator.
inline std::map<TxId, std::vector<Round>> validator_receipts(const Trace& t) {
    std::map<TxId, std::vector<Round>> out;
    for (const auto& e : t.events()) {
        if (!e.tx || !e.party || !e.party->is_validator() || e.party->index >= t.header.n) continue;
        bool held = e.kind == EventKind::tx_input || e.kind == EventKind::deliver ||
                    (e.kind == EventKind::send && e.detail.empty());
        if (!held) continue;
        auto& v = out[*e.tx];
        if (v.empty()) v.assign(t.header.n, kNever);
        v[e.party->index] = std::min(v[e.party->index], e.round);
    }
    return out;
}

/// First round t at which every validator honest and alive at t holds the
/// transaction (requires at least one such validator), or kNever.
inline Round received_by_all(const Facts& f, const std::vector<Round>& recv) {
    std::set<Round> candidates(recv.begin(), recv.end());
    for (Round c : f.corrupt) candidates.insert(c);
    for (Round k : f.killed) candidates.insert(k);
    for (Round t : candidates) {
        if (t == kNever) break;
        bool any = false, all = true;
        for (std::uint32_t v = 0; v < recv.size(); ++v) {
            if (!f.honest_alive(v, t)) continue;
            any = true;
            if (recv[v] > t) {
                all = false;
                break;
            }
        }
        if (any && all) return t;
    }
    return kNever;
}

}  // namespace detail

inline LatencyReport measure_u_pi(const Trace& t) {
    Facts f(t);
    LatencyReport rep;
    Round end = t.header.r_maj.value_or(kNever);
    std::map<std::pair<std::uint32_t, TxId>, Round> first_accept;
    for (const auto& e : t.events()) {
        if (e.kind != EventKind::witness_accept || e.instance != 0 || !e.party || !e.party->is_client() || !e.ledger) continue;
        for (TxId tx : e.ledger->txs) first_accept.try_emplace({e.party->index, tx}, e.round);
    }
    for (const auto& [tx, recv] : detail::validator_receipts(t)) {
        Round T = detail::received_by_all(f, recv);
        if (T == kNever || T >= end) continue;
        for (std::uint32_t c = 0; c < t.header.n_clients; ++c) {
            if (!f.awake(c, T)) continue;
            auto it = first_accept.find({c, tx});
            if (it == first_accept.end()) continue;
            rep.worst = std::max(rep.worst, it->second - T);
            ++rep.samples;
        }
    }
    return rep;
}

/// Liveness obligations with latency u, split by window. Window 1 is
/// [0, r_maj) (the whole run without r_maj); window 2 is (r_rec + u_rec, R].
///
/// A transaction becomes due at round r_due, the first r > T + u with every
/// validator honest and alive at r holding it before r - u, where T is the
/// first round at which every validator honest and alive at T holds it. A
/// client awake at r owes it from max(r_due, wake + u + 1) on.
struct LivenessReport {
    Verdict verdict;
    std::vector<std::pair<Round, Round>> windows;
    std::vector<std::set<TxId>> due;  // per window, transactions with at least one obligation
    std::size_t obligations = 0;
};

/// `first_window_only` restricts the check to [0, r_maj).
inline LivenessReport liveness_report(const Trace& t, Round u, bool first_window_only = false) {
    LivenessReport rep;
    Facts f(t);
    const auto& h = t.header;
    auto& windows = rep.windows;
    Round w1_end = h.r_maj ? *h.r_maj - 1 : h.horizon;
    if (w1_end >= 0) windows.emplace_back(0, std::min(w1_end, h.horizon));
    if (h.r_rec && !first_window_only) {
        Round a = *h.r_rec + h.u_rec() + 1;
        if (a <= h.horizon) windows.emplace_back(a, h.horizon);
    }

    std::map<std::pair<std::uint32_t, TxId>, Round> confirmed_at;
    for (const auto& e : t.events()) {
        if (e.kind != EventKind::confirm || !e.party || !e.ledger) continue;
        for (TxId tx : e.ledger->txs) confirmed_at.try_emplace({e.party->index, tx}, e.round);
    }

    rep.due.resize(windows.size());
    std::size_t& obligations = rep.obligations;
    for (const auto& [tx, recv] : detail::validator_receipts(t)) {
        Round T = detail::received_by_all(f, recv);
        if (T == kNever) continue;
        // Smallest r satisfying both receipt conditions; both are monotone in r.
        Round r_due = T + u + 1;
        for (; r_due <= h.horizon; ++r_due) {
            bool ok = true;
            for (std::uint32_t v = 0; v < recv.size() && ok; ++v) {
                if (f.honest_alive(v, r_due) && recv[v] >= r_due - u) ok = false;
            }
            if (ok) break;
        }
        if (r_due > h.horizon) continue;
        for (std::uint32_t c = 0; c < h.n_clients; ++c) {
            if (f.wake[c] == kNever) continue;
            Round from = std::max(r_due, f.wake[c] + u + 1);
            Round conf = kNever;
            if (auto it = confirmed_at.find({c, tx}); it != confirmed_at.end()) conf = it->second;
            for (std::size_t w = 0; w < windows.size(); ++w) {
                auto [a, b] = windows[w];
                Round r = std::max(from, a);
                Round last = std::min(b, f.sleep[c] == kNever ? h.horizon : f.sleep[c] - 1);
                if (r > last) continue;
                ++obligations;
                rep.due[w].insert(tx);
                if (conf > r) {
                    std::ostringstream os;
                    os << "tx " << tx << " held by all honest validators at round " << T << " but not in c" << c
                       << "'s confirmed ledger at round " << r << " (u=" << u << ", confirmed "
                       << (conf == kNever ? std::string("never") : "at " + std::to_string(conf)) << ")";
                    rep.verdict = detail::fail("liveness", os.str());
                    return rep;
                }
            }
        }
    }
    rep.verdict = detail::pass("liveness", std::to_string(obligations) + " obligations met with u=" + std::to_string(u));
    return rep;
}

inline Verdict check_liveness(const Trace& t, Round u) { return liveness_report(t, u).verdict; }

inline Verdict check_liveness(const Trace& t) { return check_liveness(t, t.header.u()); }

/// Before r_rec: every client's confirmed ledger is a prefix of every honest
/// validator's bookmark, at the end of every round.
inline Verdict check_follow_the_leader(const Trace& t) {
    const auto& h = t.header;
    if (h.gadget != "recovery") return detail::pass("follow_the_leader", "not applicable: no bookmarks");
    Facts f(t);
    Round end = h.r_rec.value_or(h.horizon + 1);
    std::vector<Ledger> bookmark(h.n);
    std::vector<std::size_t> bookmark_ev(h.n, 0);
    std::map<std::uint32_t, std::pair<Ledger, std::size_t>> confirmed;
    const auto& ev = t.events();
    std::size_t checks = 0;
    std::size_t i = 0;
    while (i < ev.size()) {
        Round r = ev[i].round;
        if (r >= end) break;
        bool changed = false;
        for (; i < ev.size() && ev[i].round == r; ++i) {
            const Event& e = ev[i];
            if (!e.party || !e.ledger || e.instance != 0) continue;
            if (e.kind == EventKind::bookmark && e.party->is_validator()) {
                bookmark[e.party->index] = *e.ledger;
                bookmark_ev[e.party->index] = i;
                changed = true;
            } else if (e.kind == EventKind::confirm && e.party->is_client()) {
                confirmed[e.party->index] = {*e.ledger, i};
                changed = true;
            }
        }
        if (!changed) continue;
        for (const auto& [c, lc] : confirmed) {
            for (std::uint32_t v = 0; v < h.n; ++v) {
                if (!f.honest_alive(v, r)) continue;
                ++checks;
                if (!is_prefix(lc.first, bookmark[v])) {
                    std::ostringstream os;
                    os << "round " << r << ": c" << c << " confirmed " << lc.first << " but v" << v << " bookmarked "
                       << bookmark[v];
                    return detail::fail("follow_the_leader", os.str(), {lc.second, bookmark_ev[v]});
                }
            }
        }
    }
    return detail::pass("follow_the_leader", std::to_string(checks) + " client/validator checks");
}

/// Genesis agreement and dominance, plus bookmark consistency before r_rec.
inline Verdict check_recovery(const Trace& t) {
    const auto& h = t.header;
    if (!h.r_rec) return detail::pass("recovery", "not applicable: no recovery");
    Facts f(t);
    Round r_rec = *h.r_rec;
    Round done = r_rec + h.u_bc;
    const auto& ev = t.events();

    std::optional<Ledger> l_rec;
    std::size_t l_rec_ev = 0;
    detail::ChainTracker bookmarks;
    std::vector<Ledger> ack_before(h.n);
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const Event& e = ev[i];
        if (!e.party || !e.ledger) continue;
        if (e.kind == EventKind::new_genesis) {
            if (!l_rec) {
                l_rec = *e.ledger;
                l_rec_ev = i;
            } else if (*l_rec != *e.ledger) {
                return detail::fail("recovery", "validators disagree on the new genesis: " + detail::show(ev[l_rec_ev]) +
                                                    " vs " + detail::show(e), {l_rec_ev, i});
            }
        } else if (e.kind == EventKind::bookmark && e.round < r_rec && e.instance == 0) {
            if (auto j = bookmarks.add(*e.ledger, i)) {
                return detail::fail("recovery", "inconsistent bookmarks before r_rec: " + detail::show(ev[*j]) + " vs " +
                                                    detail::show(e), {*j, i});
            }
            ack_before[e.party->index] = *e.ledger;
        }
    }
    if (done > h.horizon) return detail::pass("recovery", "horizon ends before the new genesis");
    if (!l_rec) return detail::fail("recovery", "no honest validator computed a new genesis");

    for (std::size_t i = 0; i < ev.size(); ++i) {
        const Event& e = ev[i];
        if (e.kind != EventKind::confirm || e.round >= r_rec || !e.ledger) continue;
        if (!is_prefix(*e.ledger, *l_rec)) {
            return detail::fail("recovery", "confirmed " + detail::show(e) + " is not a prefix of the new genesis " +
                                                detail::show(*l_rec), {i, l_rec_ev});
        }
    }

    std::optional<Ledger> cp;
    for (std::uint32_t v : h.v_new) {
        if (v >= h.n || !f.honest_alive(v, done)) continue;
        cp = cp ? common_prefix(*cp, ack_before[v]) : ack_before[v];
    }
    if (cp && !is_prefix(*cp, *l_rec)) {
        return detail::fail("recovery", "new genesis " + detail::show(*l_rec) +
                                            " does not extend the common prefix of honest bookmarks " + detail::show(*cp),
                            {l_rec_ev});
    }
    return detail::pass("recovery", "new genesis " + detail::show(*l_rec));
}

/// Validity, agreement, at most one delivery per sender, exact timing.
inline Verdict check_broadcast(const Trace& t) {
    const auto& h = t.header;
    if (!h.r_rec) return detail::pass("broadcast", "not applicable: no recovery");
    Round done = *h.r_rec + h.u_bc;
    if (done > h.horizon) return detail::pass("broadcast", "horizon ends before delivery");
    Facts f(t);
    std::size_t n_new = h.v_new.size();
    if (h.u_bc != static_cast<Round>(n_new / 2 + 1) * h.delta) {
        return detail::fail("broadcast", "u_BC " + std::to_string(h.u_bc) + " differs from (floor(n'/2)+1)*delta");
    }
    std::set<std::uint32_t> honest;
    for (std::uint32_t v : h.v_new) {
        if (v < h.n && f.honest_alive(v, done)) honest.insert(v);
    }
    std::map<std::uint32_t, Ledger> sent;
    std::map<std::uint32_t, std::map<std::uint32_t, std::optional<Ledger>>> got;
    const auto& ev = t.events();
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const Event& e = ev[i];
        if (!e.party || !e.party->is_validator()) continue;
        if (e.kind == EventKind::ds_broadcast && e.ledger) sent[e.party->index] = *e.ledger;
        if (e.kind != EventKind::ds_deliver || !e.peer) continue;
        if (!honest.contains(e.party->index)) continue;
        if (e.round != done) {
            return detail::fail("broadcast", "delivery at round " + std::to_string(e.round) + " instead of " +
                                                 std::to_string(done), {i});
        }
        auto& m = got[e.party->index];
        if (m.contains(e.peer->index)) {
            return detail::fail("broadcast", to_string(*e.party) + " delivered twice for " + to_string(*e.peer), {i});
        }
        m[e.peer->index] = e.ledger;
    }
    for (std::uint32_t relay : honest) {
        auto it = got.find(relay);
        if (it == got.end() || it->second.size() != n_new) {
            return detail::fail("broadcast", "v" + std::to_string(relay) + " did not deliver for every sender");
        }
        for (std::uint32_t s : honest) {
            auto sv = sent.find(s);
            if (sv == sent.end()) return detail::fail("broadcast", "honest v" + std::to_string(s) + " never broadcast");
            const auto& d = it->second[s];
            if (!d || *d != sv->second) {
                return detail::fail("broadcast", "validity: v" + std::to_string(relay) + " delivered " +
                                                     (d ? detail::show(*d) : std::string("bottom")) + " for honest v" +
                                                     std::to_string(s) + " who sent " + detail::show(sv->second));
            }
        }
    }
    const std::map<std::uint32_t, std::optional<Ledger>>* ref = nullptr;
    for (const auto& [relay, m] : got) {
        if (!ref) {
            ref = &m;
        } else if (m != *ref) {
            return detail::fail("broadcast", "agreement: honest relays delivered different maps");
        }
    }
    return detail::pass("broadcast", std::to_string(honest.size()) + " honest relays agree");
}

/// Accepted witness ledgers against honest finalized ledgers, per instance,
/// within that instance's honest-majority window.
inline Verdict check_certifiable_safety(const Trace& t) {
    Facts f(t);
    Round scope0 = f.majority_lost();
    std::map<int, std::map<Ledger, std::size_t>> accepted, finalized;
    const auto& ev = t.events();
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const Event& e = ev[i];
        if (!e.ledger || e.instance < 0) continue;
        if (e.instance == 0 && e.round >= scope0) continue;
        if (e.kind == EventKind::witness_accept) accepted[e.instance].try_emplace(*e.ledger, i);
        if (e.kind == EventKind::finalize) finalized[e.instance].try_emplace(*e.ledger, i);
    }
    std::size_t pairs = 0;
    for (const auto& [inst, fin] : finalized) {
        for (auto a = fin.begin(); a != fin.end(); ++a) {
            for (auto b = std::next(a); b != fin.end(); ++b) {
                if (!consistent(a->first, b->first)) {
                    return detail::fail("certifiable_safety", "honest finalized ledgers conflict: " + detail::show(ev[a->second]) +
                                                                  " vs " + detail::show(ev[b->second]), {a->second, b->second});
                }
            }
        }
        for (const auto& [l, i] : accepted[inst]) {
            for (const auto& [g, j] : fin) {
                ++pairs;
                if (!consistent(l, g)) {
                    return detail::fail("certifiable_safety", "accepted witness " + detail::show(ev[i]) +
                                                                  " conflicts with honest " + detail::show(ev[j]), {i, j});
                }
            }
        }
    }
    return detail::pass("certifiable_safety", std::to_string(pairs) + " witness/finalized pairs consistent");
}

/// Network bound: held by an honest party at t implies delivered to every
/// honest party p by max(t, wake_p) + Δ.
inline Verdict check_delivery_bound(const Trace& t) {
    Facts f(t);
    const auto& h = t.header;
    std::size_t parties = h.n + h.n_clients;
    auto slot = [&](PartyId p) { return p.is_validator() ? p.index : h.n + p.index; };
    std::unordered_map<Digest, std::vector<Round>> held;
    std::unordered_map<Digest, std::pair<Round, std::size_t>> first;
    const auto& ev = t.events();
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const Event& e = ev[i];
        if (!e.party || !e.msg) continue;
        bool holds = e.kind == EventKind::deliver || (e.kind == EventKind::send && e.detail.empty());
        if (!holds) continue;
        auto s = slot(*e.party);
        if (s >= parties) continue;
        auto& row = held[e.msg];
        if (row.empty()) row.assign(parties, kNever);
        row[s] = std::min(row[s], e.round);
        first.try_emplace(e.msg, e.round, i);
    }
    std::size_t checks = 0;
    for (const auto& [d, row] : held) {
        auto [t0, i0] = first.at(d);
        for (std::size_t s = 0; s < parties; ++s) {
            Round deadline;
            if (s < h.n) {
                deadline = t0 + h.delta;
                auto v = static_cast<std::uint32_t>(s);
                if (!f.honest_alive(v, deadline)) continue;
            } else {
                auto c = static_cast<std::uint32_t>(s - h.n);
                if (f.wake[c] == kNever) continue;
                deadline = std::max(t0, f.wake[c]) + h.delta;
                if (!f.awake(c, deadline)) continue;
            }
            if (deadline > h.horizon) continue;
            ++checks;
            if (row[s] > deadline) {
                std::ostringstream os;
                os << "message " << hex_digest(d) << " first held at round " << t0 << " reached "
                   << (s < h.n ? "v" + std::to_string(s) : "c" + std::to_string(s - h.n)) << " "
                   << (row[s] == kNever ? std::string("never") : "at round " + std::to_string(row[s])) << ", deadline "
                   << deadline;
                return detail::fail("delivery_bound", os.str(), {i0});
            }
        }
    }
    return detail::pass("delivery_bound", std::to_string(checks) + " deliveries within bound");
}

/// Confirmed ledgers extend earlier ones across the whole run; bookmarks
/// and finalized ledgers do so within one instance.
inline Verdict check_monotonicity(const Trace& t) {
    std::map<std::pair<PartyId, int>, std::size_t> last_bookmark, last_final;
    std::map<PartyId, std::size_t> last_confirm;
    const auto& ev = t.events();
    std::size_t steps = 0;
    auto step = [&](auto& map, auto key, std::size_t i) -> std::optional<std::size_t> {
        ++steps;
        auto it = map.find(key);
        if (it != map.end() && !is_prefix(*ev[it->second].ledger, *ev[i].ledger)) return it->second;
        map[key] = i;
        return std::nullopt;
    };
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const Event& e = ev[i];
        if (!e.party || !e.ledger) continue;
        std::optional<std::size_t> bad;
        if (e.kind == EventKind::confirm) bad = step(last_confirm, *e.party, i);
        if (e.kind == EventKind::bookmark) bad = step(last_bookmark, std::make_pair(*e.party, e.instance), i);
        if (e.kind == EventKind::finalize) bad = step(last_final, std::make_pair(*e.party, e.instance), i);
        if (bad) {
            return detail::fail("monotonicity", detail::show(e) + " does not extend " + detail::show(ev[*bad]), {*bad, i});
        }
    }
    return detail::pass("monotonicity", std::to_string(steps) + " ledger updates extend their predecessors");
}

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Suite entry points
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

inline std::optional<Verdict> run_checker(std::string_view name, const Trace& t) {
    if (name == "safety") return check_safety(t);
    if (name == "liveness") return check_liveness(t);
    if (name == "follow_the_leader") return check_follow_the_leader(t);
    if (name == "recovery") return check_recovery(t);
    if (name == "broadcast") return check_broadcast(t);
    if (name == "certifiable_safety") return check_certifiable_safety(t);
    if (name == "delivery_bound") return check_delivery_bound(t);
    if (name == "monotonicity") return check_monotonicity(t);
    return std::nullopt;
}

inline std::vector<Verdict> check_all(const Trace& t) {
    std::vector<Verdict> out;
    for (const auto& m : kManifest) out.push_back(*run_checker(m.checker, t));
    return out;
}

}  // namespace gadget::check
