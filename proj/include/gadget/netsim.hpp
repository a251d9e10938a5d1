// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "gadget/core.hpp"
#include "gadget/crypto.hpp"
#include "gadget/messages.hpp"
#include "gadget/trace.hpp"

namespace gadget::net {

struct ClientWindow {
    Round wake = 0;
    Round sleep = kNever;  // first round the client is asleep again
};

/// Who is corrupted when, and the healing step at r_rec.
struct CorruptionSchedule {
    std::vector<Round> corrupt_round;  // per validator, kNever if never
    std::vector<std::uint32_t> kill_set;
    std::optional<Round> r_maj;
    std::optional<Round> r_rec;
};

struct NetConfig {
    std::uint32_t n = 0;
    std::vector<ClientWindow> clients;
    Round delta = 1;
    bool client_gossip = true;
    CorruptionSchedule corruption;
};

/// A message in flight. `due[p]` is the delivery round for global party
/// index p (validators first, then clients); kNever marks a non-recipient
/// or an already-delivered slot.
struct Envelope {
    std::uint64_t id = 0;
    std::optional<PartyId> sender;  // none: injected by the adversary without a party
    Payload payload;
    Round sent_round = 0;
    bool injected = false;
    std::vector<Round> due;
    std::size_t remaining = 0;
};

struct Delivery {
    PartyId recipient;
    Payload payload;
    std::uint64_t msg_id = 0;
};

/// Environment events fired at the start of a round.
struct RoundEvents {
    std::vector<std::uint32_t> corrupted;
    std::vector<std::uint32_t> killed;
    std::vector<PartyId> recover_to;
};

/// Round-synchronous network with Δ-bounded, adversary-adjustable delivery
/// and echo-on-first-receipt gossip.
///
/// Honest sends default to delivery at sent+Δ for every recipient; the
/// adversary may pull any (message, recipient) slot earlier, never later
/// and never into the send round. Every honest awake party re-broadcasts a
/// message the first time it receives it (clients only when client gossip
/// is on). A client that wakes up gets every message ever held by an
/// honest party re-sent to it, due at wake+Δ.
class Network {
public:
    Network(NetConfig cfg, Trace* trace) : cfg_(std::move(cfg)), trace_(trace) {
        if (cfg_.delta < 1) throw std::invalid_argument("delta must be at least 1");
        if (cfg_.corruption.corrupt_round.empty()) cfg_.corruption.corrupt_round.assign(cfg_.n, kNever);
        if (cfg_.corruption.corrupt_round.size() != cfg_.n) throw std::invalid_argument("corrupt_round size != n");
        killed_.assign(cfg_.n, false);
        held_.resize(party_count());
    }

    [[nodiscard]] std::size_t party_count() const { return cfg_.n + cfg_.clients.size(); }
    [[nodiscard]] Round delta() const { return cfg_.delta; }
    [[nodiscard]] const NetConfig& config() const { return cfg_; }

    [[nodiscard]] std::size_t index_of(PartyId p) const {
        return p.is_validator() ? p.index : cfg_.n + p.index;
    }
    [[nodiscard]] PartyId party_at(std::size_t i) const {
        return i < cfg_.n ? PartyId::validator(static_cast<std::uint32_t>(i))
                          : PartyId::client(static_cast<std::uint32_t>(i - cfg_.n));
    }

    [[nodiscard]] bool is_corrupted(PartyId p, Round r) const {
        return p.is_validator() && cfg_.corruption.corrupt_round.at(p.index) <= r;
    }
    [[nodiscard]] bool is_killed(PartyId p) const { return p.is_validator() && killed_.at(p.index); }
    [[nodiscard]] bool is_awake(PartyId p, Round r) const {
        if (p.is_validator()) return !killed_.at(p.index);
        const auto& w = cfg_.clients.at(p.index);
        return w.wake <= r && r < w.sleep;
    }
    [[nodiscard]] bool is_honest_awake(PartyId p, Round r) const { return is_awake(p, r) && !is_corrupted(p, r); }

    /// Fires corruptions, kills, wakes, sleeps and the recover announcement
    /// for round r. Must be called once per round, in increasing order.
    RoundEvents begin_round(Round r) {
        if (r != next_round_) throw std::logic_error("network rounds must advance one at a time");
        RoundEvents ev;
        const auto& cs = cfg_.corruption;
        for (std::uint32_t v = 0; v < cfg_.n; ++v) {
            if (cs.corrupt_round[v] == r && !killed_[v]) {
                ev.corrupted.push_back(v);
                emit({.round = r, .kind = EventKind::corrupt, .party = PartyId::validator(v)});
            }
        }
        bool recovering = cs.r_rec && *cs.r_rec == r;
        if (recovering) {
            for (std::uint32_t v : cs.kill_set) {
                if (v < cfg_.n && !killed_[v]) {
                    killed_[v] = true;
                    ev.killed.push_back(v);
                    emit({.round = r, .kind = EventKind::kill, .party = PartyId::validator(v)});
                }
            }
        }
        for (std::uint32_t c = 0; c < cfg_.clients.size(); ++c) {
            const auto& w = cfg_.clients[c];
            if (w.wake == r) {
                emit({.round = r, .kind = EventKind::wake, .party = PartyId::client(c)});
                send_backlog(PartyId::client(c), r);
                if (cs.r_rec && r > *cs.r_rec) ev.recover_to.push_back(PartyId::client(c));
            }
            if (w.sleep == r) emit({.round = r, .kind = EventKind::sleep, .party = PartyId::client(c)});
        }
        if (recovering) {
            std::vector<PartyId> all;
            for (std::size_t i = 0; i < party_count(); ++i) {
                PartyId p = party_at(i);
                if (is_awake(p, r)) all.push_back(p);
            }
            ev.recover_to.insert(ev.recover_to.begin(), all.begin(), all.end());
        }
        for (PartyId p : ev.recover_to) emit({.round = r, .kind = EventKind::recover, .party = p});
        began_ = r;
        ++next_round_;
        return ev;
    }

    /// Honest origin send to every party. Returns the message id.
    std::uint64_t broadcast(PartyId sender, Payload payload, Round r) {
        auto idx = index_of(sender);
        if (!is_awake(sender, r)) {
            Event e = message_event(r, EventKind::send, sender, payload);
            e.detail = "rejected: sender not awake";
            emit(std::move(e));
            return 0;
        }
        hold(idx, payload);
        emit(message_event(r, EventKind::send, sender, payload));
        return enqueue_all(sender, std::move(payload), r, r + cfg_.delta, idx);
    }

    /// Adversarial injection. Every signature carried by the payload must
    /// verify; otherwise the message is rejected. An empty recipient list
    /// addresses every party. Delivery is clamped to at least now+1, and to
    /// a sleeping client's wake round.
    bool inject(const KeyRegistry& keys, std::optional<PartyId> via, const std::vector<PartyId>& recipients,
                Payload payload, Round now, Round delivery_round) {
        Event e = message_event(now, EventKind::inject, via, payload);
        for (const auto& [sig, d] : payload->carried_signatures()) {
            if (!keys.verify_digest(sig.signer, d, sig)) {
                e.detail = "rejected: unverifiable signature by " + to_string(sig.signer);
                emit(std::move(e));
                return false;
            }
        }
        e.detail = recipients.empty() ? "to=all" : "to=" + std::to_string(recipients.size());
        emit(std::move(e));

        Envelope env;
        env.id = next_id_++;
        env.sender = via;
        env.payload = std::move(payload);
        env.sent_round = now;
        env.injected = true;
        env.due.assign(party_count(), kNever);
        auto place = [&](std::size_t i) {
            Round at = std::max(delivery_round, now + 1);
            PartyId p = party_at(i);
            if (p.is_client()) at = std::max(at, cfg_.clients[p.index].wake);
            env.due[i] = at;
            buckets_[at].push_back(env.id);
            ++env.remaining;
        };
        if (recipients.empty()) {
            for (std::size_t i = 0; i < party_count(); ++i) place(i);
        } else {
            for (PartyId p : recipients) {
                auto i = index_of(p);
                if (i < party_count() && env.due[i] == kNever) place(i);
            }
        }
        if (env.remaining) envelopes_.emplace(env.id, std::move(env));
        return true;
    }

    /// Pulls delivery of (msg, recipient) earlier. Accepted only within
    /// [sent+1, current due] and not before the current round.
    bool reschedule(std::uint64_t msg_id, PartyId recipient, Round new_round, Round now) {
        auto it = envelopes_.find(msg_id);
        if (it == envelopes_.end()) return false;
        auto& env = it->second;
        auto i = index_of(recipient);
        if (i >= env.due.size() || env.due[i] == kNever) return false;
        if (new_round < env.sent_round + 1 || new_round > env.due[i] || new_round < now) return false;
        if (new_round == env.due[i]) return true;
        env.due[i] = new_round;
        buckets_[new_round].push_back(msg_id);
        return true;
    }

    /// Delivers everything due this round in (msg_id, recipient) order.
    /// Returns first receipts at honest awake parties; echoes are sent as a
    /// side effect.
    std::vector<Delivery> step(Round r) {
        if (began_ != r) throw std::logic_error("step() called without begin_round() for this round");
        if (stepped_ == r) throw std::logic_error("step() called twice for one round");
        stepped_ = r;
        std::vector<Delivery> out;
        auto bucket = buckets_.find(r);
        if (bucket == buckets_.end()) return out;
        std::vector<std::uint64_t> ids = std::move(bucket->second);
        buckets_.erase(bucket);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (std::uint64_t id : ids) {
            auto it = envelopes_.find(id);
            if (it == envelopes_.end()) continue;
            Envelope& env = it->second;
            for (std::size_t i = 0; i < env.due.size(); ++i) {
                if (env.due[i] != r) continue;
                env.due[i] = kNever;
                --env.remaining;
                receive(i, env.payload, id, r, out);
            }
            if (env.remaining == 0) envelopes_.erase(it);
        }
        return out;
    }

    /// Envelopes created since the last call (the adversary observes all
    /// traffic).
    std::vector<const Envelope*> take_fresh() {
        std::vector<const Envelope*> out;
        for (auto id : fresh_) {
            auto it = envelopes_.find(id);
            if (it != envelopes_.end()) out.push_back(&it->second);
        }
        fresh_.clear();
        return out;
    }

    [[nodiscard]] const std::map<std::uint64_t, Envelope>& in_flight() const { return envelopes_; }

    [[nodiscard]] bool holds(PartyId p, Digest d) const { return held_.at(index_of(p)).contains(d); }

private:
    void emit(Event e) {
        if (trace_) trace_->add(std::move(e));
    }

    static Event message_event(Round r, EventKind k, std::optional<PartyId> party, const Payload& payload) {
        Event e{.round = r, .kind = k, .party = party, .msg = payload->digest(),
                .msg_kind = std::string(to_string(payload->kind()))};
        if (const auto* t = payload->get<TxMsg>()) e.tx = t->tx.id;
        return e;
    }

    void hold(std::size_t idx, const Payload& payload) {
        if (held_[idx].insert(payload->digest()).second && honest_seen_.insert(payload->digest()).second) {
            honest_log_.push_back(payload);
        }
    }

    std::uint64_t enqueue_all(PartyId sender, Payload payload, Round r, Round due, std::size_t skip) {
        Envelope env;
        env.id = next_id_++;
        env.sender = sender;
        env.payload = std::move(payload);
        env.sent_round = r;
        env.due.assign(party_count(), due);
        env.due[skip] = kNever;
        env.remaining = party_count() - 1;
        if (env.remaining == 0) return env.id;
        buckets_[due].push_back(env.id);
        fresh_.push_back(env.id);
        auto id = env.id;
        envelopes_.emplace(id, std::move(env));
        return id;
    }

    void receive(std::size_t i, const Payload& payload, std::uint64_t id, Round r, std::vector<Delivery>& out) {
        PartyId p = party_at(i);
        if (!is_awake(p, r) || is_corrupted(p, r)) return;
        if (held_[i].contains(payload->digest())) return;
        hold(i, payload);
        emit(message_event(r, EventKind::deliver, p, payload));
        if (p.is_validator() || cfg_.client_gossip) enqueue_all(p, payload, r, r + cfg_.delta, i);
        out.push_back(Delivery{p, payload, id});
    }

    void send_backlog(PartyId client, Round r) {
        auto ci = index_of(client);
        for (const auto& payload : honest_log_) {
            Envelope env;
            env.id = next_id_++;
            env.payload = payload;
            env.sent_round = r;
            env.due.assign(party_count(), kNever);
            env.due[ci] = r + cfg_.delta;
            env.remaining = 1;
            buckets_[r + cfg_.delta].push_back(env.id);
            fresh_.push_back(env.id);
            envelopes_.emplace(env.id, std::move(env));
        }
    }

    NetConfig cfg_;
    Trace* trace_;
    std::vector<bool> killed_;
    std::vector<std::unordered_set<Digest>> held_;
    std::unordered_set<Digest> honest_seen_;
    std::vector<Payload> honest_log_;  // every message ever held by an honest party, in first-held order
    std::map<std::uint64_t, Envelope> envelopes_;
    std::map<Round, std::vector<std::uint64_t>> buckets_;
    std::vector<std::uint64_t> fresh_;
    std::uint64_t next_id_ = 1;
    Round next_round_ = 0;
    Round began_ = -1;
    Round stepped_ = -1;
};

}  // namespace gadget::net
