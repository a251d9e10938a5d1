// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gadget/broadcast.hpp"
#include "gadget/config.hpp"
#include "gadget/messages.hpp"
#include "gadget/netsim.hpp"

namespace gadget::adv {

/// Scenario facts every strategy may read.
struct Timeline {
    std::uint32_t n = 0;
    std::size_t n_clients = 0;
    Round delta = 1;
    Round client_wait = 0;
    std::optional<Round> r_maj;
    std::optional<Round> r_rec;
    Round u_bc = 0;
    ValidatorSet v_new;
    InstanceId instance0;
};

/// Read-only snapshot handed to a strategy each round.
struct AdversaryView {
    Round round = 0;
    const Timeline* timeline = nullptr;
    std::vector<const net::Envelope*> fresh;
    const std::map<std::uint32_t, KeyHandle>* keys = nullptr;  // corrupted validators only
    const net::Network* network = nullptr;
};

/// The only channel through which a strategy acts on the run.
class Controller {
public:
    Controller(net::Network& network, const KeyRegistry& registry, Round now)
        : net_(&network), registry_(&registry), now_(now) {}

    [[nodiscard]] Round now() const { return now_; }

    /// Injects `payload` for delivery at `at` (clamped to now+1). Empty
    /// `to` addresses every party.
    bool inject(const std::vector<PartyId>& to, const Payload& payload, Round at) {
        return net_->inject(*registry_, std::nullopt, to, payload, now_, at);
    }

    bool reschedule(std::uint64_t msg_id, PartyId recipient, Round at) {
        return net_->reschedule(msg_id, recipient, at, now_);
    }

private:
    net::Network* net_;
    const KeyRegistry* registry_;
    Round now_;
};

class Strategy {
public:
    virtual ~Strategy() = default;
    /// Called once per round before deliveries.
    virtual void step(const AdversaryView& view, Controller& ctl) = 0;
};

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Shared machinery
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

/// Seeded random delivery skew plus bookkeeping of what honest validators
/// have finalized. Draws use raw mt19937_64 output reduced by modulo, so
/// replays match across standard libraries.
class StrategyBase : public Strategy {
public:
    StrategyBase(const nlohmann::json& params, std::uint64_t seed)
        : rng_(seed ^ 0x61647665727361ULL), skew_permille_(static_cast<std::uint64_t>(params.value("skew_prob", 0.3) * 1000.0)) {}

protected:
    /// Uniform draw in [lo, hi].
    Round draw(Round lo, Round hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<Round>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool coin() { return rng_() % 1000 < skew_permille_; }

    static bool honest_origin(const net::Envelope& e) { return !e.injected && e.sender.has_value(); }

    static const FinalityVote* vote_of(const net::Envelope& e) {
        const auto* v = e.payload->get<VoteRef>();
        return v ? v->get() : nullptr;
    }

    /// Records honest instance-0 finality votes seen in fresh traffic.
    void observe(const AdversaryView& view) {
        for (const net::Envelope* e : view.fresh) {
            if (!honest_origin(*e)) continue;
            if (const FinalityVote* v = vote_of(*e); v && v->instance == view.timeline->instance0) {
                if (v->ledger.size() > honest_best_.size() && consistent(v->ledger, honest_best_)) honest_best_ = v->ledger;
            }
        }
    }

    /// Pulls each recipient slot earlier with probability skew_prob.
    void skew(const net::Envelope& e, const net::Network& network, Controller& ctl) {
        for (std::size_t i = 0; i < e.due.size(); ++i) {
            if (e.due[i] == kNever || !coin()) continue;
            ctl.reschedule(e.id, network.party_at(i), draw(e.sent_round + 1, e.due[i]));
        }
    }

    /// Quorum of corrupted keys for instance 0, lowest indices first.
    [[nodiscard]] std::vector<const KeyHandle*> forging_keys(const AdversaryView& view) const {
        std::vector<const KeyHandle*> out;
        const auto& vs = view.timeline->instance0.valset();
        for (const auto& [v, k] : *view.keys) {
            if (vs.contains(v) && out.size() < vs.quorum()) out.push_back(&k);
        }
        if (out.size() < vs.quorum()) out.clear();
        return out;
    }

    static Payload forge_witness(const std::vector<const KeyHandle*>& keys, const InstanceId& inst, const Ledger& l) {
        Witness w{inst, {}};
        for (const KeyHandle* k : keys) w.votes.push_back(std::make_shared<const FinalityVote>(FinalityVote::make(*k, inst, l)));
        return make_payload(std::move(w));
    }

    static std::vector<PartyId> clients_where(const Timeline& t, bool even) {
        std::vector<PartyId> out;
        for (std::uint32_t c = 0; c < t.n_clients; ++c) {
            if ((c % 2 == 0) == even) out.push_back(PartyId::client(c));
        }
        return out;
    }

    static std::vector<PartyId> honest_new_validators(const AdversaryView& view) {
        std::vector<PartyId> out;
        for (std::uint32_t v : view.timeline->v_new.members()) {
            if (!view.keys->contains(v)) out.push_back(PartyId::validator(v));
        }
        return out;
    }

    static Payload signed_chain(const KeyHandle& k, Digest context, const Ledger& value) {
        SignatureChain c{context, k.owner(), value, {}};
        c.chain.push_back(sign(k, SignatureChain::signing_bytes(context, c.sender, value)));
        return make_payload(std::move(c));
    }

    std::mt19937_64 rng_;
    std::uint64_t skew_permille_;
    Ledger honest_best_;
};

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Strategies
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

/// Random skew only; corrupted validators stay silent.
class Passive final : public StrategyBase {
public:
    using StrategyBase::StrategyBase;

    void step(const AdversaryView& view, Controller& ctl) override {
        observe(view);
        for (const net::Envelope* e : view.fresh) skew(*e, *view.network, ctl);
    }
};

/// Once it holds a quorum of keys (from r_maj on), forges witnesses for two
/// conflicting one-transaction extensions of the best honest ledger and
/// shows each to one half of the clients.
class DoubleSpend final : public StrategyBase {
public:
    DoubleSpend(const nlohmann::json& params, std::uint64_t seed)
        : StrategyBase(params, seed),
          repeat_(params.value("repeat", 1)),
          period_(params.value("period", Round{10})),
          offset_b_(params.value("offset_b", Round{1})) {}

    void step(const AdversaryView& view, Controller& ctl) override {
        observe(view);
        for (const net::Envelope* e : view.fresh) skew(*e, *view.network, ctl);
        const auto& t = *view.timeline;
        if (!t.r_maj || view.round < *t.r_maj || done_ >= repeat_ || view.round < next_) return;
        auto keys = forging_keys(view);
        if (keys.empty()) return;
        TxId a = kAdversaryTxBase + 2 * static_cast<TxId>(done_);
        Ledger la = honest_best_, lb = honest_best_;
        la.txs.push_back(a);
        lb.txs.push_back(a + 1);
        ctl.inject(clients_where(t, true), forge_witness(keys, t.instance0, la), view.round + 1);
        ctl.inject(clients_where(t, false), forge_witness(keys, t.instance0, lb), view.round + offset_b_);
        ++done_;
        next_ = view.round + period_;
    }

private:
    int repeat_;
    Round period_;
    Round offset_b_;
    int done_ = 0;
    Round next_ = 0;
};

/// Two-client confusion. Honest finality votes and witnesses reach Alice
/// one round after sending and everyone else after the full Δ. After r_maj
/// the adversary shows Bob a forged fork L2' just before Bob's timer for
/// the honest L2 fires, and late enough that Alice confirms L2 first. At
/// recovery every corrupted V_new member broadcasts L2' as its bookmark.
class EveConfuser final : public StrategyBase {
public:
    EveConfuser(const nlohmann::json& params, std::uint64_t seed)
        : StrategyBase(params, seed),
          alice_(params.value("alice", 0u)),
          bob_(params.value("bob", 1u)),
          fork_tx_(params.value("fork_tx", kAdversaryTxBase + 7)) {}

    void step(const AdversaryView& view, Controller& ctl) override {
        observe(view);
        const auto& t = *view.timeline;
        PartyId alice = PartyId::client(alice_);
        for (const net::Envelope* e : view.fresh) {
            auto kind = e->payload->kind();
            bool certifying = kind == MessageKind::finality_vote || kind == MessageKind::witness;
            if (!certifying) {
                skew(*e, *view.network, ctl);
                continue;
            }
            if (!honest_origin(*e) || alice_ >= t.n_clients) continue;
            auto ai = view.network->index_of(alice);
            if (e->due[ai] == kNever) continue;
            ctl.reschedule(e->id, alice, e->sent_round + 1);
            if (const FinalityVote* v = vote_of(*e); v && v->instance == t.instance0) {
                alice_votes_.push_back({e->sent_round + 1, v->signer().index, v->ledger});
            }
        }
        if (!struck_ && t.r_maj && view.round >= *t.r_maj) try_strike(view, ctl);
        if (struck_ && t.r_rec && view.round == *t.r_rec) {
            Digest ctx = bcast::ds_context(*t.r_rec, t.v_new);
            for (const auto& [v, k] : *view.keys) {
                if (t.v_new.contains(v)) ctl.inject(honest_new_validators(view), signed_chain(k, ctx, fork_), view.round + 1);
            }
        }
    }

private:
    struct Seen {
        Round at;
        std::uint32_t signer;
        Ledger ledger;
    };

    /// Round at which Alice first held a quorum of honest votes on
    /// extensions of l.
    [[nodiscard]] std::optional<Round> alice_round(const Ledger& l, std::size_t quorum) const {
        std::map<std::uint32_t, Round> first;
        for (const auto& s : alice_votes_) {
            if (!is_prefix(l, s.ledger)) continue;
            auto [it, fresh] = first.try_emplace(s.signer, s.at);
            if (!fresh) it->second = std::min(it->second, s.at);
        }
        if (first.size() < quorum) return std::nullopt;
        std::vector<Round> rounds;
        for (const auto& [v, r] : first) rounds.push_back(r);
        std::sort(rounds.begin(), rounds.end());
        return rounds[quorum - 1];
    }

    void try_strike(const AdversaryView& view, Controller& ctl) {
        const auto& t = *view.timeline;
        auto keys = forging_keys(view);
        if (keys.empty() || honest_best_.empty() || bob_ >= t.n_clients) return;
        // Deliver to Bob at d = ra + W - Δ + 1, i.e. inject now when
        // ra = now + Δ - W. Fall back to striking once that window passed.
        auto ra = alice_round(honest_best_, t.instance0.valset().quorum());
        Round target = ra ? *ra + t.client_wait - t.delta : view.round;
        if (ra && view.round < target && view.round < *t.r_maj + t.client_wait) return;
        fork_ = honest_best_.prefix(honest_best_.size() - 1);
        fork_.txs.push_back(fork_tx_);
        ctl.inject({PartyId::client(bob_)}, forge_witness(keys, t.instance0, fork_), view.round + 1);
        struck_ = true;
    }

    std::uint32_t alice_;
    std::uint32_t bob_;
    TxId fork_tx_;
    std::vector<Seen> alice_votes_;
    bool struck_ = false;
    Ledger fork_;
};

/// Corrupted V_new members lie in the bookmark broadcast: a fabricated
/// extension (fake), different values to two halves of the relays
/// (equivocate), or nothing at all (silent). Optionally they also send
/// genesis votes for a fabricated restart instance to every client.
class BookmarkLiar final : public StrategyBase {
public:
    BookmarkLiar(const nlohmann::json& params, std::uint64_t seed)
        : StrategyBase(params, seed),
          mode_(params.value("mode", std::string("fake"))),
          fake_genesis_(params.value("fake_genesis", false)) {}

    void step(const AdversaryView& view, Controller& ctl) override {
        observe(view);
        for (const net::Envelope* e : view.fresh) skew(*e, *view.network, ctl);
        const auto& t = *view.timeline;
        if (!t.r_rec) return;
        if (view.round == *t.r_rec) lie(view, ctl);
        if (fake_genesis_ && view.round == *t.r_rec + t.u_bc) {
            Ledger fake = honest_best_;
            fake.txs.push_back(kAdversaryTxBase + 500);
            InstanceId inst(1, fake, t.v_new, *t.r_rec + t.u_bc);
            for (const auto& [v, k] : *view.keys) {
                if (!t.v_new.contains(v)) continue;
                ctl.inject({}, make_payload(GenesisVote::make(k, inst)), view.round + 1);
            }
        }
    }

private:
    void lie(const AdversaryView& view, Controller& ctl) {
        const auto& t = *view.timeline;
        if (mode_ == "silent") return;
        Digest ctx = bcast::ds_context(*t.r_rec, t.v_new);
        auto honest = honest_new_validators(view);
        std::vector<PartyId> even, odd;
        for (std::size_t i = 0; i < honest.size(); ++i) (i % 2 ? odd : even).push_back(honest[i]);
        for (const auto& [v, k] : *view.keys) {
            if (!t.v_new.contains(v)) continue;
            Ledger a = honest_best_, b = honest_best_;
            a.txs.push_back(kAdversaryTxBase + 100 + 2 * v);
            b.txs.push_back(kAdversaryTxBase + 101 + 2 * v);
            if (mode_ == "equivocate") {
                if (!even.empty()) ctl.inject(even, signed_chain(k, ctx, a), view.round + 1);
                if (!odd.empty()) ctl.inject(odd, signed_chain(k, ctx, b), view.round + 1);
            } else {
                ctl.inject(honest, signed_chain(k, ctx, a), view.round + 1);
            }
        }
    }

    std::string mode_;
    bool fake_genesis_;
};

inline std::unique_ptr<Strategy> make_strategy(const AdversarySpec& spec, std::uint64_t seed) {
    if (spec.strategy == "passive") return std::make_unique<Passive>(spec.params, seed);
    if (spec.strategy == "double_spend" || spec.strategy == "double_spend_equivocator") {
        return std::make_unique<DoubleSpend>(spec.params, seed);
    }
    if (spec.strategy == "eve_confuser") return std::make_unique<EveConfuser>(spec.params, seed);
    if (spec.strategy == "bookmark_liar") return std::make_unique<BookmarkLiar>(spec.params, seed);
    throw std::invalid_argument("unknown adversary strategy '" + spec.strategy + "'");
}

}  // namespace gadget::adv
