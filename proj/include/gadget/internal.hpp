// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gadget/core.hpp"
#include "gadget/crypto.hpp"
#include "gadget/messages.hpp"

namespace gadget::internal {

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Witness consumer
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

enum class WitnessError : std::uint8_t {
    none,
    bad_signature,
    duplicate_signer,
    below_quorum,
    wrong_instance,
    genesis_mismatch,
};

inline std::string_view to_string(WitnessError e) {
    switch (e) {
        case WitnessError::none: return "ok";
        case WitnessError::bad_signature: return "bad_signature";
        case WitnessError::duplicate_signer: return "duplicate_signer";
        case WitnessError::below_quorum: return "below_quorum";
        case WitnessError::wrong_instance: return "wrong_instance";
        case WitnessError::genesis_mismatch: return "genesis_mismatch";
    }
    return "?";
}

struct ConsumeResult {
    WitnessError error = WitnessError::none;
    Ledger ledger;

    [[nodiscard]] bool ok() const { return error == WitnessError::none; }
};

/// Checks one vote against an instance: membership, signature, genesis.
inline WitnessError check_vote(const KeyRegistry& keys, const InstanceId& instance, const FinalityVote& v) {
    if (!(v.instance == instance)) return WitnessError::wrong_instance;
    PartyId s = v.signer();
    if (!s.is_validator() || !instance.valset().contains(s.index)) return WitnessError::bad_signature;
    if (!keys.verify(s, FinalityVote::signing_bytes(v.instance, v.ledger), v.sig)) return WitnessError::bad_signature;
    if (!is_prefix(instance.genesis(), v.ledger)) return WitnessError::genesis_mismatch;
    return WitnessError::none;
}

/// The witness consumer C: deterministic and non-interactive. A
/// structurally valid witness maps to the majority prefix of its votes'
/// ledgers over the instance's validator set.
inline ConsumeResult witness_consume(const KeyRegistry& keys, const InstanceId& expected, const Witness& w) {
    if (!(w.instance == expected)) return {WitnessError::wrong_instance, {}};
    std::set<PartyId> signers;
    std::vector<Ledger> ledgers;
    ledgers.reserve(w.votes.size());
    for (const auto& v : w.votes) {
        if (!v) return {WitnessError::bad_signature, {}};
        if (auto e = check_vote(keys, w.instance, *v); e != WitnessError::none) return {e, {}};
        if (!signers.insert(v->signer()).second) return {WitnessError::duplicate_signer, {}};
        ledgers.push_back(v->ledger);
    }
    if (signers.size() < w.instance.valset().quorum()) return {WitnessError::below_quorum, {}};
    return {WitnessError::none, majority_prefix(ledgers, w.instance.valset().size())};
}

/// Per-run memo of witness_consume keyed by witness message digest. C is
/// deterministic, so identical witness bytes always give the same answer.
class WitnessConsumer {
public:
    explicit WitnessConsumer(const KeyRegistry& keys) : keys_(&keys) {}

    ConsumeResult consume(const InstanceId& expected, const Witness& w, Digest witness_digest) {
        auto key = std::make_pair(witness_digest, expected.digest());
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto r = witness_consume(*keys_, expected, w);
        memo_.emplace(key, r);
        return r;
    }

private:
    const KeyRegistry* keys_;
    std::map<std::pair<Digest, Digest>, ConsumeResult> memo_;
};

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Witness producer
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

/// Pool of received finality votes for one instance, with the witness
/// producer W over it.
///
/// Votes are kept per signer as an antichain (a vote that is a prefix of
/// another vote by the same signer adds nothing). A trie over all kept
/// ledgers records, per node, the set of signers with some vote extending
/// that node. The longest obtainable C-value is the deepest node supported
/// by a quorum; support only grows, so the search is incremental.
class VotePool {
public:
    VotePool(const KeyRegistry& keys, InstanceId instance)
        : keys_(&keys), instance_(std::move(instance)), quorum_(instance_.valset().quorum()) {
        nodes_.push_back(Node{});
    }

    [[nodiscard]] const InstanceId& instance() const { return instance_; }

    /// Adds a vote; returns false for votes that fail verification or
    /// belong to another instance.
    bool add(const VoteRef& vote) {
        if (!vote || check_vote(*keys_, instance_, *vote) != WitnessError::none) return false;
        auto& mine = by_signer_[vote->signer().index];
        for (const auto& have : mine) {
            if (is_prefix(vote->ledger, have->ledger)) return true;
        }
        std::erase_if(mine, [&](const VoteRef& have) { return is_prefix(have->ledger, vote->ledger); });
        mine.push_back(vote);
        std::sort(mine.begin(), mine.end(), [](const VoteRef& a, const VoteRef& b) { return a->ledger < b->ledger; });
        insert_path(vote->ledger, vote->signer().index);
        return true;
    }

    /// Number of distinct signers with at least one vote.
    [[nodiscard]] std::size_t signer_count() const { return by_signer_.size(); }
    [[nodiscard]] std::uint64_t version() const { return version_; }

    /// Longest C-value obtainable from the pool, if any quorum exists.
    [[nodiscard]] std::optional<Ledger> best_ledger() const {
        auto node = best_node();
        if (!node) return std::nullopt;
        return ledger_at(*node);
    }

    /// W: a witness whose C-value is the longest obtainable, or none when
    /// no quorum of signers is present. Among equally long candidates the
    /// one with the lexicographically least supporter set wins.
    [[nodiscard]] std::optional<Witness> produce() const {
        auto node = best_node();
        if (!node) return std::nullopt;
        Ledger target = ledger_at(*node);
        Witness w{instance_, {}};
        for (std::uint32_t s : nodes_[*node].supporters) {
            const auto& mine = by_signer_.at(s);
            const FinalityVote* pick = nullptr;
            VoteRef pick_ref;
            for (const auto& v : mine) {
                if (!is_prefix(target, v->ledger)) continue;
                if (!pick || v->ledger.size() > pick->ledger.size()) {
                    pick = v.get();
                    pick_ref = v;
                }
            }
            w.votes.push_back(pick_ref);
        }
        return w;
    }

private:
    struct Node {
        std::size_t parent = 0;
        TxId tx = 0;
        std::size_t depth = 0;
        std::map<TxId, std::size_t> children;
        std::vector<std::uint32_t> supporters;  // sorted
    };

    void insert_path(const Ledger& l, std::uint32_t signer) {
        std::size_t cur = 0;
        bool changed = support(cur, signer);
        for (TxId t : l.txs) {
            auto it = nodes_[cur].children.find(t);
            std::size_t next;
            if (it == nodes_[cur].children.end()) {
                next = nodes_.size();
                nodes_.push_back(Node{cur, t, nodes_[cur].depth + 1, {}, {}});
                nodes_[cur].children.emplace(t, next);
            } else {
                next = it->second;
            }
            cur = next;
            changed |= support(cur, signer);
        }
        if (changed) ++version_;
    }

    bool support(std::size_t node, std::uint32_t signer) {
        auto& s = nodes_[node].supporters;
        auto pos = std::lower_bound(s.begin(), s.end(), signer);
        if (pos != s.end() && *pos == signer) return false;
        s.insert(pos, signer);
        if (s.size() == quorum_) qualified_.push_back(node);
        return true;
    }

    [[nodiscard]] std::optional<std::size_t> best_node() const {
        std::optional<std::size_t> best;
        for (std::size_t n : qualified_) {
            if (!best) {
                best = n;
                continue;
            }
            const auto& a = nodes_[n];
            const auto& b = nodes_[*best];
            if (a.depth != b.depth) {
                if (a.depth > b.depth) best = n;
                continue;
            }
            if (a.supporters != b.supporters) {
                if (a.supporters < b.supporters) best = n;
                continue;
            }
            if (ledger_at(n) < ledger_at(*best)) best = n;
        }
        return best;
    }

    [[nodiscard]] Ledger ledger_at(std::size_t node) const {
        Ledger l;
        l.txs.resize(nodes_[node].depth);
        for (std::size_t cur = node; cur != 0; cur = nodes_[cur].parent) l.txs[nodes_[cur].depth - 1] = nodes_[cur].tx;
        return l;
    }

    const KeyRegistry* keys_;
    InstanceId instance_;
    std::size_t quorum_;
    std::map<std::uint32_t, std::vector<VoteRef>> by_signer_;
    std::vector<Node> nodes_;
    std::vector<std::size_t> qualified_;
    std::uint64_t version_ = 0;
};

/// W over an explicit pool of votes.
inline std::optional<Witness> witness_produce(const KeyRegistry& keys, const InstanceId& instance,
                                              const std::vector<VoteRef>& pool) {
    VotePool p(keys, instance);
    for (const auto& v : pool) p.add(v);
    return p.produce();
}

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Internal protocol interface
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

using Outbox = std::function<void(Payload)>;

/// One validator's state machine for one instance of the internal
/// protocol. Honest validators broadcast a finality vote on every growth of
/// their finalized ledger.
class InternalValidator {
public:
    virtual ~InternalValidator() = default;

    virtual void on_tx(TxId id, Round r) = 0;
    virtual void on_message(const Message& m, Round r) = 0;
    virtual void step(Round r, const Outbox& out) = 0;

    [[nodiscard]] virtual const Ledger& finalized() const = 0;
    [[nodiscard]] virtual const InstanceId& instance() const = 0;
};

}  // namespace gadget::internal
