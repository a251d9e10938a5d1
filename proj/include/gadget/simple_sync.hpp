// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gadget/internal.hpp"

namespace gadget::internal {

/// Leader-based certified chain with synchronous finalization.
///
/// Epoch e covers rounds [start + 2Δe, start + 2Δ(e+1)); its leader is the
/// (e mod |V|)-th member. The leader proposes, at epoch start, a block with
/// every known unfinalized transaction on top of its highest certified
/// block. A validator votes once per epoch, for the epoch leader's first
/// proposal, and only if the proposal's parent is its own highest certified
/// block. A block with a quorum of votes is certified; 2Δ rounds after
/// first certifying a block, a validator finalizes it (and its ancestors)
/// unless it has seen a conflicting certified block.
class SimpleSyncValidator final : public InternalValidator {
public:
    SimpleSyncValidator(const KeyRegistry& keys, KeyHandle key, InstanceId instance, Round delta)
        : keys_(&keys), key_(std::move(key)), instance_(std::move(instance)), delta_(delta) {
        genesis_hash_ = instance_.digest();
        Block g;
        g.instance = instance_.digest();
        g.epoch = -1;
        g.height = 0;
        blocks_.emplace(genesis_hash_, g);
        ledgers_.emplace(genesis_hash_, instance_.genesis());
        certified_.emplace(genesis_hash_, instance_.start_round());
        tip_ = genesis_hash_;
        finalized_ = instance_.genesis();
    }

    [[nodiscard]] std::int64_t epoch_of(Round r) const { return (r - instance_.start_round()) / (2 * delta_); }
    [[nodiscard]] Round epoch_start(std::int64_t e) const { return instance_.start_round() + 2 * delta_ * e; }
    [[nodiscard]] std::uint32_t leader_of(std::int64_t e) const {
        const auto& vs = instance_.valset();
        return vs.at(static_cast<std::size_t>(e % static_cast<std::int64_t>(vs.size())));
    }

    void on_tx(TxId id, Round) override {
        if (known_set_.insert(id).second) known_txs_.push_back(id);
    }

    void on_message(const Message& m, Round r) override {
        if (const auto* p = m.get<Proposal>()) {
            on_proposal(*p, r);
        } else if (const auto* v = m.get<BlockVote>()) {
            on_vote(*v, r);
        }
    }

    void step(Round r, const Outbox& out) override {
        if (r < instance_.start_round()) return;
        std::int64_t e = epoch_of(r);
        if (r == epoch_start(e) && leader_of(e) == me() && proposed_epoch_ < e) propose(e, r, out);
        try_vote(e, r, out);
        try_finalize(r, out);
    }

    [[nodiscard]] const Ledger& finalized() const override { return finalized_; }
    [[nodiscard]] const InstanceId& instance() const override { return instance_; }

    [[nodiscard]] Digest tip() const { return tip_; }
    [[nodiscard]] bool is_certified(Digest h) const { return certified_.contains(h); }
    [[nodiscard]] std::size_t certified_count() const { return certified_.size(); }
    [[nodiscard]] const Ledger* ledger_of(Digest h) const {
        auto it = ledgers_.find(h);
        return it == ledgers_.end() ? nullptr : &it->second;
    }

private:
    [[nodiscard]] std::uint32_t me() const { return key_.owner().index; }

    void propose(std::int64_t e, Round r, const Outbox& out) {
        proposed_epoch_ = e;
        const Ledger& base = ledgers_.at(tip_);
        std::unordered_set<TxId> in_chain(base.txs.begin(), base.txs.end());
        Block b;
        b.instance = instance_.digest();
        b.epoch = e;
        b.height = blocks_.at(tip_).height + 1;
        b.parent = tip_;
        b.proposer = key_.owner();
        for (TxId t : known_txs_) {
            if (!in_chain.contains(t)) b.txs.push_back(t);
        }
        Proposal p;
        p.block_hash = b.hash();
        p.block = std::move(b);
        p.sig = sign(key_, Proposal::signing_bytes(p.block_hash));
        on_proposal(p, r);
        out(make_payload(p));
    }

    void try_vote(std::int64_t e, Round r, const Outbox& out) {
        if (vote_cast_epoch_ >= e) return;
        auto it = first_proposal_.find(e);
        if (it == first_proposal_.end()) return;
        const Block& b = blocks_.at(it->second);
        if (b.parent != tip_) return;
        vote_cast_epoch_ = e;
        BlockVote v{instance_.digest(), it->second, e, {}};
        v.sig = sign(key_, BlockVote::signing_bytes(v.instance, v.block_hash, v.epoch));
        on_vote(v, r);
        out(make_payload(v));
    }

    void try_finalize(Round r, const Outbox& out) {
        while (!finalize_due_.empty() && finalize_due_.begin()->first <= r) {
            Digest h = finalize_due_.begin()->second;
            finalize_due_.erase(finalize_due_.begin());
            if (has_conflicting_certificate(h)) continue;
            const Ledger& l = ledgers_.at(h);
            if (l.size() <= finalized_.size() || !is_prefix(finalized_, l)) continue;
            finalized_ = l;
            out(make_payload(std::make_shared<const FinalityVote>(FinalityVote::make(key_, instance_, finalized_))));
        }
    }

    void on_proposal(const Proposal& p, Round r) {
        const Block& b = p.block;
        if (b.instance != instance_.digest() || b.epoch < 0) return;
        if (b.hash() != p.block_hash) return;
        if (b.proposer != PartyId::validator(leader_of(b.epoch))) return;
        if (!keys_->verify(b.proposer, Proposal::signing_bytes(p.block_hash), p.sig)) return;
        if (blocks_.contains(p.block_hash)) return;
        auto parent = blocks_.find(b.parent);
        if (parent == blocks_.end()) {
            orphans_[b.parent].push_back(p);
            return;
        }
        if (b.height != parent->second.height + 1 || b.epoch <= parent->second.epoch) return;
        blocks_.emplace(p.block_hash, b);
        ledgers_.emplace(p.block_hash, append_unique(ledgers_.at(b.parent), b.txs));
        first_proposal_.try_emplace(b.epoch, p.block_hash);
        maybe_certify(p.block_hash, r);
        if (auto o = orphans_.find(p.block_hash); o != orphans_.end()) {
            auto children = std::move(o->second);
            orphans_.erase(o);
            for (const auto& c : children) on_proposal(c, r);
        }
    }

    void on_vote(const BlockVote& v, Round r) {
        if (v.instance != instance_.digest()) return;
        PartyId s = v.sig.signer;
        if (!s.is_validator() || !instance_.valset().contains(s.index)) return;
        if (!keys_->verify(s, BlockVote::signing_bytes(v.instance, v.block_hash, v.epoch), v.sig)) return;
        if (votes_[v.block_hash].insert(s.index).second) maybe_certify(v.block_hash, r);
    }

    void maybe_certify(Digest h, Round r) {
        if (certified_.contains(h) || !blocks_.contains(h)) return;
        auto vit = votes_.find(h);
        if (vit == votes_.end() || vit->second.size() < instance_.valset().quorum()) return;
        certified_.emplace(h, r);
        certified_order_.push_back(h);
        if (blocks_.at(h).height > blocks_.at(tip_).height) tip_ = h;
        finalize_due_.emplace(r + 2 * delta_, h);
    }

    [[nodiscard]] bool has_conflicting_certificate(Digest h) const {
        std::unordered_set<Digest> ancestors;
        for (Digest cur = h;;) {
            ancestors.insert(cur);
            if (cur == genesis_hash_) break;
            cur = blocks_.at(cur).parent;
        }
        const auto height = blocks_.at(h).height;
        for (Digest c : certified_order_) {
            if (ancestors.contains(c)) continue;
            const Block& cb = blocks_.at(c);
            if (cb.height <= height) return true;
            // Higher certified block: conflicting unless it descends from h.
            Digest cur = c;
            while (blocks_.at(cur).height > height) cur = blocks_.at(cur).parent;
            if (cur != h) return true;
        }
        return false;
    }

    const KeyRegistry* keys_;
    KeyHandle key_;
    InstanceId instance_;
    Round delta_;
    Digest genesis_hash_ = 0;

    std::unordered_map<Digest, Block> blocks_;
    std::unordered_map<Digest, Ledger> ledgers_;
    std::unordered_map<Digest, std::set<std::uint32_t>> votes_;
    std::unordered_map<Digest, Round> certified_;
    std::vector<Digest> certified_order_;
    std::map<std::int64_t, Digest> first_proposal_;
    std::unordered_map<Digest, std::vector<Proposal>> orphans_;
    std::multimap<Round, Digest> finalize_due_;
    Digest tip_ = 0;
    Ledger finalized_;
    std::int64_t vote_cast_epoch_ = -1;
    std::int64_t proposed_epoch_ = -1;
    std::vector<TxId> known_txs_;
    std::unordered_set<TxId> known_set_;
};

}  // namespace gadget::internal
