// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "gadget/core.hpp"
#include "gadget/crypto.hpp"
#include "gadget/messages.hpp"

namespace gadget::bcast {

/// Parameters shared by all relays of one recovery broadcast.
///
/// Tolerates t = ⌊n'/2⌋ corrupted members, which covers every honest-majority
/// V_new. DS-round k (1-based) spans simulator rounds
/// [start + (k-1)Δ, start + kΔ) for sending; a chain sent in DS-round k
/// arrives in the window (start + (k-1)Δ, start + kΔ] and is judged against
/// index k there. There are t+1 DS-rounds, and delivery happens at the end
/// of round start + u_BC with u_BC = (t+1)Δ.
struct DsParams {
    Round start = 0;
    Round delta = 1;
    ValidatorSet members;
    Digest context = 0;

    [[nodiscard]] std::size_t tolerance() const { return members.size() / 2; }
    [[nodiscard]] Round u_bc() const { return static_cast<Round>(tolerance() + 1) * delta; }
    [[nodiscard]] Round deliver_round() const { return start + u_bc(); }

    /// DS-round index of a chain arriving at simulator round r, or 0
    /// outside the broadcast.
    [[nodiscard]] std::size_t ds_round_at(Round r) const {
        if (r <= start || r > deliver_round()) return 0;
        return static_cast<std::size_t>((r - start + delta - 1) / delta);
    }
};

/// Context digest binding a broadcast to its recovery announcement.
inline Digest ds_context(Round start, const ValidatorSet& members) {
    ByteWriter w;
    w.str("recover").i64(start).valset(members);
    return digest_of(w);
}

/// Dolev-Strong relay for one validator, covering every sender instance.
class DsRelay {
public:
    DsRelay(const KeyRegistry& keys, KeyHandle me, DsParams params)
        : keys_(&keys), me_(std::move(me)), params_(std::move(params)) {}

    [[nodiscard]] const DsParams& params() const { return params_; }

    /// Acts as sender for `value` at the broadcast's first round. Returns
    /// the chain to send.
    SignatureChain start(const Ledger& value) {
        SignatureChain c{params_.context, me_.owner(), value, {}};
        c.chain.push_back(sign(me_, SignatureChain::signing_bytes(c.context, c.sender, c.value)));
        extracted_[me_.owner().index].insert(value);
        return c;
    }

    /// Processes one chain received at round r. Returns the extended chain
    /// to relay, if any. Chains arriving at the delivery round still count.
    std::optional<SignatureChain> on_chain(const SignatureChain& c, Round r) {
        std::size_t k = params_.ds_round_at(r);
        if (k == 0 || !valid(c, k)) return std::nullopt;
        auto& ext = extracted_[c.sender.index];
        if (!ext.insert(c.value).second) return std::nullopt;
        // Two distinct values already prove equivocation; relaying more
        // cannot change any honest delivery.
        if (k > params_.tolerance() || ext.size() > 2) return std::nullopt;
        for (const auto& s : c.chain) {
            if (s.signer == me_.owner()) return std::nullopt;
        }
        SignatureChain out = c;
        out.chain.push_back(sign(me_, SignatureChain::signing_bytes(c.context, c.sender, c.value)));
        return out;
    }

    [[nodiscard]] const std::set<Ledger>& extracted(std::uint32_t sender) const {
        static const std::set<Ledger> kEmpty;
        auto it = extracted_.find(sender);
        return it == extracted_.end() ? kEmpty : it->second;
    }

    /// The delivered value for one sender: its unique extracted value, or
    /// none (⊥) for a silent or equivocating sender.
    [[nodiscard]] std::optional<Ledger> deliver(std::uint32_t sender) const {
        const auto& ext = extracted(sender);
        if (ext.size() != 1) return std::nullopt;
        return *ext.begin();
    }

    /// Delivered map over all members, in member order.
    [[nodiscard]] std::map<std::uint32_t, std::optional<Ledger>> deliver_all() const {
        std::map<std::uint32_t, std::optional<Ledger>> out;
        for (std::uint32_t m : params_.members.members()) out.emplace(m, deliver(m));
        return out;
    }

    /// Chain acceptance rule at DS-round k: at least k distinct member
    /// signatures, the sender's first, all valid over the same content.
    [[nodiscard]] bool valid(const SignatureChain& c, std::size_t k) const {
        if (c.context != params_.context) return false;
        if (!c.sender.is_validator() || !params_.members.contains(c.sender.index)) return false;
        if (c.chain.empty() || c.chain.size() < k || c.chain.front().signer != c.sender) return false;
        Digest d = digest_of(SignatureChain::signing_bytes(c.context, c.sender, c.value));
        std::set<PartyId> signers;
        for (const auto& s : c.chain) {
            if (!s.signer.is_validator() || !params_.members.contains(s.signer.index)) return false;
            if (!signers.insert(s.signer).second) return false;
            if (!keys_->verify_digest(s.signer, d, s)) return false;
        }
        return true;
    }

private:
    const KeyRegistry* keys_;
    KeyHandle me_;
    DsParams params_;
    std::map<std::uint32_t, std::set<Ledger>> extracted_;
};

}  // namespace gadget::bcast
