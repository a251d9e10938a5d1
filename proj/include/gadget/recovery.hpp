// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "gadget/core.hpp"
#include "gadget/crypto.hpp"
#include "gadget/messages.hpp"

namespace gadget::recovery {

/// Raised when a run reaches a state the model rules out (for instance two
/// genesis quorums for different instances). Aborts the run.
class ContractViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ValidatorPhase : std::uint8_t { normal, broadcasting, restarted };

/// New genesis: majority prefix of the delivered bookmarks over |V_new|.
/// Undelivered (⊥) entries support nothing.
inline Ledger compute_new_genesis(const std::map<std::uint32_t, std::optional<Ledger>>& delivered,
                                  std::size_t n_new) {
    std::vector<Ledger> values;
    for (const auto& [v, l] : delivered) {
        if (l) values.push_back(*l);
    }
    return majority_prefix(values, n_new);
}

/// Restart instance: tag 1, genesis L_rec, validator set V_new, starting at
/// the broadcast's delivery round.
inline InstanceId restart_instance(const Ledger& l_rec, const ValidatorSet& v_new, Round start) {
    return InstanceId(1, l_rec, v_new, start);
}

/// Transactions to feed the restarted instance: everything seen, in
/// first-seen order, that the new genesis does not already hold.
inline std::vector<TxId> carryover(const std::vector<TxId>& seen_in_order, const Ledger& l_rec) {
    std::unordered_set<TxId> in(l_rec.txs.begin(), l_rec.txs.end());
    std::vector<TxId> out;
    for (TxId t : seen_in_order) {
        if (in.insert(t).second) out.push_back(t);
    }
    return out;
}

/// Client-side count of genesis votes. Decides once strictly more than
/// |V_new|/2 distinct V_new members voted for the same instance.
class GenesisTally {
public:
    GenesisTally(const KeyRegistry& keys, ValidatorSet v_new) : keys_(&keys), v_new_(std::move(v_new)) {}

    /// Returns false for votes that fail verification or membership.
    bool add(const GenesisVote& g) {
        PartyId s = g.sig.signer;
        if (!s.is_validator() || !v_new_.contains(s.index)) return false;
        if (!(g.new_instance.valset() == v_new_) || g.new_instance.epoch_tag() != 1) return false;
        if (!keys_->verify(s, GenesisVote::signing_bytes(g.new_instance), g.sig)) return false;
        auto& voters = votes_[g.new_instance.digest()];
        voters.insert(s.index);
        if (2 * voters.size() > v_new_.size()) {
            if (decided_ && !(*decided_ == g.new_instance)) {
                throw ContractViolation("two genesis quorums for different instances");
            }
            decided_ = g.new_instance;
        }
        return true;
    }

    [[nodiscard]] const std::optional<InstanceId>& decided() const { return decided_; }

private:
    const KeyRegistry* keys_;
    ValidatorSet v_new_;
    std::map<Digest, std::set<std::uint32_t>> votes_;
    std::optional<InstanceId> decided_;
};

}  // namespace gadget::recovery
