// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "gadget/internal.hpp"

namespace gadget::internal {

/// Environment-driven internal protocol for worst-case gadget testing.
///
/// A transaction becomes ready the first round every honest live member of
/// the validator set has received it. Ready transactions are appended to a
/// single canonical ledger (genesis first) `finality_delay` rounds later, in
/// (ready round, id) order, and every honest validator finalizes that
/// ledger at once. With u_Π = finality_delay + Δ, a client holds a witness
/// for a transaction at most u_Π rounds after it became ready. From
/// `stall_from` on the ledger stops growing.
class OracleScript {
public:
    using HonestPredicate = std::function<bool(std::uint32_t validator, Round r)>;

    OracleScript(InstanceId instance, Round u_pi, Round delta, std::optional<Round> stall_from)
        : instance_(std::move(instance)), finality_delay_(u_pi - delta), stall_from_(stall_from) {
        if (finality_delay_ < 0) throw std::invalid_argument("scripted oracle needs u_pi >= delta");
        canonical_ = instance_.genesis();
        in_ledger_.insert(canonical_.txs.begin(), canonical_.txs.end());
    }

    [[nodiscard]] const InstanceId& instance() const { return instance_; }
    [[nodiscard]] const Ledger& canonical() const { return canonical_; }
    [[nodiscard]] Round finality_delay() const { return finality_delay_; }

    void record_receipt(std::uint32_t validator, TxId id, Round r) {
        if (in_ledger_.contains(id)) return;
        receipts_[id].try_emplace(validator, r);
    }

    /// Advances the script to round r. Call once per round, after inputs.
    void advance(Round r, const HonestPredicate& honest) {
        for (auto it = receipts_.begin(); it != receipts_.end();) {
            bool all = true;
            for (std::uint32_t v : instance_.valset().members()) {
                if (honest(v, r) && !it->second.contains(v)) {
                    all = false;
                    break;
                }
            }
            if (all) {
                ready_.emplace(std::make_pair(r, it->first));
                it = receipts_.erase(it);
            } else {
                ++it;
            }
        }
        if (stall_from_ && r >= *stall_from_) return;
        while (!ready_.empty() && ready_.begin()->first + finality_delay_ <= r) {
            TxId id = ready_.begin()->second;
            ready_.erase(ready_.begin());
            if (in_ledger_.insert(id).second) canonical_.txs.push_back(id);
        }
    }

private:
    InstanceId instance_;
    Round finality_delay_;
    std::optional<Round> stall_from_;
    Ledger canonical_;
    std::set<TxId> in_ledger_;
    std::map<TxId, std::map<std::uint32_t, Round>> receipts_;
    std::set<std::pair<Round, TxId>> ready_;
};

/// Per-validator view of an OracleScript: finalizes the canonical ledger and
/// votes on each growth.
class ScriptedOracleValidator final : public InternalValidator {
public:
    ScriptedOracleValidator(KeyHandle key, std::shared_ptr<OracleScript> script)
        : key_(std::move(key)), script_(std::move(script)), finalized_(script_->instance().genesis()) {}

    void on_tx(TxId id, Round r) override { script_->record_receipt(key_.owner().index, id, r); }
    void on_message(const Message&, Round) override {}

    void step(Round, const Outbox& out) override {
        const Ledger& c = script_->canonical();
        if (c.size() > finalized_.size()) {
            finalized_ = c;
            out(make_payload(std::make_shared<const FinalityVote>(FinalityVote::make(key_, instance(), finalized_))));
        }
    }

    [[nodiscard]] const Ledger& finalized() const override { return finalized_; }
    [[nodiscard]] const InstanceId& instance() const override { return script_->instance(); }

private:
    KeyHandle key_;
    std::shared_ptr<OracleScript> script_;
    Ledger finalized_;
};

}  // namespace gadget::internal
