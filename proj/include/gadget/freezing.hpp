// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "gadget/core.hpp"

namespace gadget::freezing {

/// What happened when a ledger extracted from a witness was recorded.
struct SeenOutcome {
    bool new_ledger = false;       // M grew
    bool first_conflict = false;   // M holds a conflicting pair for the first time
};

/// Client-side freezing logic over the internal protocol.
///
/// Every ledger extracted from a valid witness joins the seen set M and
/// arms a timer `wait` rounds later. When the timer fires, the candidate is
/// confirmed if it is consistent with every element of M and longer than
/// the confirmed ledger. Once M holds two conflicting ledgers, no
/// candidate longer than their common prefix can pass, so the confirmed
/// ledger freezes.
///
/// The same core serves as a validator's bookmarking logic (wait Δ, the
/// confirmed slot read as the bookmark).
class FreezeCore {
public:
    explicit FreezeCore(Round wait, Ledger confirmed = {}) : wait_(wait), confirmed_(std::move(confirmed)) {}

    [[nodiscard]] Round wait() const { return wait_; }
    [[nodiscard]] const Ledger& confirmed() const { return confirmed_; }
    [[nodiscard]] const std::set<Ledger>& seen() const { return seen_; }
    [[nodiscard]] bool has_conflict() const { return conflict_; }
    [[nodiscard]] std::size_t pending_timers() const { return timers_.size(); }

    /// Records a ledger extracted from a witness at round r and arms its
    /// timer. Gossip of the witness is the caller's job.
    SeenOutcome on_witness(const Ledger& l, Round r) {
        SeenOutcome out;
        if (!seen_.contains(l)) {
            out.new_ledger = true;
            if (!conflict_) {
                for (const auto& s : seen_) {
                    if (!consistent(s, l)) {
                        conflict_ = true;
                        out.first_conflict = true;
                        break;
                    }
                }
            }
            seen_.insert(l);
        }
        timers_.emplace(r + wait_, l);
        return out;
    }

    /// Confirmation check for one candidate.
    std::optional<Ledger> on_timer(const Ledger& candidate) {
        if (candidate.size() <= confirmed_.size()) return std::nullopt;
        for (const auto& s : seen_) {
            if (!consistent(candidate, s)) return std::nullopt;
        }
        confirmed_ = candidate;
        return confirmed_;
    }

    /// Fires every timer due at or before r, in (due, ledger) order.
    /// Returns the confirmed ledger if it changed.
    std::optional<Ledger> fire_timers(Round r) {
        std::optional<Ledger> changed;
        while (!timers_.empty() && timers_.begin()->first <= r) {
            auto node = timers_.extract(timers_.begin());
            if (auto c = on_timer(node.value().second)) changed = std::move(c);
        }
        return changed;
    }

    /// Drops every armed timer (the confirmed ledger stays as is).
    void discard_timers() { timers_.clear(); }

private:
    Round wait_;
    Ledger confirmed_;
    std::set<Ledger> seen_;
    std::set<std::pair<Round, Ledger>> timers_;
    bool conflict_ = false;
};

}  // namespace gadget::freezing
