// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace gadget {

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Time and transactions
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

/// Discrete simulator round. Round 0 is protocol start.
using Round = std::int64_t;
inline constexpr Round kNever = std::numeric_limits<Round>::max();

using TxId = std::uint64_t;

struct Transaction {
    TxId id = 0;
    std::vector<std::uint8_t> payload;
    Round submit_round = 0;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Ledger algebra
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

/// Ordered transaction-id sequence. Compared element-wise; transaction ids
/// are the identity (two transactions with equal payloads but distinct ids
/// are distinct).
struct Ledger {
    std::vector<TxId> txs;

    Ledger() = default;
    Ledger(std::initializer_list<TxId> ids) : txs(ids) {}
    explicit Ledger(std::vector<TxId> ids) : txs(std::move(ids)) {}

    [[nodiscard]] std::size_t size() const { return txs.size(); }
    [[nodiscard]] bool empty() const { return txs.empty(); }
    [[nodiscard]] bool contains(TxId id) const {
        return std::find(txs.begin(), txs.end(), id) != txs.end();
    }

    /// First `len` transactions.
    [[nodiscard]] Ledger prefix(std::size_t len) const {
        len = std::min(len, txs.size());
        return Ledger(std::vector<TxId>(txs.begin(), txs.begin() + static_cast<std::ptrdiff_t>(len)));
    }

    /// True when no transaction id occurs twice.
    [[nodiscard]] bool well_formed() const {
        std::unordered_set<TxId> ids;
        for (TxId id : txs) {
            if (!ids.insert(id).second) return false;
        }
        return true;
    }

    friend bool operator==(const Ledger&, const Ledger&) = default;
    friend auto operator<=>(const Ledger&, const Ledger&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Ledger& l) {
    os << '[';
    for (std::size_t i = 0; i < l.txs.size(); ++i) {
        if (i) os << ',';
        os << 't' << l.txs[i];
    }
    return os << ']';
}

/// a ⪯ b (non-strict).
inline bool is_prefix(const Ledger& a, const Ledger& b) {
    if (a.size() > b.size()) return false;
    return std::equal(a.txs.begin(), a.txs.end(), b.txs.begin());
}

inline bool consistent(const Ledger& a, const Ledger& b) {
    return a.size() <= b.size() ? is_prefix(a, b) : is_prefix(b, a);
}

/// Longest common prefix of two ledgers.
inline Ledger common_prefix(const Ledger& a, const Ledger& b) {
    std::size_t n = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < n && a.txs[i] == b.txs[i]) ++i;
    return a.prefix(i);
}

/// `base` followed by every transaction of `extra` not already in `base`.
inline Ledger append_unique(const Ledger& base, std::span<const TxId> extra) {
    Ledger out = base;
    std::unordered_set<TxId> have(base.txs.begin(), base.txs.end());
    for (TxId id : extra) {
        if (have.insert(id).second) out.txs.push_back(id);
    }
    return out;
}

/// Longest ledger that is a prefix of strictly more than set_size/2 of the
/// given ledgers (one entry per distinct supporter). Candidates meeting the
/// threshold form a prefix chain, so the walk below only ever has one
/// extendable branch: at each depth the groups of ledgers agreeing on the
/// next transaction are disjoint, and at most one can exceed the threshold.
/// An empty input list yields the empty ledger.
inline Ledger majority_prefix(std::span<const Ledger> ledgers, std::size_t set_size) {
    Ledger out;
    std::vector<const Ledger*> live;
    live.reserve(ledgers.size());
    for (const auto& l : ledgers) live.push_back(&l);

    for (std::size_t depth = 0;; ++depth) {
        // Group the ledgers that continue past `depth` by their next tx.
        std::vector<TxId> next;
        next.reserve(live.size());
        for (const Ledger* l : live) {
            if (l->size() > depth) next.push_back(l->txs[depth]);
        }
        std::sort(next.begin(), next.end());
        std::optional<TxId> winner;
        for (std::size_t i = 0; i < next.size();) {
            std::size_t j = i;
            while (j < next.size() && next[j] == next[i]) ++j;
            if (2 * (j - i) > set_size) {
                winner = next[i];
                break;
            }
            i = j;
        }
        if (!winner) return out;
        out.txs.push_back(*winner);
        std::erase_if(live, [&](const Ledger* l) { return l->size() <= depth || l->txs[depth] != *winner; });
    }
}

inline Ledger majority_prefix(const std::vector<Ledger>& ledgers, std::size_t set_size) {
    return majority_prefix(std::span<const Ledger>(ledgers), set_size);
}

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Parties
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

enum class PartyKind : std::uint8_t { validator = 0, client = 1 };

struct PartyId {
    PartyKind kind = PartyKind::validator;
    std::uint32_t index = 0;

    static constexpr PartyId validator(std::uint32_t i) { return {PartyKind::validator, i}; }
    static constexpr PartyId client(std::uint32_t i) { return {PartyKind::client, i}; }

    [[nodiscard]] bool is_validator() const { return kind == PartyKind::validator; }
    [[nodiscard]] bool is_client() const { return kind == PartyKind::client; }

    friend bool operator==(const PartyId&, const PartyId&) = default;
    friend auto operator<=>(const PartyId&, const PartyId&) = default;
};

inline std::string to_string(PartyId p) {
    return (p.is_validator() ? "v" : "c") + std::to_string(p.index);
}

/// Parses "v3" / "c0".
inline std::optional<PartyId> parse_party(std::string_view s) {
    if (s.size() < 2 || (s[0] != 'v' && s[0] != 'c')) return std::nullopt;
    std::uint32_t idx = 0;
    for (char ch : s.substr(1)) {
        if (ch < '0' || ch > '9') return std::nullopt;
        idx = idx * 10 + static_cast<std::uint32_t>(ch - '0');
    }
    return s[0] == 'v' ? PartyId::validator(idx) : PartyId::client(idx);
}

inline std::ostream& operator<<(std::ostream& os, PartyId p) { return os << to_string(p); }

/// Ordered, immutable set of validator indices with its strict-majority quorum.
class ValidatorSet {
public:
    ValidatorSet() = default;
    explicit ValidatorSet(std::vector<std::uint32_t> members) : members_(std::move(members)) {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    }

    /// {0, ..., n-1}
    static ValidatorSet first_n(std::uint32_t n) {
        std::vector<std::uint32_t> m(n);
        for (std::uint32_t i = 0; i < n; ++i) m[i] = i;
        return ValidatorSet(std::move(m));
    }

    [[nodiscard]] const std::vector<std::uint32_t>& members() const { return members_; }
    [[nodiscard]] std::size_t size() const { return members_.size(); }
    /// Smallest integer strictly greater than size/2.
    [[nodiscard]] std::size_t quorum() const { return members_.size() / 2 + 1; }
    [[nodiscard]] bool contains(std::uint32_t v) const {
        return std::binary_search(members_.begin(), members_.end(), v);
    }
    [[nodiscard]] std::uint32_t at(std::size_t i) const { return members_.at(i); }

    friend bool operator==(const ValidatorSet&, const ValidatorSet&) = default;

private:
    std::vector<std::uint32_t> members_;
};

// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
// Canonical bytes and digests
// ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

using Digest = std::uint64_t;

/// Length-prefixed field concatenation in declaration order, little-endian.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v) {
        bytes_.push_back(v);
        return *this;
    }
    ByteWriter& u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }
    ByteWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
    ByteWriter& str(std::string_view s) {
        u64(s.size());
        bytes_.insert(bytes_.end(), s.begin(), s.end());
        return *this;
    }
    ByteWriter& bytes(std::span<const std::uint8_t> b) {
        u64(b.size());
        bytes_.insert(bytes_.end(), b.begin(), b.end());
        return *this;
    }
    ByteWriter& party(PartyId p) { return u8(static_cast<std::uint8_t>(p.kind)).u64(p.index); }
    ByteWriter& ledger(const Ledger& l) {
        u64(l.size());
        for (TxId id : l.txs) u64(id);
        return *this;
    }
    ByteWriter& valset(const ValidatorSet& vs) {
        u64(vs.size());
        for (auto m : vs.members()) u64(m);
        return *this;
    }

    [[nodiscard]] const std::vector<std::uint8_t>& data() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over the bytes, finalized with a splitmix round.
inline Digest digest_of(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return mix64(h ^ bytes.size());
}

inline Digest digest_of(const ByteWriter& w) { return digest_of(std::span<const std::uint8_t>(w.data())); }

inline std::string hex_digest(Digest d) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = kHex[d & 0xf];
        d >>= 4;
    }
    return s;
}

}  // namespace gadget
