// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "gadget/core.hpp"
#include "gadget/crypto.hpp"

namespace gadget {

/// Identity of one run of the internal protocol. Every signed internal
/// message binds the instance digest, so messages of different instances
/// never cross-validate.
class InstanceId {
public:
    InstanceId() : InstanceId(0, Ledger{}, ValidatorSet{}, 0) {}
    InstanceId(int epoch_tag, Ledger genesis, ValidatorSet valset, Round start_round)
        : epoch_tag_(epoch_tag), genesis_(std::move(genesis)), valset_(std::move(valset)), start_round_(start_round) {
        ByteWriter w;
        encode(w);
        digest_ = digest_of(w);
    }

    [[nodiscard]] int epoch_tag() const { return epoch_tag_; }
    [[nodiscard]] const Ledger& genesis() const { return genesis_; }
    [[nodiscard]] const ValidatorSet& valset() const { return valset_; }
    [[nodiscard]] Round start_round() const { return start_round_; }
    [[nodiscard]] Digest digest() const { return digest_; }

    void encode(ByteWriter& w) const {
        w.str("instance").i64(epoch_tag_).ledger(genesis_).valset(valset_).i64(start_round_);
    }

    friend bool operator==(const InstanceId& a, const InstanceId& b) {
        return a.digest_ == b.digest_ && a.epoch_tag_ == b.epoch_tag_ && a.genesis_ == b.genesis_ &&
               a.valset_ == b.valset_ && a.start_round_ == b.start_round_;
    }

private:
    int epoch_tag_;
    Ledger genesis_;
    ValidatorSet valset_;
    Round start_round_;
    Digest digest_ = 0;
};

/// A validator's signature on its internally finalized ledger.
struct FinalityVote {
    InstanceId instance;
    Ledger ledger;
    Signature sig;

    static ByteWriter signing_bytes(const InstanceId& instance, const Ledger& ledger) {
        ByteWriter w;
        w.str("finality").u64(instance.digest()).ledger(ledger);
        return w;
    }

    static FinalityVote make(const KeyHandle& key, const InstanceId& instance, Ledger ledger) {
        FinalityVote v{instance, std::move(ledger), {}};
        v.sig = sign(key, signing_bytes(v.instance, v.ledger));
        return v;
    }

    [[nodiscard]] PartyId signer() const { return sig.signer; }
};

using VoteRef = std::shared_ptr<const FinalityVote>;

/// Certificate consumed by the witness consumer: a set of finality votes
/// from pairwise-distinct signers, sorted by signer.
struct Witness {
    InstanceId instance;
    std::vector<VoteRef> votes;
};

/// Block of the SimpleSync chain. The hash binds the instance.
struct Block {
    Digest instance = 0;
    std::int64_t epoch = 0;
    std::uint64_t height = 0;
    Digest parent = 0;
    PartyId proposer;
    std::vector<TxId> txs;

    [[nodiscard]] Digest hash() const {
        ByteWriter w;
        w.str("block").u64(instance).i64(epoch).u64(height).u64(parent).party(proposer);
        w.u64(txs.size());
        for (TxId t : txs) w.u64(t);
        return digest_of(w);
    }
};

struct Proposal {
    Block block;
    Digest block_hash = 0;
    Signature sig;

    static ByteWriter signing_bytes(Digest block_hash) {
        ByteWriter w;
        w.str("proposal").u64(block_hash);
        return w;
    }
};

struct BlockVote {
    Digest instance = 0;
    Digest block_hash = 0;
    std::int64_t epoch = 0;
    Signature sig;

    static ByteWriter signing_bytes(Digest instance, Digest block_hash, std::int64_t epoch) {
        ByteWriter w;
        w.str("blockvote").u64(instance).u64(block_hash).i64(epoch);
        return w;
    }
};

struct TxMsg {
    Transaction tx;
};

/// Dolev-Strong signature chain on a bookmarked ledger. Every signature in
/// the chain covers the same content: (context, sender, value).
struct SignatureChain {
    Digest context = 0;
    PartyId sender;
    Ledger value;
    std::vector<Signature> chain;

    static ByteWriter signing_bytes(Digest context, PartyId sender, const Ledger& value) {
        ByteWriter w;
        w.str("bm").u64(context).party(sender).ledger(value);
        return w;
    }
};

/// Vote on the new genesis and restart instance.
struct GenesisVote {
    InstanceId new_instance;
    Signature sig;

    static ByteWriter signing_bytes(const InstanceId& inst) {
        ByteWriter w;
        w.str("genesis").u64(inst.digest());
        return w;
    }

    static GenesisVote make(const KeyHandle& key, const InstanceId& inst) {
        return GenesisVote{inst, sign(key, signing_bytes(inst))};
    }
};

enum class MessageKind : std::uint8_t { tx, proposal, block_vote, finality_vote, witness, ds_chain, genesis_vote };

inline std::string_view to_string(MessageKind k) {
    switch (k) {
        case MessageKind::tx: return "tx";
        case MessageKind::proposal: return "proposal";
        case MessageKind::block_vote: return "block_vote";
        case MessageKind::finality_vote: return "finality_vote";
        case MessageKind::witness: return "witness";
        case MessageKind::ds_chain: return "ds_chain";
        case MessageKind::genesis_vote: return "genesis_vote";
    }
    return "?";
}

/// Immutable protocol message with its canonical digest. Gossip dedups on
/// the digest, so identical content relayed by different parties is one
/// message.
class Message {
public:
    using Body = std::variant<TxMsg, Proposal, BlockVote, VoteRef, Witness, SignatureChain, GenesisVote>;

    explicit Message(Body body) : body_(std::move(body)) {
        ByteWriter w;
        encode(w);
        digest_ = digest_of(w);
    }

    [[nodiscard]] const Body& body() const { return body_; }
    [[nodiscard]] Digest digest() const { return digest_; }
    [[nodiscard]] MessageKind kind() const { return static_cast<MessageKind>(body_.index()); }

    template <class T>
    [[nodiscard]] const T* get() const {
        return std::get_if<T>(&body_);
    }

    /// All signatures the message carries (the network uses this to gate
    /// adversarial injections).
    [[nodiscard]] std::vector<std::pair<Signature, Digest>> carried_signatures() const;

private:
    void encode(ByteWriter& w) const;

    Body body_;
    Digest digest_ = 0;
};

using Payload = std::shared_ptr<const Message>;

template <class T>
Payload make_payload(T body) {
    return std::make_shared<const Message>(Message::Body(std::move(body)));
}

inline void encode_sig(ByteWriter& w, const Signature& s) { w.party(s.signer).u64(s.message_digest).u64(s.tag); }

inline void Message::encode(ByteWriter& w) const {
    w.u8(static_cast<std::uint8_t>(body_.index()));
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TxMsg>) {
                w.u64(m.tx.id).bytes(m.tx.payload).i64(m.tx.submit_round);
            } else if constexpr (std::is_same_v<T, Proposal>) {
                w.u64(m.block_hash).u64(m.block.instance).i64(m.block.epoch).u64(m.block.height).u64(m.block.parent);
                w.party(m.block.proposer).u64(m.block.txs.size());
                for (TxId t : m.block.txs) w.u64(t);
                encode_sig(w, m.sig);
            } else if constexpr (std::is_same_v<T, BlockVote>) {
                w.u64(m.instance).u64(m.block_hash).i64(m.epoch);
                encode_sig(w, m.sig);
            } else if constexpr (std::is_same_v<T, VoteRef>) {
                w.u64(m->instance.digest()).ledger(m->ledger);
                encode_sig(w, m->sig);
            } else if constexpr (std::is_same_v<T, Witness>) {
                m.instance.encode(w);
                w.u64(m.votes.size());
                for (const auto& v : m.votes) {
                    w.u64(v->instance.digest()).ledger(v->ledger);
                    encode_sig(w, v->sig);
                }
            } else if constexpr (std::is_same_v<T, SignatureChain>) {
                w.u64(m.context).party(m.sender).ledger(m.value).u64(m.chain.size());
                for (const auto& s : m.chain) encode_sig(w, s);
            } else if constexpr (std::is_same_v<T, GenesisVote>) {
                m.new_instance.encode(w);
                encode_sig(w, m.sig);
            }
        },
        body_);
}

inline std::vector<std::pair<Signature, Digest>> Message::carried_signatures() const {
    std::vector<std::pair<Signature, Digest>> out;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Proposal>) {
                out.emplace_back(m.sig, digest_of(Proposal::signing_bytes(m.block_hash)));
            } else if constexpr (std::is_same_v<T, BlockVote>) {
                out.emplace_back(m.sig, digest_of(BlockVote::signing_bytes(m.instance, m.block_hash, m.epoch)));
            } else if constexpr (std::is_same_v<T, VoteRef>) {
                out.emplace_back(m->sig, digest_of(FinalityVote::signing_bytes(m->instance, m->ledger)));
            } else if constexpr (std::is_same_v<T, Witness>) {
                for (const auto& v : m.votes) {
                    out.emplace_back(v->sig, digest_of(FinalityVote::signing_bytes(v->instance, v->ledger)));
                }
            } else if constexpr (std::is_same_v<T, SignatureChain>) {
                Digest d = digest_of(SignatureChain::signing_bytes(m.context, m.sender, m.value));
                for (const auto& s : m.chain) out.emplace_back(s, d);
            } else if constexpr (std::is_same_v<T, GenesisVote>) {
                out.emplace_back(m.sig, digest_of(GenesisVote::signing_bytes(m.new_instance)));
            }
        },
        body_);
    return out;
}

}  // namespace gadget
