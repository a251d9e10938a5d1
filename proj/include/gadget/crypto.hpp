// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "gadget/core.hpp"

namespace gadget {

/// Simulated signature: signer, digest of the signed bytes and a tag that
/// only the holder of the signer's key handle can compute.
struct Signature {
    PartyId signer;
    Digest message_digest = 0;
    std::uint64_t tag = 0;

    friend bool operator==(const Signature&, const Signature&) = default;
};

class KeyRegistry;

/// Capability to sign as one validator. Only a KeyRegistry can mint one;
/// the simulator hands it to the validator's honest logic and, after
/// corruption, to the adversary.
class KeyHandle {
public:
    [[nodiscard]] PartyId owner() const { return owner_; }

private:
    friend class KeyRegistry;
    friend Signature sign(const KeyHandle& key, const ByteWriter& message);
    KeyHandle(PartyId owner, std::uint64_t secret) : owner_(owner), secret_(secret) {}

    PartyId owner_;
    std::uint64_t secret_;
};

namespace detail {
inline std::uint64_t signature_tag(std::uint64_t secret, Digest d) { return mix64(secret ^ mix64(d)); }
}  // namespace detail

inline Signature sign(const KeyHandle& key, const ByteWriter& message) {
    Digest d = digest_of(message);
    return Signature{key.owner_, d, detail::signature_tag(key.secret_, d)};
}

/// Public-key directory for all validators of a scenario.
class KeyRegistry {
public:
    KeyRegistry() = default;
    KeyRegistry(std::uint32_t n_validators, std::uint64_t seed) {
        for (std::uint32_t i = 0; i < n_validators; ++i) {
            secrets_.push_back(mix64(seed ^ mix64(0x6b657973ULL + i)));
        }
    }

    [[nodiscard]] std::size_t size() const { return secrets_.size(); }

    /// Mints the signing capability for validator `index`. The simulator is
    /// the only caller.
    [[nodiscard]] KeyHandle issue(std::uint32_t index) const {
        if (index >= secrets_.size()) throw std::out_of_range("no such validator key");
        return KeyHandle(PartyId::validator(index), secrets_[index]);
    }

    [[nodiscard]] bool verify(PartyId signer, const ByteWriter& message, const Signature& sig) const {
        return verify_digest(signer, digest_of(message), sig);
    }

    [[nodiscard]] bool verify_digest(PartyId signer, Digest d, const Signature& sig) const {
        if (!signer.is_validator() || signer.index >= secrets_.size()) return false;
        if (sig.signer != signer || sig.message_digest != d) return false;
        return sig.tag == detail::signature_tag(secrets_[signer.index], d);
    }

private:
    std::vector<std::uint64_t> secrets_;
};

}  // namespace gadget
