#include "xrefchain/crypto.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "xrefchain/bytes.hpp"
#include "xrefchain/rng.hpp"

namespace xref {

HashDigest hash(std::span<const std::uint8_t> data) {
    HashDigest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != kDigestSize) {
        throw std::runtime_error("sha256 digest failed");
    }
    return out;
}

HashDigest hash(std::string_view data) {
    return hash(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

int leading_zero_bits(const HashDigest& digest) {
    int bits = 0;
    for (std::uint8_t byte : digest) {
        if (byte == 0) {
            bits += 8;
            continue;
        }
        for (int b = 7; b >= 0; --b) {
            if ((byte >> b) & 1) {
                return bits;
            }
            ++bits;
        }
    }
    return bits;
}

namespace {

HashDigest tagged_hash(std::string_view tag, std::span<const std::uint8_t> a,
                       std::span<const std::uint8_t> b = {}) {
    ByteWriter w;
    w.u32be(static_cast<std::uint32_t>(tag.size()));
    w.raw(tag);
    w.raw(a);
    w.raw(b);
    return hash(as_span(w.bytes()));
}

// Keyed-hash mock: public key is a one-way derivation of the private key and
// a signature is two tagged hashes over (public key, message). Deterministic
// and verifiable with the public part only; not unforgeable, which is fine
// for a simulator.
class MockScheme final : public SignatureScheme {
public:
    SchemeId id() const override { return SchemeId::mock; }

    KeyPair generate(std::uint64_t seed) const override {
        ByteWriter w;
        w.u64be(seed);
        const HashDigest priv = tagged_hash("xrefchain/mock/priv", as_span(w.bytes()));
        const HashDigest pub = tagged_hash("xrefchain/mock/pub", as_span(priv));
        KeyPair kp;
        kp.private_key.assign(priv.begin(), priv.end());
        kp.public_key.assign(pub.begin(), pub.end());
        kp.scheme_id = SchemeId::mock;
        return kp;
    }

    Signature sign(const KeyPair& key, std::span<const std::uint8_t> message) const override {
        if (key.private_key.empty()) {
            throw std::invalid_argument("signing key unavailable");
        }
        // Derive the verification key from the private part so a corrupted
        // public field cannot produce signatures that verify.
        const HashDigest pub = tagged_hash("xrefchain/mock/pub", as_span(key.private_key));
        Signature sig;
        sig.scheme_id = SchemeId::mock;
        sig.bytes = signature_bytes(as_span(pub), message);
        return sig;
    }

    bool verify(std::span<const std::uint8_t> public_key, std::span<const std::uint8_t> message,
                const Signature& signature) const override {
        if (signature.scheme_id != SchemeId::mock) {
            return false;
        }
        if (signature.bytes.size() != 2 * kDigestSize) {
            return false;
        }
        return signature.bytes == signature_bytes(public_key, message);
    }

private:
    static Bytes signature_bytes(std::span<const std::uint8_t> public_key,
                                 std::span<const std::uint8_t> message) {
        const HashDigest lo = tagged_hash("xrefchain/mock/sig0", public_key, message);
        const HashDigest hi = tagged_hash("xrefchain/mock/sig1", public_key, message);
        Bytes out(lo.begin(), lo.end());
        out.insert(out.end(), hi.begin(), hi.end());
        return out;
    }
};

} // namespace

const SignatureScheme& mock_scheme() {
    static const MockScheme scheme;
    return scheme;
}

KeyPair generate_keypair(std::uint64_t seed) {
    return mock_scheme().generate(seed);
}

Signature sign(const KeyPair& key, std::span<const std::uint8_t> message) {
    return mock_scheme().sign(key, message);
}

bool verify(std::span<const std::uint8_t> public_key, std::span<const std::uint8_t> message,
            const Signature& signature) {
    return mock_scheme().verify(public_key, message, signature);
}

} // namespace xref
