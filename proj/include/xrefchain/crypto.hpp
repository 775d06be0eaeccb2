#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "xrefchain/types.hpp"

namespace xref {

inline constexpr std::size_t kDigestSize = 32;

using HashDigest = std::array<std::uint8_t, kDigestSize>;

// SHA-256 of an arbitrary octet sequence (total, pure; empty input allowed).
[[nodiscard]] HashDigest hash(std::span<const std::uint8_t> data);
[[nodiscard]] HashDigest hash(std::string_view data);

[[nodiscard]] int leading_zero_bits(const HashDigest& digest);

enum class SchemeId : std::uint8_t {
    mock = 0,
    external = 1,
};

struct Signature {
    Bytes bytes;
    SchemeId scheme_id = SchemeId::mock;

    bool operator==(const Signature&) const = default;
};

struct KeyPair {
    Bytes public_key;
    Bytes private_key;
    SchemeId scheme_id = SchemeId::mock;
};

// Pluggable signature backend. The shipped default is a seeded keyed-hash
// mock so simulation runs are bit-reproducible; swap in a real scheme by
// implementing this interface.
class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;

    [[nodiscard]] virtual SchemeId id() const = 0;
    [[nodiscard]] virtual KeyPair generate(std::uint64_t seed) const = 0;
    [[nodiscard]] virtual Signature sign(const KeyPair& key,
                                         std::span<const std::uint8_t> message) const = 0;
    [[nodiscard]] virtual bool verify(std::span<const std::uint8_t> public_key,
                                      std::span<const std::uint8_t> message,
                                      const Signature& signature) const = 0;
};

[[nodiscard]] const SignatureScheme& mock_scheme();

// Convenience entry points bound to the default (mock) scheme.
[[nodiscard]] KeyPair generate_keypair(std::uint64_t seed);

// Throws std::invalid_argument("signing key unavailable") if the private
// part is missing.
[[nodiscard]] Signature sign(const KeyPair& key, std::span<const std::uint8_t> message);

// Never throws: malformed signature bytes or an unknown scheme yield false.
[[nodiscard]] bool verify(std::span<const std::uint8_t> public_key,
                          std::span<const std::uint8_t> message,
                          const Signature& signature);

[[nodiscard]] inline std::span<const std::uint8_t> as_span(const Bytes& b) {
    return {b.data(), b.size()};
}

[[nodiscard]] inline std::span<const std::uint8_t> as_span(const HashDigest& d) {
    return {d.data(), d.size()};
}

} // namespace xref
