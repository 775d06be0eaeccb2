#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xrefchain/crypto.hpp"
#include "xrefchain/hysteresis.hpp"
#include "xrefchain/types.hpp"

namespace xref {

// Per-domain block. Transactions are abstracted to a payload summary and a
// count; the cross_reference part is present only on blocks minted during a
// cross-referencing round.
struct Block {
    BlockHeight height = 0;
    DomainId domain_id = 0;
    HashDigest previous_hash{};
    HashDigest payload_summary{};
    std::uint64_t tx_count = 0;
    std::uint64_t nonce = 0;
    std::uint8_t difficulty_bits = 0;
    std::optional<HysteresisSignature> cross_reference;

    [[nodiscard]] Bytes canonical_bytes() const;

    bool operator==(const Block&) const = default;
};

[[nodiscard]] HashDigest block_hash(const Block& block);

[[nodiscard]] bool meets_difficulty(const HashDigest& digest, std::uint8_t difficulty_bits);

struct DomainChain {
    DomainId domain_id = 0;
    std::uint8_t difficulty_bits = 0;
    std::vector<Block> blocks; // contiguous heights from 0

    [[nodiscard]] bool empty() const { return blocks.empty(); }
    [[nodiscard]] const Block& tip() const { return blocks.back(); }
    [[nodiscard]] BlockHeight tip_height() const { return blocks.back().height; }

    bool operator==(const DomainChain&) const = default;
};

// Mines the next block of `chain` at the chain's difficulty. The nonce search
// starts from a seed-derived value and increments, so the result is a pure
// function of (chain, inputs, seed). Keep difficulty_bits <= 20 at desk scale.
[[nodiscard]] Block mine_block(const DomainChain& chain, const HashDigest& payload_summary,
                               std::uint64_t tx_count,
                               std::optional<HysteresisSignature> cross_reference,
                               std::uint64_t rng_seed);

// Block approved l blocks before the tip; l = 0 returns the tip itself.
// Throws std::out_of_range("insufficient confirmations") if the chain is
// shorter than l + 1 blocks.
[[nodiscard]] const Block& l_confirmed_block(const DomainChain& chain, std::uint64_t l);

enum class ChainInvalidCause {
    bad_height,
    bad_domain,
    bad_link,
    bad_pow,
};

struct ChainValidationReport {
    bool valid = true;
    BlockHeight first_invalid_height = 0;
    ChainInvalidCause cause = ChainInvalidCause::bad_link;

    static ChainValidationReport ok() { return {}; }
    static ChainValidationReport broken(BlockHeight height, ChainInvalidCause cause) {
        return {false, height, cause};
    }
};

[[nodiscard]] ChainValidationReport validate_chain(const DomainChain& chain);

// Adversary harness: replaces the payload at `height` and, when `remine` is
// set, re-mines every block from there to the tip so local validation passes
// again. Cross-reference parts are preserved as-is, which is exactly why a
// cross-domain audit still detects the change. Throws
// std::out_of_range("height out of range").
[[nodiscard]] DomainChain tamper_block(DomainChain chain, BlockHeight height,
                                       const HashDigest& new_payload_summary, bool remine,
                                       std::uint64_t rng_seed = 0);

} // namespace xref
