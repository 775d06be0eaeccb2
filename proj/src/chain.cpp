#include "xrefchain/chain.hpp"

#include <stdexcept>

#include "xrefchain/bytes.hpp"
#include "xrefchain/rng.hpp"

namespace xref {

Bytes Block::canonical_bytes() const {
    ByteWriter w;
    w.u64be(height);
    w.u32be(domain_id);
    w.raw(as_span(previous_hash));
    w.raw(as_span(payload_summary));
    w.u64be(tx_count);
    w.u64be(nonce);
    w.u8(difficulty_bits);
    if (cross_reference.has_value()) {
        w.u8(1);
        w.raw(as_span(cross_reference->canonical_bytes()));
    } else {
        w.u8(0);
    }
    return w.take();
}

HashDigest block_hash(const Block& block) {
    return hash(as_span(block.canonical_bytes()));
}

bool meets_difficulty(const HashDigest& digest, std::uint8_t difficulty_bits) {
    return leading_zero_bits(digest) >= difficulty_bits;
}

Block mine_block(const DomainChain& chain, const HashDigest& payload_summary,
                 std::uint64_t tx_count, std::optional<HysteresisSignature> cross_reference,
                 std::uint64_t rng_seed) {
    Block block;
    block.domain_id = chain.domain_id;
    block.difficulty_bits = chain.difficulty_bits;
    block.payload_summary = payload_summary;
    block.tx_count = tx_count;
    block.cross_reference = std::move(cross_reference);
    if (chain.empty()) {
        block.height = 0;
        block.previous_hash = HashDigest{};
    } else {
        block.height = chain.tip_height() + 1;
        block.previous_hash = block_hash(chain.tip());
    }

    std::uint64_t state = rng_seed;
    block.nonce = splitmix64(state);
    while (!meets_difficulty(block_hash(block), block.difficulty_bits)) {
        ++block.nonce;
    }
    return block;
}

const Block& l_confirmed_block(const DomainChain& chain, std::uint64_t l) {
    if (chain.blocks.size() < l + 1) {
        throw std::out_of_range("insufficient confirmations");
    }
    return chain.blocks[chain.blocks.size() - 1 - l];
}

ChainValidationReport validate_chain(const DomainChain& chain) {
    for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
        const Block& block = chain.blocks[i];
        if (block.height != i) {
            return ChainValidationReport::broken(i, ChainInvalidCause::bad_height);
        }
        if (block.domain_id != chain.domain_id) {
            return ChainValidationReport::broken(i, ChainInvalidCause::bad_domain);
        }
        const HashDigest expected_prev =
            i == 0 ? HashDigest{} : block_hash(chain.blocks[i - 1]);
        if (block.previous_hash != expected_prev) {
            return ChainValidationReport::broken(i, ChainInvalidCause::bad_link);
        }
        if (!meets_difficulty(block_hash(block), block.difficulty_bits)) {
            return ChainValidationReport::broken(i, ChainInvalidCause::bad_pow);
        }
    }
    return ChainValidationReport::ok();
}

DomainChain tamper_block(DomainChain chain, BlockHeight height,
                         const HashDigest& new_payload_summary, bool remine,
                         std::uint64_t rng_seed) {
    if (chain.empty() || height > chain.tip_height()) {
        throw std::out_of_range("height out of range");
    }
    chain.blocks[height].payload_summary = new_payload_summary;
    if (!remine) {
        return chain;
    }
    for (BlockHeight h = height; h <= chain.tip_height(); ++h) {
        Block& block = chain.blocks[h];
        block.previous_hash = h == 0 ? HashDigest{} : block_hash(chain.blocks[h - 1]);
        std::uint64_t state = derive_seed(rng_seed, h);
        block.nonce = splitmix64(state);
        while (!meets_difficulty(block_hash(block), block.difficulty_bits)) {
            ++block.nonce;
        }
    }
    return chain;
}

} // namespace xref
