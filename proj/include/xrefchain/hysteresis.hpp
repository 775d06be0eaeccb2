#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "xrefchain/crypto.hpp"
#include "xrefchain/types.hpp"

namespace xref {

// All-zero digest used as the previous-summary of a chain's first entry.
inline constexpr HashDigest kGenesisSummary{};

struct DomainDigest {
    DomainId domain_id = 0;
    HashDigest digest{};

    bool operator==(const DomainDigest&) const = default;
};

// One link of the nested signature chain: a signature over the summary of
// the previous entry concatenated with every domain's block digest. The
// nesting makes each entry vouch for the whole history before it.
struct HysteresisSignature {
    SequenceNumber sequence_number = 0;
    HashDigest previous_summary{};
    std::vector<DomainDigest> content_digests; // ascending domain_id
    DomainId signer = 0;
    Signature signature;

    // Byte layout placed under the signature:
    //   u64be sequence_number || previous_summary ||
    //   u32be count || (u32be domain_id || digest)*
    [[nodiscard]] Bytes signed_payload() const;

    // Full serialization including signer and signature bytes; its hash is
    // what the successor stores as previous_summary.
    [[nodiscard]] Bytes canonical_bytes() const;

    [[nodiscard]] HashDigest summary() const { return hash(as_span(canonical_bytes())); }

    [[nodiscard]] const HashDigest* digest_for(DomainId domain) const;

    bool operator==(const HysteresisSignature&) const = default;
};

struct HysteresisChain {
    HashDigest genesis_summary = kGenesisSummary;
    std::vector<HysteresisSignature> entries;

    bool operator==(const HysteresisChain&) const = default;
};

// Creates the successor entry of `chain` (or its genesis entry when empty),
// signed with `key`. Digests are sorted by domain id before signing.
// Throws std::invalid_argument("duplicate domain") / ("no content").
[[nodiscard]] HysteresisSignature create_signature(const KeyPair& key, DomainId signer,
                                                   const HysteresisChain& chain,
                                                   std::vector<DomainDigest> block_digests);

// True iff the signature verifies over the canonical payload and the content
// list is well-formed (non-empty, strictly ascending domain ids).
[[nodiscard]] bool verify_entry(const HysteresisSignature& entry,
                                std::span<const std::uint8_t> signer_public_key);

enum class ChainFault {
    bad_signature,
    broken_link,
    bad_sequence,
};

struct ChainVerificationReport {
    bool valid = true;
    std::size_t first_broken_index = 0;
    ChainFault cause = ChainFault::bad_signature;

    static ChainVerificationReport ok() { return {}; }
    static ChainVerificationReport broken(std::size_t index, ChainFault fault) {
        return {false, index, fault};
    }
};

[[nodiscard]] ChainVerificationReport verify_chain(
    const HysteresisChain& chain, const std::map<DomainId, Bytes>& signer_public_keys);

// Maps each cross-referencing round to the (domain, height) pairs whose
// l-confirmed digests it covered. Hysteresis entries carry only digests, so
// this run-produced index is what ties an audited height back to its round.
class ReferenceIndex {
public:
    void record(SequenceNumber round, DomainId domain, BlockHeight height);

    [[nodiscard]] std::optional<SequenceNumber> round_covering(DomainId domain,
                                                               BlockHeight height) const;
    [[nodiscard]] std::optional<BlockHeight> height_of(SequenceNumber round,
                                                       DomainId domain) const;

    [[nodiscard]] const std::map<SequenceNumber, std::map<DomainId, BlockHeight>>& rounds()
        const {
        return rounds_;
    }

    bool operator==(const ReferenceIndex&) const = default;

private:
    std::map<SequenceNumber, std::map<DomainId, BlockHeight>> rounds_;
};

enum class AuditVote {
    consistent,
    conflicting,
    no_evidence,
};

struct AuditReport {
    // True iff a covering round exists and every foreign domain's chain holds
    // verifiable evidence matching the local digest.
    bool consistent = false;
    std::optional<SequenceNumber> round;
    std::vector<DomainId> conflicting_domains;
    std::vector<DomainId> no_evidence_domains;
};

// Checks the local digest of (target_domain, target_height) against the
// evidence recorded in every foreign hysteresis chain. A foreign chain that
// fails verification at or before the matching entry, or lacks the entry,
// contributes "no evidence" rather than "conflicting".
[[nodiscard]] AuditReport cross_domain_audit(
    DomainId target_domain, BlockHeight target_height, const HashDigest& local_digest,
    const std::map<DomainId, HysteresisChain>& foreign_chains,
    const std::map<DomainId, Bytes>& signer_public_keys, const ReferenceIndex& index);

} // namespace xref
