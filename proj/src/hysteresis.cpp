#include "xrefchain/hysteresis.hpp"

#include <algorithm>
#include <stdexcept>

#include "xrefchain/bytes.hpp"

namespace xref {

namespace {

bool strictly_ascending(const std::vector<DomainDigest>& digests) {
    for (std::size_t i = 1; i < digests.size(); ++i) {
        if (digests[i - 1].domain_id >= digests[i].domain_id) {
            return false;
        }
    }
    return true;
}

} // namespace

Bytes HysteresisSignature::signed_payload() const {
    ByteWriter w;
    w.u64be(sequence_number);
    w.raw(as_span(previous_summary));
    w.u32be(static_cast<std::uint32_t>(content_digests.size()));
    for (const DomainDigest& d : content_digests) {
        w.u32be(d.domain_id);
        w.raw(as_span(d.digest));
    }
    return w.take();
}

Bytes HysteresisSignature::canonical_bytes() const {
    ByteWriter w;
    w.raw(as_span(signed_payload()));
    w.u32be(signer);
    w.u32be(static_cast<std::uint32_t>(signature.bytes.size()));
    w.raw(as_span(signature.bytes));
    return w.take();
}

const HashDigest* HysteresisSignature::digest_for(DomainId domain) const {
    const auto it = std::lower_bound(
        content_digests.begin(), content_digests.end(), domain,
        [](const DomainDigest& d, DomainId id) { return d.domain_id < id; });
    if (it == content_digests.end() || it->domain_id != domain) {
        return nullptr;
    }
    return &it->digest;
}

HysteresisSignature create_signature(const KeyPair& key, DomainId signer,
                                     const HysteresisChain& chain,
                                     std::vector<DomainDigest> block_digests) {
    if (block_digests.empty()) {
        throw std::invalid_argument("no content");
    }
    std::sort(block_digests.begin(), block_digests.end(),
              [](const DomainDigest& a, const DomainDigest& b) {
                  return a.domain_id < b.domain_id;
              });
    if (!strictly_ascending(block_digests)) {
        throw std::invalid_argument("duplicate domain");
    }

    HysteresisSignature entry;
    if (chain.entries.empty()) {
        entry.sequence_number = 0;
        entry.previous_summary = chain.genesis_summary;
    } else {
        const HysteresisSignature& prev = chain.entries.back();
        entry.sequence_number = prev.sequence_number + 1;
        entry.previous_summary = prev.summary();
    }
    entry.content_digests = std::move(block_digests);
    entry.signer = signer;
    entry.signature = sign(key, as_span(entry.signed_payload()));
    return entry;
}

bool verify_entry(const HysteresisSignature& entry,
                  std::span<const std::uint8_t> signer_public_key) {
    if (entry.content_digests.empty() || !strictly_ascending(entry.content_digests)) {
        return false;
    }
    return verify(signer_public_key, as_span(entry.signed_payload()), entry.signature);
}

ChainVerificationReport verify_chain(const HysteresisChain& chain,
                                     const std::map<DomainId, Bytes>& signer_public_keys) {
    for (std::size_t i = 0; i < chain.entries.size(); ++i) {
        const HysteresisSignature& entry = chain.entries[i];
        if (i > 0 &&
            entry.sequence_number != chain.entries[i - 1].sequence_number + 1) {
            return ChainVerificationReport::broken(i, ChainFault::bad_sequence);
        }
        const HashDigest expected_summary =
            i == 0 ? chain.genesis_summary : chain.entries[i - 1].summary();
        if (entry.previous_summary != expected_summary) {
            return ChainVerificationReport::broken(i, ChainFault::broken_link);
        }
        const auto key = signer_public_keys.find(entry.signer);
        if (key == signer_public_keys.end() ||
            !verify_entry(entry, as_span(key->second))) {
            return ChainVerificationReport::broken(i, ChainFault::bad_signature);
        }
    }
    return ChainVerificationReport::ok();
}

void ReferenceIndex::record(SequenceNumber round, DomainId domain, BlockHeight height) {
    rounds_[round][domain] = height;
}

std::optional<SequenceNumber> ReferenceIndex::round_covering(DomainId domain,
                                                             BlockHeight height) const {
    for (const auto& [round, refs] : rounds_) {
        const auto it = refs.find(domain);
        if (it != refs.end() && it->second == height) {
            return round;
        }
    }
    return std::nullopt;
}

std::optional<BlockHeight> ReferenceIndex::height_of(SequenceNumber round,
                                                     DomainId domain) const {
    const auto round_it = rounds_.find(round);
    if (round_it == rounds_.end()) {
        return std::nullopt;
    }
    const auto it = round_it->second.find(domain);
    if (it == round_it->second.end()) {
        return std::nullopt;
    }
    return it->second;
}

AuditReport cross_domain_audit(DomainId target_domain, BlockHeight target_height,
                               const HashDigest& local_digest,
                               const std::map<DomainId, HysteresisChain>& foreign_chains,
                               const std::map<DomainId, Bytes>& signer_public_keys,
                               const ReferenceIndex& index) {
    AuditReport report;
    report.round = index.round_covering(target_domain, target_height);
    if (!report.round.has_value()) {
        // Height was never cross-referenced: no foreign chain can witness it.
        for (const auto& [domain, chain] : foreign_chains) {
            if (domain != target_domain) {
                report.no_evidence_domains.push_back(domain);
            }
        }
        report.consistent = false;
        return report;
    }

    for (const auto& [domain, chain] : foreign_chains) {
        if (domain == target_domain) {
            continue;
        }
        const auto entry_it = std::find_if(
            chain.entries.begin(), chain.entries.end(),
            [&](const HysteresisSignature& e) { return e.sequence_number == *report.round; });
        if (entry_it == chain.entries.end()) {
            report.no_evidence_domains.push_back(domain);
            continue;
        }
        const std::size_t entry_index =
            static_cast<std::size_t>(entry_it - chain.entries.begin());
        const ChainVerificationReport chain_report = verify_chain(chain, signer_public_keys);
        if (!chain_report.valid && chain_report.first_broken_index <= entry_index) {
            // The would-be witness does not itself verify; it proves nothing.
            report.no_evidence_domains.push_back(domain);
            continue;
        }
        const HashDigest* recorded = entry_it->digest_for(target_domain);
        if (recorded == nullptr) {
            report.no_evidence_domains.push_back(domain);
            continue;
        }
        if (*recorded != local_digest) {
            report.conflicting_domains.push_back(domain);
        }
    }

    report.consistent =
        report.conflicting_domains.empty() && report.no_evidence_domains.empty();
    return report;
}

} // namespace xref
