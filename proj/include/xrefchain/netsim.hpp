#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xrefchain/chain.hpp"
#include "xrefchain/hysteresis.hpp"
#include "xrefchain/protocol.hpp"
#include "xrefchain/types.hpp"

namespace xref {

struct FailureEvent {
    DomainId domain_id = 0;
    std::uint64_t at_round = 0;

    bool operator==(const FailureEvent&) const = default;
};

struct SimConfig {
    std::uint32_t m = 3;
    std::uint32_t nodes_per_domain = 2; // CCN plus miners
    std::uint32_t l = 6;
    std::uint32_t t = 0;
    std::uint8_t difficulty_bits = 8;
    std::uint64_t seed = 1;
    std::uint32_t rounds = 1; // cross-referencing rounds per simulate run
    DomainId initiator = 0;
    std::uint64_t tx_count_per_block = 100;
    std::vector<FailureEvent> failure_schedule;

    // Empty when valid; otherwise one entry per offending field.
    [[nodiscard]] std::vector<std::string> validation_errors() const;

    bool operator==(const SimConfig&) const = default;
};

struct TranscriptEvent {
    enum class Type : std::uint8_t { message = 0, discard = 1, transition = 2, round = 3 };

    Type type = Type::message;
    std::uint64_t round = 0;
    // message / discard
    MessageKind kind = MessageKind::StartCrossRef;
    NodeId from = 0;
    NodeId to = 0;
    std::uint64_t size_bytes = 0;
    // transition
    DomainId domain = 0;
    CcnPhase phase_from = CcnPhase::Idle;
    CcnPhase phase_to = CcnPhase::Idle;
    // round
    std::uint32_t phase_label = 0; // 1, 2, 3
};

// Synchronous complete-graph Layer-0 world. Messages enqueued during round r
// are delivered exactly at round r+1; failed nodes send and receive nothing.
struct SimWorld {
    SimConfig config;
    std::vector<CcnState> ccn_nodes; // index == domain id
    std::vector<PcnState> pcn_nodes;
    std::map<DomainId, DomainChain> chains;
    std::vector<std::vector<Message>> inboxes;  // indexed by node id
    std::vector<std::vector<Message>> outboxes; // indexed by node id
    std::uint64_t round_counter = 0;
    RoundMetrics metrics;
    ReferenceIndex reference_index;
    std::vector<TranscriptEvent> transcript;
    bool transcript_enabled = true;

    // In-flight round bookkeeping (managed by the protocol layer).
    bool round_active = false;
    bool abort_flag = false;
    std::uint64_t protocol_start_round = 0;

    // Node-id layout: CCNs occupy [0, m); the miners of domain d follow at
    // m + d*(nodes_per_domain-1) + k.
    [[nodiscard]] NodeId ccn_node(DomainId domain) const { return domain; }
    [[nodiscard]] std::optional<NodeId> miner_node(DomainId domain) const;
    [[nodiscard]] std::size_t node_count() const;
    [[nodiscard]] bool is_ccn(NodeId node) const { return node < config.m; }
    [[nodiscard]] DomainId node_domain(NodeId node) const;

    // A node is failed at round r iff its domain's CCN has a scheduled
    // failure with at_round <= r. Miners never fail.
    [[nodiscard]] bool node_failed_at(NodeId node, std::uint64_t round) const;

    [[nodiscard]] std::map<DomainId, Bytes> public_keys() const;
    [[nodiscard]] std::map<DomainId, HysteresisChain> hysteresis_chains() const;
};

// Builds a deterministic world: per-domain keypairs and chains pre-mined to
// height l+1 so an l-confirmed block exists. Throws std::invalid_argument
// enumerating every invalid config field.
[[nodiscard]] SimWorld build_world(const SimConfig& config);

// Advances the round counter, triggers scheduled failures, then moves every
// outbox to the receivers' inboxes with byte/message accounting. Discards
// (never silently drops) traffic of failed senders and receivers.
void deliver_round(SimWorld& world);

// Enqueues one message; returns 1, or 0 if the sender is already failed.
std::size_t send_message(SimWorld& world, NodeId sender, NodeId receiver, MessageKind kind,
                         MessagePayload payload);

// Enqueues a copy to every other CCN; returns the number enqueued.
std::size_t broadcast_to_ccns(SimWorld& world, NodeId sender, MessageKind kind,
                              const MessagePayload& payload);

} // namespace xref
