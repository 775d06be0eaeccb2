#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "xrefchain/chain.hpp"
#include "xrefchain/crypto.hpp"
#include "xrefchain/hysteresis.hpp"
#include "xrefchain/types.hpp"

namespace xref {

struct SimWorld; // netsim.hpp

// ---------------------------------------------------------------------------
// Layer-0 wire messages
// ---------------------------------------------------------------------------

enum class MessageKind : std::uint8_t {
    StartCrossRef = 0, // round kickoff; also reused as a targeted record re-request
    BlockRecord = 1,
    MineRequest = 2,
    MinedBlock = 3,
    Announce = 4,
};

struct StartPayload {
    DomainId initiator = 0;
    SequenceNumber round_seq = 0;
};

struct BlockRecordPayload {
    DomainId domain_id = 0;
    BlockHeight height = 0;
    HashDigest digest{};
};

struct MineRequestPayload {
    HysteresisSignature entry;
    HashDigest payload_summary{};
    std::uint64_t tx_count = 0;
};

struct MinedBlockPayload {
    Block block;
};

struct AnnouncePayload {
    Block block;
};

using MessagePayload = std::variant<StartPayload, BlockRecordPayload, MineRequestPayload,
                                    MinedBlockPayload, AnnouncePayload>;

// Canonical binary form; its length is the message's size_bytes.
[[nodiscard]] Bytes payload_bytes(const MessagePayload& payload);

struct Message {
    MessageKind kind = MessageKind::StartCrossRef;
    NodeId sender = 0;
    NodeId receiver = 0;
    std::uint64_t round = 0; // round at which the message was enqueued
    MessagePayload payload;
    std::uint64_t size_bytes = 0;
};

// ---------------------------------------------------------------------------
// Node state machines
// ---------------------------------------------------------------------------

enum class CcnPhase : std::uint8_t {
    Idle = 0,
    Phase1Collecting = 1,
    Phase2Mining = 2,
    Phase3Announcing = 3,
    Done = 4,
    Failed = 5,
};

struct CcnState {
    DomainId domain_id = 0;
    NodeId node_id = 0;
    CcnPhase phase = CcnPhase::Idle;
    std::map<DomainId, HashDigest> collected_records;
    std::map<DomainId, BlockHeight> collected_heights;
    std::uint32_t l = 6;
    KeyPair keypair;
    HysteresisChain hysteresis_chain;
    std::uint32_t retry_budget = 1; // t+1 Phase-1 collection attempts

    // Transient per-round bookkeeping.
    std::uint32_t attempts_used = 0;
    SequenceNumber current_round_seq = 0;
    std::uint64_t announce_round = 0;
    std::optional<HysteresisSignature> pending_entry;
};

struct PcnState {
    DomainId domain_id = 0;
    NodeId node_id = 0;
    std::optional<MineRequestPayload> pending_request;
};

struct RoundMetrics {
    std::uint64_t messages_total = 0;     // delivered
    std::uint64_t bytes_total = 0;        // delivered payload bytes
    std::uint64_t messages_sent = 0;      // enqueued by live nodes
    std::uint64_t messages_discarded = 0; // dropped by sender or receiver failure
    std::uint64_t phase1_messages = 0;    // sent, classified by message kind
    std::uint64_t phase2_messages = 0;
    std::uint64_t phase3_messages = 0;
    std::uint64_t phase1_rounds = 0; // T1
    std::uint64_t phase2_rounds = 0; // T2
    std::uint64_t phase3_rounds = 0; // T3
    std::set<DomainId> completed_domains;

    [[nodiscard]] RoundMetrics delta_since(const RoundMetrics& earlier) const;
};

// ---------------------------------------------------------------------------
// Protocol operations
// ---------------------------------------------------------------------------

enum class OutcomeStatus : std::uint8_t {
    success = 0,
    aborted_tolerance_exceeded = 1,
    flowchart1_assumption_violated = 2,
    stalled = 3, // kickoff lost (e.g. initiator failed mid-broadcast)
};

[[nodiscard]] const char* to_string(OutcomeStatus status);

struct ProtocolOutcome {
    OutcomeStatus status = OutcomeStatus::success;
    RoundMetrics metrics; // this run only
    SequenceNumber round_sequence = 0;
    std::map<DomainId, Block> mined_blocks; // per completing domain
};

// Kicks off one cross-referencing round: the initiator notifies every other
// CCN and sends out its own l-confirmed record. Returns the round's
// hysteresis sequence number. Throws std::invalid_argument("initiator
// unavailable") if the initiator has failed, std::logic_error if a round is
// already in progress.
SequenceNumber start_cross_reference(SimWorld& world, DomainId initiator);

// One synchronous round: delivers last round's messages, advances every live
// node's state machine, applies Phase-1 deadline decisions. Returns the
// metrics delta for this round.
RoundMetrics step_round(SimWorld& world);

// Flowchart 1: no stop failures tolerated. Any CCN failure during the run
// yields status flowchart1_assumption_violated.
ProtocolOutcome run_flowchart1(SimWorld& world, DomainId initiator, std::uint32_t l);

// Flowchart 2: tolerates up to t stop failures via (t+1) Phase-1 collection
// attempts. A live CCN left with fewer than m-t records after the final
// attempt makes the round abort and every live CCN returns to Idle.
ProtocolOutcome run_flowchart2(SimWorld& world, DomainId initiator, std::uint32_t l,
                               std::uint32_t t);

// Marks a domain's CCN as stop-failed from `at_round` onward. Throws
// std::invalid_argument("unknown domain").
void inject_stop_failure(SimWorld& world, DomainId domain, std::uint64_t at_round);

} // namespace xref
