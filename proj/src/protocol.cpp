#include "xrefchain/protocol.hpp"

#include <algorithm>
#include <stdexcept>

#include "xrefchain/bytes.hpp"
#include "xrefchain/netsim.hpp"
#include "xrefchain/rng.hpp"

namespace xref {

Bytes payload_bytes(const MessagePayload& payload) {
    ByteWriter w;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StartPayload>) {
                w.u8(0);
                w.u32be(p.initiator);
                w.u64be(p.round_seq);
            } else if constexpr (std::is_same_v<T, BlockRecordPayload>) {
                w.u8(1);
                w.u32be(p.domain_id);
                w.u64be(p.height);
                w.raw(as_span(p.digest));
            } else if constexpr (std::is_same_v<T, MineRequestPayload>) {
                w.u8(2);
                w.raw(as_span(p.entry.canonical_bytes()));
                w.raw(as_span(p.payload_summary));
                w.u64be(p.tx_count);
            } else if constexpr (std::is_same_v<T, MinedBlockPayload>) {
                w.u8(3);
                w.raw(as_span(p.block.canonical_bytes()));
            } else {
                w.u8(4);
                w.raw(as_span(p.block.canonical_bytes()));
            }
        },
        payload);
    return w.take();
}

RoundMetrics RoundMetrics::delta_since(const RoundMetrics& earlier) const {
    RoundMetrics d;
    d.messages_total = messages_total - earlier.messages_total;
    d.bytes_total = bytes_total - earlier.bytes_total;
    d.messages_sent = messages_sent - earlier.messages_sent;
    d.messages_discarded = messages_discarded - earlier.messages_discarded;
    d.phase1_messages = phase1_messages - earlier.phase1_messages;
    d.phase2_messages = phase2_messages - earlier.phase2_messages;
    d.phase3_messages = phase3_messages - earlier.phase3_messages;
    d.phase1_rounds = phase1_rounds - earlier.phase1_rounds;
    d.phase2_rounds = phase2_rounds - earlier.phase2_rounds;
    d.phase3_rounds = phase3_rounds - earlier.phase3_rounds;
    for (DomainId domain : completed_domains) {
        if (!earlier.completed_domains.contains(domain)) {
            d.completed_domains.insert(domain);
        }
    }
    return d;
}

const char* to_string(OutcomeStatus status) {
    switch (status) {
        case OutcomeStatus::success:
            return "success";
        case OutcomeStatus::aborted_tolerance_exceeded:
            return "aborted: tolerance exceeded";
        case OutcomeStatus::flowchart1_assumption_violated:
            return "flowchart1 assumption violated";
        case OutcomeStatus::stalled:
            return "stalled";
    }
    return "unknown";
}

namespace {

void note_transition(SimWorld& world, const CcnState& ccn, CcnPhase from, CcnPhase to) {
    if (!world.transcript_enabled) {
        return;
    }
    TranscriptEvent event;
    event.type = TranscriptEvent::Type::transition;
    event.round = world.round_counter;
    event.domain = ccn.domain_id;
    event.phase_from = from;
    event.phase_to = to;
    world.transcript.push_back(event);
}

void set_phase(SimWorld& world, CcnState& ccn, CcnPhase to) {
    if (ccn.phase == to) {
        return;
    }
    note_transition(world, ccn, ccn.phase, to);
    ccn.phase = to;
}

BlockRecordPayload own_record(const SimWorld& world, const CcnState& ccn) {
    const Block& confirmed = l_confirmed_block(world.chains.at(ccn.domain_id), ccn.l);
    BlockRecordPayload record;
    record.domain_id = ccn.domain_id;
    record.height = confirmed.height;
    record.digest = block_hash(confirmed);
    return record;
}

void enter_phase1(SimWorld& world, CcnState& ccn, SequenceNumber round_seq) {
    set_phase(world, ccn, CcnPhase::Phase1Collecting);
    ccn.current_round_seq = round_seq;
    ccn.collected_records.clear();
    ccn.collected_heights.clear();
    ccn.attempts_used = 1;
    ccn.pending_entry.reset();

    const BlockRecordPayload record = own_record(world, ccn);
    ccn.collected_records[record.domain_id] = record.digest;
    ccn.collected_heights[record.domain_id] = record.height;
    broadcast_to_ccns(world, ccn.node_id, MessageKind::BlockRecord, record);
}

HashDigest round_payload_summary(const SimWorld& world, DomainId domain,
                                 SequenceNumber round_seq) {
    ByteWriter w;
    w.raw("xrefchain/round-payload");
    w.u32be(domain);
    w.u64be(round_seq);
    w.u64be(world.config.seed);
    return hash(as_span(w.bytes()));
}

// Phase 1 is complete for this CCN: sign the collected digests, extend the
// domain's hysteresis chain, and hand the block to a miner.
void advance_to_phase2(SimWorld& world, CcnState& ccn) {
    std::vector<DomainDigest> content;
    content.reserve(ccn.collected_records.size());
    for (const auto& [domain, digest] : ccn.collected_records) {
        content.push_back({domain, digest});
    }
    HysteresisSignature entry =
        create_signature(ccn.keypair, ccn.domain_id, ccn.hysteresis_chain, content);
    for (const auto& [domain, height] : ccn.collected_heights) {
        world.reference_index.record(entry.sequence_number, domain, height);
    }
    ccn.hysteresis_chain.entries.push_back(entry);
    ccn.pending_entry = entry;
    set_phase(world, ccn, CcnPhase::Phase2Mining);

    MineRequestPayload request;
    request.entry = std::move(entry);
    request.payload_summary = round_payload_summary(world, ccn.domain_id, ccn.current_round_seq);
    request.tx_count = world.config.tx_count_per_block;

    const std::optional<NodeId> miner = world.miner_node(ccn.domain_id);
    if (miner.has_value()) {
        send_message(world, ccn.node_id, *miner, MessageKind::MineRequest, std::move(request));
        return;
    }
    // Single-node domain: the CCN mines its own block within the round.
    DomainChain& chain = world.chains.at(ccn.domain_id);
    Block block = mine_block(
        chain, request.payload_summary, request.tx_count, request.entry,
        derive_seed(world.config.seed, (ccn.current_round_seq << 20) ^ ccn.domain_id));
    chain.blocks.push_back(block);
    set_phase(world, ccn, CcnPhase::Phase3Announcing);
    ccn.announce_round = world.round_counter;
    broadcast_to_ccns(world, ccn.node_id, MessageKind::Announce, AnnouncePayload{std::move(block)});
}

void abort_round(SimWorld& world) {
    world.abort_flag = true;
    for (CcnState& ccn : world.ccn_nodes) {
        if (ccn.phase == CcnPhase::Failed) {
            continue;
        }
        set_phase(world, ccn, CcnPhase::Idle);
        ccn.collected_records.clear();
        ccn.collected_heights.clear();
        ccn.attempts_used = 0;
        ccn.pending_entry.reset();
    }
    world.round_active = false;
}

void ccn_handle_message(SimWorld& world, CcnState& ccn, const Message& msg) {
    switch (msg.kind) {
        case MessageKind::StartCrossRef: {
            const auto& start = std::get<StartPayload>(msg.payload);
            if (ccn.phase == CcnPhase::Idle) {
                enter_phase1(world, ccn, start.round_seq);
            } else {
                // Re-request from a collector that is missing this domain's
                // record: answer directly.
                send_message(world, ccn.node_id, msg.sender, MessageKind::BlockRecord,
                             own_record(world, ccn));
            }
            break;
        }
        case MessageKind::BlockRecord: {
            if (ccn.phase != CcnPhase::Phase1Collecting) {
                break;
            }
            const auto& record = std::get<BlockRecordPayload>(msg.payload);
            ccn.collected_records[record.domain_id] = record.digest;
            ccn.collected_heights[record.domain_id] = record.height;
            break;
        }
        case MessageKind::MinedBlock: {
            if (ccn.phase != CcnPhase::Phase2Mining || !ccn.pending_entry.has_value()) {
                break;
            }
            const auto& mined = std::get<MinedBlockPayload>(msg.payload);
            DomainChain& chain = world.chains.at(ccn.domain_id);
            const Block& block = mined.block;
            const bool properly_mined =
                block.height == chain.tip_height() + 1 &&
                block.previous_hash == block_hash(chain.tip()) &&
                meets_difficulty(block_hash(block), chain.difficulty_bits) &&
                block.cross_reference.has_value() &&
                *block.cross_reference == *ccn.pending_entry;
            if (!properly_mined) {
                // Wait for a properly mined block: ask again.
                MineRequestPayload request;
                request.entry = *ccn.pending_entry;
                request.payload_summary =
                    round_payload_summary(world, ccn.domain_id, ccn.current_round_seq);
                request.tx_count = world.config.tx_count_per_block;
                if (const auto miner = world.miner_node(ccn.domain_id)) {
                    send_message(world, ccn.node_id, *miner, MessageKind::MineRequest,
                                 std::move(request));
                }
                break;
            }
            chain.blocks.push_back(block);
            set_phase(world, ccn, CcnPhase::Phase3Announcing);
            ccn.announce_round = world.round_counter;
            broadcast_to_ccns(world, ccn.node_id, MessageKind::Announce,
                              AnnouncePayload{block});
            break;
        }
        case MessageKind::Announce:
            // Informational; completion is tracked by each CCN's own state.
            break;
        case MessageKind::MineRequest:
            break; // CCNs never receive mine requests
    }
}

void pcn_handle_message(SimWorld& world, PcnState& pcn, const Message& msg) {
    if (msg.kind != MessageKind::MineRequest) {
        return;
    }
    pcn.pending_request = std::get<MineRequestPayload>(msg.payload);
    const MineRequestPayload& request = *pcn.pending_request;
    const DomainChain& chain = world.chains.at(pcn.domain_id);
    Block block = mine_block(
        chain, request.payload_summary, request.tx_count, request.entry,
        derive_seed(world.config.seed,
                    (request.entry.sequence_number << 20) ^ pcn.domain_id));
    send_message(world, pcn.node_id, msg.sender, MessageKind::MinedBlock,
                 MinedBlockPayload{std::move(block)});
    pcn.pending_request.reset();
}

// Deterministic processing order within one inbox: kickoff messages first,
// then by sender, so a Start is always handled before the records that
// travelled with it.
void sort_inbox(std::vector<Message>& inbox) {
    std::stable_sort(inbox.begin(), inbox.end(), [](const Message& a, const Message& b) {
        if (a.kind != b.kind) {
            return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        }
        return a.sender < b.sender;
    });
}

// Phase-1 deadline logic: collection attempt k ends two rounds after it
// started. A CCN holding every record proceeds; otherwise it re-requests
// from the silent domains until the retry budget runs out, then proceeds
// with at least m-t records or votes to abort.
void phase1_decision(SimWorld& world, CcnState& ccn) {
    const std::uint64_t deadline =
        world.protocol_start_round + 2ull * ccn.attempts_used;
    if (world.round_counter != deadline) {
        return;
    }
    const std::uint32_t m = world.config.m;
    if (ccn.collected_records.size() == m) {
        advance_to_phase2(world, ccn);
        return;
    }
    if (ccn.attempts_used < ccn.retry_budget) {
        ccn.attempts_used += 1;
        const StartPayload rerequest{ccn.domain_id, ccn.current_round_seq};
        for (DomainId domain = 0; domain < m; ++domain) {
            if (!ccn.collected_records.contains(domain)) {
                send_message(world, ccn.node_id, world.ccn_node(domain),
                             MessageKind::StartCrossRef, rerequest);
            }
        }
        return;
    }
    const std::uint32_t tolerated = ccn.retry_budget - 1; // budget is t+1
    if (ccn.collected_records.size() + tolerated >= m) {
        advance_to_phase2(world, ccn);
        return;
    }
    abort_round(world);
}

CcnPhase live_stage(const SimWorld& world) {
    CcnPhase stage = CcnPhase::Idle;
    for (const CcnState& ccn : world.ccn_nodes) {
        if (ccn.phase == CcnPhase::Failed) {
            continue;
        }
        if (static_cast<int>(ccn.phase) > static_cast<int>(stage)) {
            stage = ccn.phase;
        }
    }
    return stage;
}

bool all_live_done(const SimWorld& world) {
    bool any_live = false;
    for (const CcnState& ccn : world.ccn_nodes) {
        if (ccn.phase == CcnPhase::Failed) {
            continue;
        }
        any_live = true;
        if (ccn.phase != CcnPhase::Done) {
            return false;
        }
    }
    return any_live;
}

} // namespace

SequenceNumber start_cross_reference(SimWorld& world, DomainId initiator) {
    if (initiator >= world.config.m) {
        throw std::invalid_argument("unknown domain");
    }
    CcnState& ccn = world.ccn_nodes[initiator];
    if (ccn.phase == CcnPhase::Failed ||
        world.node_failed_at(ccn.node_id, world.round_counter)) {
        throw std::invalid_argument("initiator unavailable");
    }
    for (const CcnState& node : world.ccn_nodes) {
        if (node.phase != CcnPhase::Idle && node.phase != CcnPhase::Failed) {
            throw std::logic_error("round already in progress");
        }
    }

    const SequenceNumber round_seq = ccn.hysteresis_chain.entries.size();
    world.round_active = true;
    world.abort_flag = false;
    world.protocol_start_round = world.round_counter;

    broadcast_to_ccns(world, ccn.node_id, MessageKind::StartCrossRef,
                      StartPayload{initiator, round_seq});
    enter_phase1(world, ccn, round_seq);
    return round_seq;
}

RoundMetrics step_round(SimWorld& world) {
    const RoundMetrics before = world.metrics;
    const CcnPhase stage = live_stage(world);

    deliver_round(world);

    for (NodeId node = 0; node < world.inboxes.size(); ++node) {
        std::vector<Message> inbox = std::move(world.inboxes[node]);
        world.inboxes[node].clear();
        if (world.node_failed_at(node, world.round_counter)) {
            continue;
        }
        sort_inbox(inbox);
        for (const Message& msg : inbox) {
            if (world.is_ccn(node)) {
                ccn_handle_message(world, world.ccn_nodes[node], msg);
            } else {
                pcn_handle_message(world, world.pcn_nodes[node - world.config.m], msg);
            }
        }
    }

    for (CcnState& ccn : world.ccn_nodes) {
        if (ccn.phase == CcnPhase::Phase1Collecting) {
            phase1_decision(world, ccn);
        }
    }
    for (CcnState& ccn : world.ccn_nodes) {
        if (ccn.phase == CcnPhase::Phase3Announcing &&
            world.round_counter > ccn.announce_round) {
            set_phase(world, ccn, CcnPhase::Done);
            world.metrics.completed_domains.insert(ccn.domain_id);
        }
    }

    switch (stage) {
        case CcnPhase::Idle:
        case CcnPhase::Phase1Collecting:
            world.metrics.phase1_rounds += 1;
            break;
        case CcnPhase::Phase2Mining:
            world.metrics.phase2_rounds += 1;
            break;
        case CcnPhase::Phase3Announcing:
            world.metrics.phase3_rounds += 1;
            break;
        default:
            break;
    }
    if (world.transcript_enabled) {
        TranscriptEvent event;
        event.type = TranscriptEvent::Type::round;
        event.round = world.round_counter;
        event.phase_label = stage == CcnPhase::Phase2Mining      ? 2u
                            : stage == CcnPhase::Phase3Announcing ? 3u
                                                                  : 1u;
        world.transcript.push_back(event);
    }

    if (all_live_done(world)) {
        world.round_active = false;
    }
    return world.metrics.delta_since(before);
}

namespace {

ProtocolOutcome run_protocol(SimWorld& world, DomainId initiator, std::uint32_t l,
                             std::uint32_t t, bool flowchart1) {
    for (CcnState& ccn : world.ccn_nodes) {
        if (ccn.phase == CcnPhase::Done) {
            set_phase(world, ccn, CcnPhase::Idle); // fresh round
        }
        if (ccn.phase != CcnPhase::Failed) {
            ccn.l = l;
            ccn.retry_budget = t + 1;
        }
    }

    ProtocolOutcome outcome;
    const RoundMetrics before = world.metrics;

    if (flowchart1) {
        for (const CcnState& ccn : world.ccn_nodes) {
            if (ccn.phase == CcnPhase::Failed) {
                outcome.status = OutcomeStatus::flowchart1_assumption_violated;
                outcome.metrics = world.metrics.delta_since(before);
                return outcome;
            }
        }
    }

    outcome.round_sequence = start_cross_reference(world, initiator);

    // Phase 1 spans at most 2(t+1) rounds, mining two more, announcing one,
    // plus one slack round for the Done transition.
    const std::uint64_t round_guard =
        world.protocol_start_round + 2ull * (t + 1) + 4;
    bool failure_seen = false;
    while (world.round_active && world.round_counter < round_guard) {
        step_round(world);
        if (flowchart1) {
            for (const CcnState& ccn : world.ccn_nodes) {
                failure_seen |= ccn.phase == CcnPhase::Failed;
            }
            if (failure_seen) {
                break;
            }
        }
    }

    outcome.metrics = world.metrics.delta_since(before);
    if (flowchart1 && failure_seen) {
        outcome.status = OutcomeStatus::flowchart1_assumption_violated;
        return outcome;
    }
    if (world.abort_flag) {
        outcome.status = OutcomeStatus::aborted_tolerance_exceeded;
        return outcome;
    }
    if (!all_live_done(world)) {
        outcome.status = OutcomeStatus::stalled;
        return outcome;
    }
    outcome.status = OutcomeStatus::success;
    for (const CcnState& ccn : world.ccn_nodes) {
        if (ccn.phase == CcnPhase::Done) {
            outcome.mined_blocks[ccn.domain_id] = world.chains.at(ccn.domain_id).tip();
        }
    }
    return outcome;
}

} // namespace

ProtocolOutcome run_flowchart1(SimWorld& world, DomainId initiator, std::uint32_t l) {
    return run_protocol(world, initiator, l, 0, true);
}

ProtocolOutcome run_flowchart2(SimWorld& world, DomainId initiator, std::uint32_t l,
                               std::uint32_t t) {
    return run_protocol(world, initiator, l, t, false);
}

void inject_stop_failure(SimWorld& world, DomainId domain, std::uint64_t at_round) {
    if (domain >= world.config.m) {
        throw std::invalid_argument("unknown domain");
    }
    world.config.failure_schedule.push_back({domain, at_round});
    if (at_round <= world.round_counter) {
        CcnState& ccn = world.ccn_nodes[domain];
        if (ccn.phase != CcnPhase::Failed) {
            set_phase(world, ccn, CcnPhase::Failed);
        }
    }
}

} // namespace xref
