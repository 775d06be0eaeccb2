#include "xrefchain/netsim.hpp"

#include <stdexcept>

#include "xrefchain/bytes.hpp"
#include "xrefchain/rng.hpp"

namespace xref {

std::vector<std::string> SimConfig::validation_errors() const {
    std::vector<std::string> errors;
    if (m < 1) errors.push_back("m must be >= 1");
    if (nodes_per_domain < 1) errors.push_back("nodes_per_domain must be >= 1");
    if (difficulty_bits > 20) errors.push_back("difficulty_bits must be <= 20 at desk scale");
    if (rounds < 1) errors.push_back("rounds must be >= 1");
    if (m >= 1 && initiator >= m) errors.push_back("initiator must name an existing domain");
    for (const FailureEvent& event : failure_schedule) {
        if (event.domain_id >= m) {
            errors.push_back("failure_schedule names unknown domain " +
                             std::to_string(event.domain_id));
        }
    }
    return errors;
}

std::optional<NodeId> SimWorld::miner_node(DomainId domain) const {
    if (config.nodes_per_domain < 2) {
        return std::nullopt;
    }
    return config.m + domain * (config.nodes_per_domain - 1);
}

std::size_t SimWorld::node_count() const {
    return static_cast<std::size_t>(config.m) * config.nodes_per_domain;
}

DomainId SimWorld::node_domain(NodeId node) const {
    if (is_ccn(node)) {
        return node;
    }
    return (node - config.m) / (config.nodes_per_domain - 1);
}

bool SimWorld::node_failed_at(NodeId node, std::uint64_t round) const {
    if (!is_ccn(node)) {
        return false;
    }
    for (const FailureEvent& event : config.failure_schedule) {
        if (event.domain_id == node && event.at_round <= round) {
            return true;
        }
    }
    return false;
}

std::map<DomainId, Bytes> SimWorld::public_keys() const {
    std::map<DomainId, Bytes> keys;
    for (const CcnState& ccn : ccn_nodes) {
        keys[ccn.domain_id] = ccn.keypair.public_key;
    }
    return keys;
}

std::map<DomainId, HysteresisChain> SimWorld::hysteresis_chains() const {
    std::map<DomainId, HysteresisChain> chains;
    for (const CcnState& ccn : ccn_nodes) {
        chains[ccn.domain_id] = ccn.hysteresis_chain;
    }
    return chains;
}

SimWorld build_world(const SimConfig& config) {
    const std::vector<std::string> errors = config.validation_errors();
    if (!errors.empty()) {
        std::string joined;
        for (const std::string& e : errors) {
            if (!joined.empty()) joined += "; ";
            joined += e;
        }
        throw std::invalid_argument(joined);
    }

    SimWorld world;
    world.config = config;
    world.inboxes.resize(static_cast<std::size_t>(config.m) * config.nodes_per_domain);
    world.outboxes.resize(world.inboxes.size());

    for (DomainId domain = 0; domain < config.m; ++domain) {
        CcnState ccn;
        ccn.domain_id = domain;
        ccn.node_id = world.ccn_node(domain);
        ccn.l = config.l;
        ccn.keypair = generate_keypair(derive_seed(config.seed, 0x6b657900ULL + domain));
        world.ccn_nodes.push_back(std::move(ccn));

        for (std::uint32_t k = 0; k + 1 < config.nodes_per_domain; ++k) {
            PcnState pcn;
            pcn.domain_id = domain;
            pcn.node_id = config.m + domain * (config.nodes_per_domain - 1) + k;
            world.pcn_nodes.push_back(pcn);
        }

        // Pre-mine to height l+1 so Phase 1 can pick an l-confirmed block.
        DomainChain chain;
        chain.domain_id = domain;
        chain.difficulty_bits = config.difficulty_bits;
        for (BlockHeight h = 0; h <= config.l + 1; ++h) {
            ByteWriter payload;
            payload.raw("xrefchain/premine");
            payload.u32be(domain);
            payload.u64be(h);
            payload.u64be(config.seed);
            chain.blocks.push_back(mine_block(
                chain, hash(as_span(payload.bytes())), config.tx_count_per_block,
                std::nullopt, derive_seed(config.seed, (std::uint64_t{domain} << 32) | h)));
        }
        world.chains.emplace(domain, std::move(chain));
    }

    // Failures scheduled at round 0 are in effect before anything runs.
    for (CcnState& ccn : world.ccn_nodes) {
        if (world.node_failed_at(ccn.node_id, 0)) {
            ccn.phase = CcnPhase::Failed;
        }
    }
    return world;
}

namespace {

void note_message(SimWorld& world, const Message& msg, bool discarded) {
    if (!world.transcript_enabled) {
        return;
    }
    TranscriptEvent event;
    event.type = discarded ? TranscriptEvent::Type::discard : TranscriptEvent::Type::message;
    event.round = world.round_counter;
    event.kind = msg.kind;
    event.from = msg.sender;
    event.to = msg.receiver;
    event.size_bytes = msg.size_bytes;
    world.transcript.push_back(event);
}

void count_sent(RoundMetrics& metrics, MessageKind kind) {
    metrics.messages_sent += 1;
    switch (kind) {
        case MessageKind::StartCrossRef:
        case MessageKind::BlockRecord:
            metrics.phase1_messages += 1;
            break;
        case MessageKind::MineRequest:
        case MessageKind::MinedBlock:
            metrics.phase2_messages += 1;
            break;
        case MessageKind::Announce:
            metrics.phase3_messages += 1;
            break;
    }
}

} // namespace

void deliver_round(SimWorld& world) {
    world.round_counter += 1;

    // Trigger scheduled stop failures before delivery: the failed CCN's
    // queued traffic is discarded and its inbox freezes.
    for (CcnState& ccn : world.ccn_nodes) {
        if (ccn.phase != CcnPhase::Failed &&
            world.node_failed_at(ccn.node_id, world.round_counter)) {
            if (world.transcript_enabled) {
                TranscriptEvent event;
                event.type = TranscriptEvent::Type::transition;
                event.round = world.round_counter;
                event.domain = ccn.domain_id;
                event.phase_from = ccn.phase;
                event.phase_to = CcnPhase::Failed;
                world.transcript.push_back(event);
            }
            ccn.phase = CcnPhase::Failed;
        }
    }

    for (NodeId sender = 0; sender < world.outboxes.size(); ++sender) {
        const bool sender_failed = world.node_failed_at(sender, world.round_counter);
        for (Message& msg : world.outboxes[sender]) {
            const bool receiver_failed =
                world.node_failed_at(msg.receiver, world.round_counter);
            if (sender_failed || receiver_failed) {
                world.metrics.messages_discarded += 1;
                note_message(world, msg, true);
                continue;
            }
            world.metrics.messages_total += 1;
            world.metrics.bytes_total += msg.size_bytes;
            note_message(world, msg, false);
            world.inboxes[msg.receiver].push_back(std::move(msg));
        }
        world.outboxes[sender].clear();
    }
}

std::size_t send_message(SimWorld& world, NodeId sender, NodeId receiver, MessageKind kind,
                         MessagePayload payload) {
    if (world.node_failed_at(sender, world.round_counter)) {
        return 0;
    }
    Message msg;
    msg.kind = kind;
    msg.sender = sender;
    msg.receiver = receiver;
    msg.round = world.round_counter;
    msg.size_bytes = payload_bytes(payload).size();
    msg.payload = std::move(payload);
    count_sent(world.metrics, kind);
    world.outboxes[sender].push_back(std::move(msg));
    return 1;
}

std::size_t broadcast_to_ccns(SimWorld& world, NodeId sender, MessageKind kind,
                              const MessagePayload& payload) {
    std::size_t sent = 0;
    for (DomainId domain = 0; domain < world.config.m; ++domain) {
        const NodeId receiver = world.ccn_node(domain);
        if (receiver == sender) {
            continue;
        }
        sent += send_message(world, sender, receiver, kind, payload);
    }
    return sent;
}

} // namespace xref
