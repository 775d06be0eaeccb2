#include "xrefchain/json_io.hpp"

#include <nlohmann/json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "xrefchain/bytes.hpp"

namespace xref {

namespace {

std::string hex_of(const Bytes& bytes) { return to_hex(as_span(bytes)); }

Bytes bytes_from_hex_field(const Json& j, const char* what) {
    if (!j.is_string()) {
        throw std::invalid_argument(std::string(what) + ": expected hex string");
    }
    const auto decoded = from_hex(j.get<std::string>());
    if (!decoded.has_value()) {
        throw std::invalid_argument(std::string(what) + ": malformed hex");
    }
    return *decoded;
}

const char* kind_name(MessageKind kind) {
    switch (kind) {
        case MessageKind::StartCrossRef: return "StartCrossRef";
        case MessageKind::BlockRecord: return "BlockRecord";
        case MessageKind::MineRequest: return "MineRequest";
        case MessageKind::MinedBlock: return "MinedBlock";
        case MessageKind::Announce: return "Announce";
    }
    return "unknown";
}

MessageKind kind_from_name(const std::string& name) {
    if (name == "StartCrossRef") return MessageKind::StartCrossRef;
    if (name == "BlockRecord") return MessageKind::BlockRecord;
    if (name == "MineRequest") return MessageKind::MineRequest;
    if (name == "MinedBlock") return MessageKind::MinedBlock;
    if (name == "Announce") return MessageKind::Announce;
    throw std::invalid_argument("unknown message kind: " + name);
}

const char* phase_name(CcnPhase phase) {
    switch (phase) {
        case CcnPhase::Idle: return "Idle";
        case CcnPhase::Phase1Collecting: return "Phase1Collecting";
        case CcnPhase::Phase2Mining: return "Phase2Mining";
        case CcnPhase::Phase3Announcing: return "Phase3Announcing";
        case CcnPhase::Done: return "Done";
        case CcnPhase::Failed: return "Failed";
    }
    return "unknown";
}

CcnPhase phase_from_name(const std::string& name) {
    if (name == "Idle") return CcnPhase::Idle;
    if (name == "Phase1Collecting") return CcnPhase::Phase1Collecting;
    if (name == "Phase2Mining") return CcnPhase::Phase2Mining;
    if (name == "Phase3Announcing") return CcnPhase::Phase3Announcing;
    if (name == "Done") return CcnPhase::Done;
    if (name == "Failed") return CcnPhase::Failed;
    throw std::invalid_argument("unknown phase: " + name);
}

} // namespace

Json to_json(const HashDigest& digest) { return to_hex(as_span(digest)); }

HashDigest digest_from_json(const Json& j) {
    const Bytes bytes = bytes_from_hex_field(j, "digest");
    if (bytes.size() != kDigestSize) {
        throw std::invalid_argument("digest: wrong length");
    }
    HashDigest digest{};
    std::copy(bytes.begin(), bytes.end(), digest.begin());
    return digest;
}

Json to_json(const Signature& signature) {
    return Json{{"scheme", signature.scheme_id == SchemeId::mock ? "mock" : "external"},
                {"bytes", hex_of(signature.bytes)}};
}

Signature signature_from_json(const Json& j) {
    Signature signature;
    signature.scheme_id =
        j.at("scheme").get<std::string>() == "mock" ? SchemeId::mock : SchemeId::external;
    signature.bytes = bytes_from_hex_field(j.at("bytes"), "signature bytes");
    return signature;
}

Json to_json(const KeyPair& key) {
    return Json{{"scheme", key.scheme_id == SchemeId::mock ? "mock" : "external"},
                {"public_key", hex_of(key.public_key)},
                {"private_key", hex_of(key.private_key)}};
}

KeyPair keypair_from_json(const Json& j) {
    KeyPair key;
    key.scheme_id =
        j.at("scheme").get<std::string>() == "mock" ? SchemeId::mock : SchemeId::external;
    key.public_key = bytes_from_hex_field(j.at("public_key"), "public_key");
    key.private_key = bytes_from_hex_field(j.at("private_key"), "private_key");
    return key;
}

Json to_json(const HysteresisSignature& entry) {
    Json digests = Json::array();
    for (const DomainDigest& d : entry.content_digests) {
        digests.push_back(Json{{"domain_id", d.domain_id}, {"digest", to_json(d.digest)}});
    }
    return Json{{"sequence_number", entry.sequence_number},
                {"previous_summary", to_json(entry.previous_summary)},
                {"content_digests", std::move(digests)},
                {"signer", entry.signer},
                {"signature", to_json(entry.signature)}};
}

HysteresisSignature hysteresis_signature_from_json(const Json& j) {
    HysteresisSignature entry;
    entry.sequence_number = j.at("sequence_number").get<SequenceNumber>();
    entry.previous_summary = digest_from_json(j.at("previous_summary"));
    for (const Json& d : j.at("content_digests")) {
        entry.content_digests.push_back(
            {d.at("domain_id").get<DomainId>(), digest_from_json(d.at("digest"))});
    }
    entry.signer = j.at("signer").get<DomainId>();
    entry.signature = signature_from_json(j.at("signature"));
    return entry;
}

Json to_json(const HysteresisChain& chain) {
    Json entries = Json::array();
    for (const HysteresisSignature& entry : chain.entries) {
        entries.push_back(to_json(entry));
    }
    return Json{{"genesis_summary", to_json(chain.genesis_summary)},
                {"entries", std::move(entries)}};
}

HysteresisChain hysteresis_chain_from_json(const Json& j) {
    HysteresisChain chain;
    chain.genesis_summary = digest_from_json(j.at("genesis_summary"));
    for (const Json& entry : j.at("entries")) {
        chain.entries.push_back(hysteresis_signature_from_json(entry));
    }
    return chain;
}

Json to_json(const Block& block) {
    Json j{{"height", block.height},
           {"domain_id", block.domain_id},
           {"previous_hash", to_json(block.previous_hash)},
           {"payload_summary", to_json(block.payload_summary)},
           {"tx_count", block.tx_count},
           {"nonce", block.nonce},
           {"difficulty_bits", block.difficulty_bits}};
    j["cross_reference"] =
        block.cross_reference.has_value() ? to_json(*block.cross_reference) : Json(nullptr);
    return j;
}

Block block_from_json(const Json& j) {
    Block block;
    block.height = j.at("height").get<BlockHeight>();
    block.domain_id = j.at("domain_id").get<DomainId>();
    block.previous_hash = digest_from_json(j.at("previous_hash"));
    block.payload_summary = digest_from_json(j.at("payload_summary"));
    block.tx_count = j.at("tx_count").get<std::uint64_t>();
    block.nonce = j.at("nonce").get<std::uint64_t>();
    block.difficulty_bits = j.at("difficulty_bits").get<std::uint8_t>();
    if (!j.at("cross_reference").is_null()) {
        block.cross_reference = hysteresis_signature_from_json(j.at("cross_reference"));
    }
    return block;
}

Json to_json(const DomainChain& chain) {
    Json blocks = Json::array();
    for (const Block& block : chain.blocks) {
        blocks.push_back(to_json(block));
    }
    return Json{{"domain_id", chain.domain_id},
                {"difficulty_bits", chain.difficulty_bits},
                {"blocks", std::move(blocks)}};
}

DomainChain domain_chain_from_json(const Json& j) {
    DomainChain chain;
    chain.domain_id = j.at("domain_id").get<DomainId>();
    chain.difficulty_bits = j.at("difficulty_bits").get<std::uint8_t>();
    for (const Json& block : j.at("blocks")) {
        chain.blocks.push_back(block_from_json(block));
    }
    return chain;
}

Json to_json(const ReferenceIndex& index) {
    Json rounds = Json::array();
    for (const auto& [round, refs] : index.rounds()) {
        Json entries = Json::array();
        for (const auto& [domain, height] : refs) {
            entries.push_back(Json{{"domain_id", domain}, {"height", height}});
        }
        rounds.push_back(Json{{"round", round}, {"references", std::move(entries)}});
    }
    return rounds;
}

ReferenceIndex reference_index_from_json(const Json& j) {
    ReferenceIndex index;
    for (const Json& round : j) {
        const auto seq = round.at("round").get<SequenceNumber>();
        for (const Json& ref : round.at("references")) {
            index.record(seq, ref.at("domain_id").get<DomainId>(),
                         ref.at("height").get<BlockHeight>());
        }
    }
    return index;
}

namespace {

Json payload_to_json(const MessagePayload& payload) {
    return std::visit(
        [](const auto& p) -> Json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StartPayload>) {
                return Json{{"initiator", p.initiator}, {"round_seq", p.round_seq}};
            } else if constexpr (std::is_same_v<T, BlockRecordPayload>) {
                return Json{{"domain_id", p.domain_id},
                            {"height", p.height},
                            {"digest", to_json(p.digest)}};
            } else if constexpr (std::is_same_v<T, MineRequestPayload>) {
                return Json{{"entry", to_json(p.entry)},
                            {"payload_summary", to_json(p.payload_summary)},
                            {"tx_count", p.tx_count}};
            } else if constexpr (std::is_same_v<T, MinedBlockPayload>) {
                return Json{{"block", to_json(p.block)}};
            } else {
                return Json{{"block", to_json(p.block)}};
            }
        },
        payload);
}

MessagePayload payload_from_json(MessageKind kind, const Json& j) {
    switch (kind) {
        case MessageKind::StartCrossRef:
            return StartPayload{j.at("initiator").get<DomainId>(),
                                j.at("round_seq").get<SequenceNumber>()};
        case MessageKind::BlockRecord:
            return BlockRecordPayload{j.at("domain_id").get<DomainId>(),
                                      j.at("height").get<BlockHeight>(),
                                      digest_from_json(j.at("digest"))};
        case MessageKind::MineRequest: {
            MineRequestPayload p;
            p.entry = hysteresis_signature_from_json(j.at("entry"));
            p.payload_summary = digest_from_json(j.at("payload_summary"));
            p.tx_count = j.at("tx_count").get<std::uint64_t>();
            return p;
        }
        case MessageKind::MinedBlock:
            return MinedBlockPayload{block_from_json(j.at("block"))};
        case MessageKind::Announce:
            return AnnouncePayload{block_from_json(j.at("block"))};
    }
    throw std::invalid_argument("unknown message kind");
}

} // namespace

Json to_json(const Message& message) {
    return Json{{"kind", kind_name(message.kind)},
                {"sender", message.sender},
                {"receiver", message.receiver},
                {"round", message.round},
                {"size_bytes", message.size_bytes},
                {"payload", payload_to_json(message.payload)}};
}

Message message_from_json(const Json& j) {
    Message message;
    message.kind = kind_from_name(j.at("kind").get<std::string>());
    message.sender = j.at("sender").get<NodeId>();
    message.receiver = j.at("receiver").get<NodeId>();
    message.round = j.at("round").get<std::uint64_t>();
    message.size_bytes = j.at("size_bytes").get<std::uint64_t>();
    message.payload = payload_from_json(message.kind, j.at("payload"));
    return message;
}

Json to_json(const CcnState& ccn) {
    Json records = Json::array();
    for (const auto& [domain, digest] : ccn.collected_records) {
        records.push_back(Json{{"domain_id", domain}, {"digest", to_json(digest)}});
    }
    Json heights = Json::array();
    for (const auto& [domain, height] : ccn.collected_heights) {
        heights.push_back(Json{{"domain_id", domain}, {"height", height}});
    }
    Json j{{"domain_id", ccn.domain_id},
           {"node_id", ccn.node_id},
           {"phase", phase_name(ccn.phase)},
           {"collected_records", std::move(records)},
           {"collected_heights", std::move(heights)},
           {"l", ccn.l},
           {"keypair", to_json(ccn.keypair)},
           {"hysteresis_chain", to_json(ccn.hysteresis_chain)},
           {"retry_budget", ccn.retry_budget},
           {"attempts_used", ccn.attempts_used},
           {"current_round_seq", ccn.current_round_seq},
           {"announce_round", ccn.announce_round}};
    j["pending_entry"] =
        ccn.pending_entry.has_value() ? to_json(*ccn.pending_entry) : Json(nullptr);
    return j;
}

CcnState ccn_state_from_json(const Json& j) {
    CcnState ccn;
    ccn.domain_id = j.at("domain_id").get<DomainId>();
    ccn.node_id = j.at("node_id").get<NodeId>();
    ccn.phase = phase_from_name(j.at("phase").get<std::string>());
    for (const Json& record : j.at("collected_records")) {
        ccn.collected_records[record.at("domain_id").get<DomainId>()] =
            digest_from_json(record.at("digest"));
    }
    for (const Json& height : j.at("collected_heights")) {
        ccn.collected_heights[height.at("domain_id").get<DomainId>()] =
            height.at("height").get<BlockHeight>();
    }
    ccn.l = j.at("l").get<std::uint32_t>();
    ccn.keypair = keypair_from_json(j.at("keypair"));
    ccn.hysteresis_chain = hysteresis_chain_from_json(j.at("hysteresis_chain"));
    ccn.retry_budget = j.at("retry_budget").get<std::uint32_t>();
    ccn.attempts_used = j.at("attempts_used").get<std::uint32_t>();
    ccn.current_round_seq = j.at("current_round_seq").get<SequenceNumber>();
    ccn.announce_round = j.at("announce_round").get<std::uint64_t>();
    if (!j.at("pending_entry").is_null()) {
        ccn.pending_entry = hysteresis_signature_from_json(j.at("pending_entry"));
    }
    return ccn;
}

Json to_json(const PcnState& pcn) {
    Json j{{"domain_id", pcn.domain_id}, {"node_id", pcn.node_id}};
    j["pending_request"] = pcn.pending_request.has_value()
                               ? payload_to_json(MessagePayload{*pcn.pending_request})
                               : Json(nullptr);
    return j;
}

PcnState pcn_state_from_json(const Json& j) {
    PcnState pcn;
    pcn.domain_id = j.at("domain_id").get<DomainId>();
    pcn.node_id = j.at("node_id").get<NodeId>();
    if (!j.at("pending_request").is_null()) {
        pcn.pending_request = std::get<MineRequestPayload>(
            payload_from_json(MessageKind::MineRequest, j.at("pending_request")));
    }
    return pcn;
}

Json to_json(const RoundMetrics& metrics) {
    return Json{{"messages_total", metrics.messages_total},
                {"bytes_total", metrics.bytes_total},
                {"messages_sent", metrics.messages_sent},
                {"messages_discarded", metrics.messages_discarded},
                {"phase1_messages", metrics.phase1_messages},
                {"phase2_messages", metrics.phase2_messages},
                {"phase3_messages", metrics.phase3_messages},
                {"phase_rounds",
                 Json{{"T1", metrics.phase1_rounds},
                      {"T2", metrics.phase2_rounds},
                      {"T3", metrics.phase3_rounds}}},
                {"completed_domains", metrics.completed_domains}};
}

RoundMetrics round_metrics_from_json(const Json& j) {
    RoundMetrics metrics;
    metrics.messages_total = j.at("messages_total").get<std::uint64_t>();
    metrics.bytes_total = j.at("bytes_total").get<std::uint64_t>();
    metrics.messages_sent = j.at("messages_sent").get<std::uint64_t>();
    metrics.messages_discarded = j.at("messages_discarded").get<std::uint64_t>();
    metrics.phase1_messages = j.at("phase1_messages").get<std::uint64_t>();
    metrics.phase2_messages = j.at("phase2_messages").get<std::uint64_t>();
    metrics.phase3_messages = j.at("phase3_messages").get<std::uint64_t>();
    metrics.phase1_rounds = j.at("phase_rounds").at("T1").get<std::uint64_t>();
    metrics.phase2_rounds = j.at("phase_rounds").at("T2").get<std::uint64_t>();
    metrics.phase3_rounds = j.at("phase_rounds").at("T3").get<std::uint64_t>();
    for (const Json& domain : j.at("completed_domains")) {
        metrics.completed_domains.insert(domain.get<DomainId>());
    }
    return metrics;
}

Json to_json(const SimConfig& config) {
    Json schedule = Json::array();
    for (const FailureEvent& event : config.failure_schedule) {
        schedule.push_back(
            Json{{"domain_id", event.domain_id}, {"at_round", event.at_round}});
    }
    return Json{{"m", config.m},
                {"nodes_per_domain", config.nodes_per_domain},
                {"l", config.l},
                {"t", config.t},
                {"difficulty_bits", config.difficulty_bits},
                {"seed", config.seed},
                {"rounds", config.rounds},
                {"initiator", config.initiator},
                {"tx_count_per_block", config.tx_count_per_block},
                {"failure_schedule", std::move(schedule)}};
}

Json to_json(const TranscriptEvent& event) {
    switch (event.type) {
        case TranscriptEvent::Type::message:
        case TranscriptEvent::Type::discard:
            return Json{{"type", event.type == TranscriptEvent::Type::message ? "message"
                                                                              : "discard"},
                        {"round", event.round},
                        {"kind", kind_name(event.kind)},
                        {"from", event.from},
                        {"to", event.to},
                        {"size_bytes", event.size_bytes}};
        case TranscriptEvent::Type::transition:
            return Json{{"type", "transition"},
                        {"round", event.round},
                        {"domain_id", event.domain},
                        {"from", phase_name(event.phase_from)},
                        {"to", phase_name(event.phase_to)}};
        case TranscriptEvent::Type::round:
            return Json{{"type", "round"},
                        {"round", event.round},
                        {"phase", event.phase_label}};
    }
    return Json();
}

Json to_json(const SimWorld& world) {
    Json ccns = Json::array();
    for (const CcnState& ccn : world.ccn_nodes) {
        ccns.push_back(to_json(ccn));
    }
    Json pcns = Json::array();
    for (const PcnState& pcn : world.pcn_nodes) {
        pcns.push_back(to_json(pcn));
    }
    Json chains = Json::object();
    for (const auto& [domain, chain] : world.chains) {
        chains[std::to_string(domain)] = to_json(chain);
    }
    auto queues_to_json = [](const std::vector<std::vector<Message>>& queues) {
        Json out = Json::array();
        for (const std::vector<Message>& queue : queues) {
            Json messages = Json::array();
            for (const Message& message : queue) {
                messages.push_back(to_json(message));
            }
            out.push_back(std::move(messages));
        }
        return out;
    };
    return Json{{"schema_version", kSchemaVersion},
                {"config", to_json(world.config)},
                {"ccn_nodes", std::move(ccns)},
                {"pcn_nodes", std::move(pcns)},
                {"chains", std::move(chains)},
                {"inboxes", queues_to_json(world.inboxes)},
                {"outboxes", queues_to_json(world.outboxes)},
                {"round_counter", world.round_counter},
                {"metrics", to_json(world.metrics)},
                {"reference_index", to_json(world.reference_index)},
                {"round_active", world.round_active},
                {"abort_flag", world.abort_flag},
                {"protocol_start_round", world.protocol_start_round}};
}

SimWorld world_from_json(const Json& j) {
    SimWorld world;
    world.config = parse_sim_config(j.at("config"));
    for (const Json& ccn : j.at("ccn_nodes")) {
        world.ccn_nodes.push_back(ccn_state_from_json(ccn));
    }
    for (const Json& pcn : j.at("pcn_nodes")) {
        world.pcn_nodes.push_back(pcn_state_from_json(pcn));
    }
    for (const auto& [key, chain] : j.at("chains").items()) {
        world.chains[static_cast<DomainId>(std::stoul(key))] = domain_chain_from_json(chain);
    }
    auto queues_from_json = [](const Json& arr) {
        std::vector<std::vector<Message>> queues;
        for (const Json& queue : arr) {
            std::vector<Message> messages;
            for (const Json& message : queue) {
                messages.push_back(message_from_json(message));
            }
            queues.push_back(std::move(messages));
        }
        return queues;
    };
    world.inboxes = queues_from_json(j.at("inboxes"));
    world.outboxes = queues_from_json(j.at("outboxes"));
    world.round_counter = j.at("round_counter").get<std::uint64_t>();
    world.metrics = round_metrics_from_json(j.at("metrics"));
    world.reference_index = reference_index_from_json(j.at("reference_index"));
    world.round_active = j.at("round_active").get<bool>();
    world.abort_flag = j.at("abort_flag").get<bool>();
    world.protocol_start_round = j.at("protocol_start_round").get<std::uint64_t>();
    return world;
}

Json to_json(const ProtocolOutcome& outcome) {
    Json blocks = Json::object();
    for (const auto& [domain, block] : outcome.mined_blocks) {
        blocks[std::to_string(domain)] = to_json(block);
    }
    return Json{{"status", to_string(outcome.status)},
                {"round_sequence", outcome.round_sequence},
                {"metrics", to_json(outcome.metrics)},
                {"mined_blocks", std::move(blocks)}};
}

// --- strict config parsing ---------------------------------------------------

namespace {

void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed,
                         const std::string& context, std::vector<std::string>& errors) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            errors.push_back(context + ": unknown field '" + key + "'");
        }
    }
}

template <typename T>
void read_field(const Json& j, const char* key, T& out, const std::string& context,
                std::vector<std::string>& errors) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const Json::exception&) {
        errors.push_back(context + ": field '" + key + "' has the wrong type");
    }
}

void throw_if_errors(const std::vector<std::string>& errors) {
    if (errors.empty()) {
        return;
    }
    std::string joined;
    for (const std::string& e : errors) {
        if (!joined.empty()) joined += "; ";
        joined += e;
    }
    throw std::invalid_argument(joined);
}

SimConfig parse_sim_config_impl(const Json& j, std::vector<std::string>& errors) {
    static const std::set<std::string> allowed = {
        "m",       "nodes_per_domain",  "l",
        "t",       "difficulty_bits",   "seed",
        "rounds",  "initiator",         "tx_count_per_block",
        "failure_schedule"};
    reject_unknown_keys(j, allowed, "config", errors);

    SimConfig config;
    read_field(j, "m", config.m, "config", errors);
    read_field(j, "nodes_per_domain", config.nodes_per_domain, "config", errors);
    read_field(j, "l", config.l, "config", errors);
    read_field(j, "t", config.t, "config", errors);
    read_field(j, "difficulty_bits", config.difficulty_bits, "config", errors);
    read_field(j, "seed", config.seed, "config", errors);
    read_field(j, "rounds", config.rounds, "config", errors);
    read_field(j, "initiator", config.initiator, "config", errors);
    read_field(j, "tx_count_per_block", config.tx_count_per_block, "config", errors);
    if (j.contains("failure_schedule")) {
        if (!j.at("failure_schedule").is_array()) {
            errors.push_back("config: field 'failure_schedule' must be an array");
        } else {
            for (const Json& event : j.at("failure_schedule")) {
                static const std::set<std::string> event_keys = {"domain_id", "at_round"};
                reject_unknown_keys(event, event_keys, "failure_schedule entry", errors);
                FailureEvent fe;
                read_field(event, "domain_id", fe.domain_id, "failure_schedule entry", errors);
                read_field(event, "at_round", fe.at_round, "failure_schedule entry", errors);
                config.failure_schedule.push_back(fe);
            }
        }
    }
    for (const std::string& e : config.validation_errors()) {
        errors.push_back("config: " + e);
    }
    return config;
}

McGridConfig parse_mc_config_impl(const Json& j, std::vector<std::string>& errors) {
    static const std::set<std::string> allowed = {
        "N",        "m",        "alpha",        "top_x_percent", "trials",
        "f",        "failure_mode", "seed",     "bin_width",     "m_values",
        "alpha_values", "x_values", "f_values"};
    reject_unknown_keys(j, allowed, "mc", errors);

    McGridConfig grid;
    read_field(j, "N", grid.base.total_nodes, "mc", errors);
    read_field(j, "m", grid.base.domains, "mc", errors);
    read_field(j, "alpha", grid.base.alpha, "mc", errors);
    read_field(j, "top_x_percent", grid.base.top_x_percent, "mc", errors);
    read_field(j, "trials", grid.base.trials, "mc", errors);
    read_field(j, "f", grid.base.failed_domains, "mc", errors);
    read_field(j, "seed", grid.base.seed, "mc", errors);
    read_field(j, "bin_width", grid.base.bin_width, "mc", errors);
    if (j.contains("failure_mode")) {
        const std::string mode = j.at("failure_mode").get<std::string>();
        if (mode == "exclude_from_both") {
            grid.base.failure_mode = FailureMode::exclude_from_both;
        } else if (mode == "exclude_from_B_only") {
            grid.base.failure_mode = FailureMode::exclude_from_B_only;
        } else {
            errors.push_back("mc: failure_mode must be exclude_from_both or exclude_from_B_only");
        }
    }
    read_field(j, "m_values", grid.domains_values, "mc", errors);
    read_field(j, "alpha_values", grid.alpha_values, "mc", errors);
    read_field(j, "x_values", grid.top_x_values, "mc", errors);
    read_field(j, "f_values", grid.f_values, "mc", errors);
    if (grid.domains_values.empty()) grid.domains_values = {grid.base.domains};
    if (grid.alpha_values.empty()) grid.alpha_values = {grid.base.alpha};
    if (grid.top_x_values.empty()) grid.top_x_values = {grid.base.top_x_percent};

    McConfig probe = grid.base;
    for (std::uint32_t m : grid.domains_values) {
        probe.domains = m;
        for (const std::string& e : probe.validation_errors()) {
            errors.push_back("mc: " + e);
        }
    }
    return grid;
}

CapacityParams parse_capacity_params_impl(const Json& j, std::vector<std::string>& errors) {
    static const std::set<std::string> allowed = {"tau", "tau_fork", "c_txs",
                                                  "block_size_mb"};
    reject_unknown_keys(j, allowed, "capacity", errors);
    CapacityParams params;
    read_field(j, "tau", params.tau, "capacity", errors);
    read_field(j, "tau_fork", params.tau_fork, "capacity", errors);
    read_field(j, "c_txs", params.c_txs, "capacity", errors);
    read_field(j, "block_size_mb", params.block_size_mb, "capacity", errors);
    try {
        validate(params);
    } catch (const std::invalid_argument& e) {
        errors.push_back(std::string("capacity: ") + e.what());
    }
    return params;
}

} // namespace

SimConfig parse_sim_config(const Json& j) {
    std::vector<std::string> errors;
    SimConfig config = parse_sim_config_impl(j, errors);
    throw_if_errors(errors);
    return config;
}

McGridConfig parse_mc_config(const Json& j) {
    std::vector<std::string> errors;
    McGridConfig grid = parse_mc_config_impl(j, errors);
    throw_if_errors(errors);
    return grid;
}

ConfigFile parse_config_file(const Json& j) {
    std::vector<std::string> errors;
    if (!j.is_object()) {
        throw std::invalid_argument("config: expected a JSON object");
    }
    if (!j.contains("schema_version")) {
        errors.push_back("config: missing schema_version");
    } else if (!j.at("schema_version").is_number_integer() ||
               j.at("schema_version").get<int>() != kSchemaVersion) {
        errors.push_back("config: unsupported schema_version");
    }

    static const std::set<std::string> allowed = {
        "schema_version", "m",         "nodes_per_domain",
        "l",              "t",         "difficulty_bits",
        "seed",           "rounds",    "initiator",
        "tx_count_per_block", "failure_schedule", "capacity",
        "mc"};
    reject_unknown_keys(j, allowed, "config", errors);

    Json sim_fields = Json::object();
    for (const auto& [key, value] : j.items()) {
        if (key != "schema_version" && key != "capacity" && key != "mc" &&
            allowed.contains(key)) {
            sim_fields[key] = value;
        }
    }

    ConfigFile file;
    file.sim = parse_sim_config_impl(sim_fields, errors);
    if (j.contains("mc")) {
        file.mc = parse_mc_config_impl(j.at("mc"), errors);
    } else {
        file.mc.domains_values = {file.mc.base.domains};
        file.mc.alpha_values = {file.mc.base.alpha};
        file.mc.top_x_values = {file.mc.base.top_x_percent};
    }
    if (j.contains("capacity")) {
        file.capacity = parse_capacity_params_impl(j.at("capacity"), errors);
    }
    throw_if_errors(errors);
    return file;
}

ConfigFile load_config_file(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
    return parse_config_file(j);
}

// --- output helpers ----------------------------------------------------------

std::string to_jsonl(const std::vector<TranscriptEvent>& transcript) {
    std::string out;
    for (const TranscriptEvent& event : transcript) {
        out += to_json(event).dump();
        out += '\n';
    }
    return out;
}

std::string histogram_csv(const Histogram& histogram) {
    std::string out = "bin_left,count,density\n";
    for (const HistogramBin& bin : histogram.bins) {
        out += format_double(bin.left);
        out += ',';
        out += std::to_string(bin.count);
        out += ',';
        out += format_double(bin.density);
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    file.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!file) {
        throw std::runtime_error("write failed: " + path);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open: " + path);
    }
    std::ostringstream out;
    out << file.rdbuf();
    return out.str();
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

} // namespace xref
