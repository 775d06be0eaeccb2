#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>

#include "xrefchain/capacity.hpp"
#include "xrefchain/chain.hpp"
#include "xrefchain/hysteresis.hpp"
#include "xrefchain/netsim.hpp"
#include "xrefchain/tamper_mc.hpp"

namespace xref {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// --- domain types <-> json (digests and signatures as lowercase hex) ------

Json to_json(const HashDigest& digest);
HashDigest digest_from_json(const Json& j);

Json to_json(const Signature& signature);
Signature signature_from_json(const Json& j);

Json to_json(const KeyPair& key);
KeyPair keypair_from_json(const Json& j);

Json to_json(const HysteresisSignature& entry);
HysteresisSignature hysteresis_signature_from_json(const Json& j);

Json to_json(const HysteresisChain& chain);
HysteresisChain hysteresis_chain_from_json(const Json& j);

Json to_json(const Block& block);
Block block_from_json(const Json& j);

Json to_json(const DomainChain& chain);
DomainChain domain_chain_from_json(const Json& j);

Json to_json(const ReferenceIndex& index);
ReferenceIndex reference_index_from_json(const Json& j);

Json to_json(const Message& message);
Message message_from_json(const Json& j);

Json to_json(const CcnState& ccn);
CcnState ccn_state_from_json(const Json& j);

Json to_json(const PcnState& pcn);
PcnState pcn_state_from_json(const Json& j);

Json to_json(const RoundMetrics& metrics);
RoundMetrics round_metrics_from_json(const Json& j);

Json to_json(const SimConfig& config);

Json to_json(const TranscriptEvent& event);

Json to_json(const SimWorld& world); // complete world state (minus transcript)
SimWorld world_from_json(const Json& j);

Json to_json(const ProtocolOutcome& outcome);

// --- config files ----------------------------------------------------------

// Strict parsers: unknown fields, bad types, and out-of-range values are
// reported together in std::invalid_argument. The mc document may carry
// plural fields (domains_values, alpha_values, top_x_values) for grid runs.
SimConfig parse_sim_config(const Json& j);

struct McGridConfig {
    McConfig base;
    std::vector<std::uint32_t> domains_values; // defaults to {base.domains}
    std::vector<double> alpha_values;
    std::vector<double> top_x_values;
    std::vector<std::uint32_t> f_values; // failure-mc sweeps
};

McGridConfig parse_mc_config(const Json& j);

// Full config document: {"schema_version": 1, "m": ..., "mc": {...}, ...}.
struct ConfigFile {
    SimConfig sim;
    McGridConfig mc;
    CapacityParams capacity;
};

ConfigFile parse_config_file(const Json& j);
ConfigFile load_config_file(const std::string& path);

// --- output helpers ---------------------------------------------------------

std::string to_jsonl(const std::vector<TranscriptEvent>& transcript);

std::string histogram_csv(const Histogram& histogram);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

// Fixed-format float: deterministic output for CSV and summaries.
std::string format_double(double value);

} // namespace xref
