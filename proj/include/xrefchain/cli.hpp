#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xrefchain/capacity.hpp"
#include "xrefchain/types.hpp"

namespace xref::cli {

// Exit-code contract shared by every subcommand:
//   0 success (or tamper detected), 1 protocol/detection failure,
//   2 usage or configuration error.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitOutcomeFailure = 1;
inline constexpr int kExitConfigError = 2;

// Relative config paths that do not resolve locally are retried against
// this directory.
inline constexpr const char* kConfigDirEnvVar = "XREFCHAIN_CONFIG_DIR";

[[nodiscard]] std::string resolve_config_path(const std::string& path);

struct SimulateOptions {
    std::string config_path;
    int flowchart = 1;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
};

int cmd_simulate(const SimulateOptions& options, std::ostream& err);

struct TamperDemoOptions {
    std::string snapshot_path;
    DomainId domain = 0;
    BlockHeight height = 0;
    bool remine = true;
    std::uint64_t tamper_seed = 0xbadc0de;
};

int cmd_tamper_demo(const TamperDemoOptions& options, std::ostream& out, std::ostream& err);

struct CapacityOptions {
    double sweep_lo = 60.0;
    double sweep_hi = 1200.0;
    double sweep_step = 60.0;
    CapacityParams params;
    std::optional<ScalingFactors> scale;
    bool as_json = false;
};

[[nodiscard]] std::optional<CapacityOptions> parse_tau_sweep(const std::string& spec,
                                                             CapacityOptions base);

int cmd_capacity(const CapacityOptions& options, std::ostream& out, std::ostream& err);

struct McOptions {
    std::string config_path;
    std::string out_dir;
    std::uint32_t workers = 1;
    std::optional<std::uint64_t> seed_override;
    std::vector<std::uint32_t> f_values; // failure-mc; empty -> config f_values
};

int cmd_tamper_mc(const McOptions& options, std::ostream& err);
int cmd_failure_mc(const McOptions& options, std::ostream& err);

struct DumpChainOptions {
    std::string snapshot_path;
    DomainId domain = 0;
};

int cmd_dump_chain(const DumpChainOptions& options, std::ostream& out, std::ostream& err);

} // namespace xref::cli
