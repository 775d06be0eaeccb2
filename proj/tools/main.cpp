#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "xrefchain/cli.hpp"

namespace {

using namespace xref;
using namespace xref::cli;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-domain blockchain cross-referencing simulator and analytics"};
    app.require_subcommand(1);

    // simulate
    SimulateOptions simulate;
    std::optional<std::uint64_t> seed;
    auto* sim_cmd = app.add_subcommand("simulate", "Run cross-referencing rounds");
    sim_cmd->add_option("--config", simulate.config_path, "Config JSON path")->required();
    sim_cmd->add_option("--flowchart", simulate.flowchart, "1 (no failures) or 2 (t-tolerant)")
        ->check(CLI::Range(1, 2));
    sim_cmd->add_option("--out", simulate.out_dir, "Output directory")->required();
    sim_cmd->add_option("--seed", seed, "Seed override");

    // tamper-demo
    TamperDemoOptions tamper;
    auto* tamper_cmd =
        app.add_subcommand("tamper-demo", "Tamper with a block and audit the evidence");
    tamper_cmd->add_option("--snapshot", tamper.snapshot_path, "snapshot.json from simulate")
        ->required();
    tamper_cmd->add_option("--domain", tamper.domain, "Target domain")->required();
    tamper_cmd->add_option("--height", tamper.height, "Target height")->required();
    tamper_cmd->add_flag("--remine,!--no-remine", tamper.remine,
                         "Re-mine the tampered suffix (default on)");
    tamper_cmd->add_option("--seed", tamper.tamper_seed, "Tamper payload seed");

    // capacity
    CapacityOptions capacity;
    std::string sweep_spec = "60:1200:60";
    std::vector<double> scale_values;
    auto* capacity_cmd = app.add_subcommand("capacity", "Fork probability and G(tau) table");
    capacity_cmd->add_option("--tau-sweep", sweep_spec, "Sweep lo:hi:step in seconds");
    capacity_cmd->add_option("--c-txs", capacity.params.c_txs, "Transactions per block");
    capacity_cmd->add_option("--tau-fork", capacity.params.tau_fork,
                             "Propagation latency, seconds");
    capacity_cmd
        ->add_option("--scale", scale_values,
                     "base_tps block_size_ratio interval_ratio domain_count")
        ->expected(4);
    capacity_cmd->add_flag("--json", capacity.as_json, "Emit JSON instead of CSV");

    // tamper-mc / failure-mc
    McOptions mc;
    auto* mc_cmd = app.add_subcommand("tamper-mc", "Monte Carlo R and R' distributions");
    mc_cmd->add_option("--config", mc.config_path, "Config JSON path")->required();
    mc_cmd->add_option("--out", mc.out_dir, "Output directory")->required();
    mc_cmd->add_option("--workers", mc.workers, "Worker threads")->check(CLI::PositiveNumber);
    mc_cmd->add_option("--seed", seed, "Seed override");

    McOptions failure_mc;
    auto* failure_cmd =
        app.add_subcommand("failure-mc", "Monte Carlo sweep over stop-failed domain counts");
    failure_cmd->add_option("--config", failure_mc.config_path, "Config JSON path")->required();
    failure_cmd->add_option("--out", failure_mc.out_dir, "Output directory")->required();
    failure_cmd->add_option("--workers", failure_mc.workers, "Worker threads")
        ->check(CLI::PositiveNumber);
    failure_cmd->add_option("--f", failure_mc.f_values, "Failed-domain counts to sweep");
    failure_cmd->add_option("--seed", seed, "Seed override");

    // dump-chain
    DumpChainOptions dump;
    auto* dump_cmd = app.add_subcommand("dump-chain", "Print one domain's chain as JSON");
    dump_cmd->add_option("--snapshot", dump.snapshot_path, "snapshot.json from simulate")
        ->required();
    dump_cmd->add_option("--domain", dump.domain, "Domain id")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitSuccess : kExitConfigError;
    }

    if (sim_cmd->parsed()) {
        simulate.seed_override = seed;
        return cmd_simulate(simulate, std::cerr);
    }
    if (tamper_cmd->parsed()) {
        return cmd_tamper_demo(tamper, std::cout, std::cerr);
    }
    if (capacity_cmd->parsed()) {
        const auto parsed = parse_tau_sweep(sweep_spec, capacity);
        if (!parsed.has_value()) {
            std::cerr << "malformed --tau-sweep, expected lo:hi:step\n";
            return kExitConfigError;
        }
        CapacityOptions options = *parsed;
        if (!scale_values.empty()) {
            options.scale = ScalingFactors{scale_values[0], scale_values[1], scale_values[2],
                                           scale_values[3]};
        }
        return cmd_capacity(options, std::cout, std::cerr);
    }
    if (mc_cmd->parsed()) {
        mc.seed_override = seed;
        return cmd_tamper_mc(mc, std::cerr);
    }
    if (failure_cmd->parsed()) {
        failure_mc.seed_override = seed;
        return cmd_failure_mc(failure_mc, std::cerr);
    }
    if (dump_cmd->parsed()) {
        return cmd_dump_chain(dump, std::cout, std::cerr);
    }
    return kExitConfigError;
}
