#include "xrefchain/cli.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "xrefchain/bytes.hpp"
#include "xrefchain/json_io.hpp"
#include "xrefchain/netsim.hpp"
#include "xrefchain/protocol.hpp"
#include "xrefchain/tamper_mc.hpp"

namespace xref::cli {

namespace fs = std::filesystem;

std::string resolve_config_path(const std::string& path) {
    if (fs::exists(path) || fs::path(path).is_absolute()) {
        return path;
    }
    const char* dir = std::getenv(kConfigDirEnvVar);
    if (dir == nullptr || *dir == '\0') {
        return path;
    }
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) {
        return candidate.string();
    }
    return path;
}

namespace {

Json stats_json(const SeriesStats& stats) {
    return Json{{"mean", stats.mean},     {"median", stats.median},
                {"variance", stats.variance}, {"mode_bin_left", stats.mode_bin_left},
                {"min", stats.min},       {"max", stats.max}};
}

Json mc_cell_config_json(const McConfig& config) {
    // workers is a runtime knob, not an experiment parameter; keeping it out
    // of the summary keeps multi-worker reruns byte-identical.
    return Json{{"N", config.total_nodes},
                {"m", config.domains},
                {"alpha", config.alpha},
                {"top_x_percent", config.top_x_percent},
                {"trials", config.trials},
                {"f", config.failed_domains},
                {"failure_mode", to_string(config.failure_mode)},
                {"seed", config.seed},
                {"bin_width", config.bin_width}};
}

std::string number_tag(double value) { return format_double(value); }

void ensure_out_dir(const std::string& out_dir) {
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
    }
}

Json audits_json(const SimWorld& world) {
    const auto foreign_chains = world.hysteresis_chains();
    const auto keys = world.public_keys();
    Json audits = Json::array();
    for (const auto& [round, refs] : world.reference_index.rounds()) {
        for (const auto& [domain, height] : refs) {
            const DomainChain& chain = world.chains.at(domain);
            if (height > chain.tip_height()) {
                continue;
            }
            const HashDigest local = block_hash(chain.blocks[height]);
            const AuditReport report =
                cross_domain_audit(domain, height, local, foreign_chains, keys,
                                   world.reference_index);
            audits.push_back(Json{{"round", round},
                                  {"domain_id", domain},
                                  {"height", height},
                                  {"consistent", report.consistent},
                                  {"conflicting_domains", report.conflicting_domains},
                                  {"no_evidence_domains", report.no_evidence_domains}});
        }
    }
    return audits;
}

} // namespace

int cmd_simulate(const SimulateOptions& options, std::ostream& err) {
    ConfigFile config;
    try {
        config = load_config_file(resolve_config_path(options.config_path));
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    if (options.flowchart != 1 && options.flowchart != 2) {
        err << "config error: flowchart must be 1 or 2\n";
        return kExitConfigError;
    }
    if (options.flowchart == 1 && !config.sim.failure_schedule.empty()) {
        err << "config error: flowchart 1 requires an empty failure_schedule\n";
        return kExitConfigError;
    }
    if (options.seed_override.has_value()) {
        config.sim.seed = *options.seed_override;
    }

    SimWorld world = build_world(config.sim);
    Json outcomes = Json::array();
    bool all_success = true;
    std::string failure_status;
    for (std::uint32_t round = 0; round < config.sim.rounds; ++round) {
        ProtocolOutcome outcome =
            options.flowchart == 1
                ? run_flowchart1(world, config.sim.initiator, config.sim.l)
                : run_flowchart2(world, config.sim.initiator, config.sim.l, config.sim.t);
        outcomes.push_back(to_json(outcome));
        if (outcome.status != OutcomeStatus::success) {
            all_success = false;
            failure_status = to_string(outcome.status);
            break;
        }
    }

    Json summary{{"schema_version", kSchemaVersion},
                 {"status", all_success ? "success" : failure_status},
                 {"flowchart", options.flowchart},
                 {"rounds_requested", config.sim.rounds},
                 {"outcomes", outcomes},
                 {"metrics", to_json(world.metrics)},
                 {"audits", audits_json(world)}};

    try {
        ensure_out_dir(options.out_dir);
        const fs::path out = options.out_dir;
        write_file((out / "transcript.jsonl").string(), to_jsonl(world.transcript));
        write_file((out / "summary.json").string(), summary.dump(2) + "\n");
        Json snapshot{{"schema_version", kSchemaVersion},
                      {"world", to_json(world)},
                      {"outcomes", outcomes}};
        write_file((out / "snapshot.json").string(), snapshot.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "output error: " << e.what() << "\n";
        return kExitConfigError;
    }

    if (!all_success) {
        err << failure_status << "\n";
        return kExitOutcomeFailure;
    }
    return kExitSuccess;
}

int cmd_tamper_demo(const TamperDemoOptions& options, std::ostream& out, std::ostream& err) {
    SimWorld world;
    try {
        const Json snapshot = Json::parse(read_file(resolve_config_path(options.snapshot_path)));
        world = world_from_json(snapshot.at("world"));
    } catch (const std::exception& e) {
        err << "snapshot error: " << e.what() << "\n";
        return kExitConfigError;
    }
    const auto chain_it = world.chains.find(options.domain);
    if (chain_it == world.chains.end()) {
        err << "unknown domain " << options.domain << "\n";
        return kExitConfigError;
    }
    if (chain_it->second.empty() || options.height > chain_it->second.tip_height()) {
        err << "height out of range\n";
        return kExitConfigError;
    }

    ByteWriter payload;
    payload.raw("xrefchain/tampered-payload");
    payload.u32be(options.domain);
    payload.u64be(options.height);
    payload.u64be(options.tamper_seed);
    const DomainChain tampered =
        tamper_block(chain_it->second, options.height, hash(as_span(payload.bytes())),
                     options.remine, options.tamper_seed);

    const ChainValidationReport validation = validate_chain(tampered);
    const HashDigest local = block_hash(tampered.blocks[options.height]);
    const AuditReport audit =
        cross_domain_audit(options.domain, options.height, local, world.hysteresis_chains(),
                           world.public_keys(), world.reference_index);

    const bool locally_invalid = !validation.valid;
    const bool audit_detected = !audit.conflicting_domains.empty();
    const bool detected = locally_invalid || audit_detected;
    const bool no_evidence = !audit.round.has_value();

    Json report{{"domain_id", options.domain},
                {"height", options.height},
                {"remine", options.remine},
                {"local_validation_passed", validation.valid},
                {"audit",
                 Json{{"consistent", audit.consistent},
                      {"round", audit.round.has_value() ? Json(*audit.round) : Json(nullptr)},
                      {"conflicting_domains", audit.conflicting_domains},
                      {"no_evidence_domains", audit.no_evidence_domains}}},
                {"verdict", detected        ? "tamper detected"
                            : no_evidence   ? "no evidence"
                                            : "undetected"},
                {"detected", detected}};
    out << report.dump(2) << "\n";
    return detected ? kExitSuccess : kExitOutcomeFailure;
}

std::optional<CapacityOptions> parse_tau_sweep(const std::string& spec, CapacityOptions base) {
    const std::size_t first = spec.find(':');
    const std::size_t second = spec.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos) {
        return std::nullopt;
    }
    try {
        base.sweep_lo = std::stod(spec.substr(0, first));
        base.sweep_hi = std::stod(spec.substr(first + 1, second - first - 1));
        base.sweep_step = std::stod(spec.substr(second + 1));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (!(base.sweep_lo > 0.0) || base.sweep_hi < base.sweep_lo || !(base.sweep_step > 0.0)) {
        return std::nullopt;
    }
    return base;
}

int cmd_capacity(const CapacityOptions& options, std::ostream& out, std::ostream& err) {
    try {
        CapacityParams params = options.params;
        Json rows = Json::array();
        std::ostringstream csv;
        csv << "tau,fork_probability,fork_approx,unfork_probability,capacity_tps\n";
        for (double tau = options.sweep_lo; tau <= options.sweep_hi + 1e-9;
             tau += options.sweep_step) {
            params.tau = tau;
            const double fork = fork_probability(params);
            const double approx = fork_probability_linear(params);
            const double unfork = unfork_probability(params);
            const double tps = capacity_tps(params);
            csv << format_double(tau) << ',' << format_double(fork) << ','
                << format_double(approx) << ',' << format_double(unfork) << ','
                << format_double(tps) << '\n';
            rows.push_back(Json{{"tau", tau},
                                {"fork_probability", fork},
                                {"fork_approx", approx},
                                {"unfork_probability", unfork},
                                {"capacity_tps", tps}});
        }
        const double tau_opt = optimal_tau(params);
        const double g_opt = optimal_capacity_tps(params);
        csv << "tau_opt," << format_double(tau_opt) << '\n';
        csv << "g_opt," << format_double(g_opt) << '\n';
        Json footer{{"tau_opt", tau_opt}, {"g_opt", g_opt}};
        if (options.scale.has_value()) {
            const double scaled = scaled_capacity(*options.scale);
            csv << "scaled_capacity," << format_double(scaled) << '\n';
            footer["scaled_capacity"] = scaled;
        }
        if (options.as_json) {
            out << Json{{"rows", rows}, {"footer", footer}}.dump(2) << "\n";
        } else {
            out << csv.str();
        }
        return kExitSuccess;
    } catch (const std::exception& e) {
        err << "capacity error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

namespace {

// One Monte Carlo cell: histograms plus a summary block. R does not depend
// on X, so per (m, alpha) the R histogram is written once.
void write_cell_outputs(const fs::path& out, const McConfig& cell,
                        const DistributionSummary& summary, bool write_r, Json& cells) {
    const std::string m_tag = std::to_string(cell.domains);
    const std::string alpha_tag = number_tag(cell.alpha);
    const std::string x_tag = number_tag(cell.top_x_percent);
    if (write_r) {
        write_file((out / ("r_m" + m_tag + "_alpha" + alpha_tag + ".csv")).string(),
                   histogram_csv(summary.r_histogram));
    }
    write_file(
        (out / ("rprime_m" + m_tag + "_alpha" + alpha_tag + "_x" + x_tag + ".csv")).string(),
        histogram_csv(summary.r_prime_histogram));
    cells.push_back(Json{{"config", mc_cell_config_json(cell)},
                         {"r", stats_json(summary.r_stats)},
                         {"r_prime", stats_json(summary.r_prime_stats)}});
}

} // namespace

int cmd_tamper_mc(const McOptions& options, std::ostream& err) {
    ConfigFile config;
    try {
        config = load_config_file(resolve_config_path(options.config_path));
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    McConfig base = config.mc.base;
    if (options.seed_override.has_value()) {
        base.seed = *options.seed_override;
    }
    base.workers = options.workers;

    try {
        ensure_out_dir(options.out_dir);
        const fs::path out = options.out_dir;
        Json cells = Json::array();
        for (std::uint32_t m : config.mc.domains_values) {
            for (double alpha : config.mc.alpha_values) {
                bool first_x = true;
                for (double x : config.mc.top_x_values) {
                    McConfig cell = base;
                    cell.domains = m;
                    cell.alpha = alpha;
                    cell.top_x_percent = x;
                    const DistributionSummary summary = run_monte_carlo(cell);
                    write_cell_outputs(out, cell, summary, first_x, cells);
                    first_x = false;
                }
            }
        }
        const Json summary{
            {"schema_version", kSchemaVersion},
            {"cells", cells},
            {"r_prime_note",
             "with equal selection counts a per-domain top-X% pick cannot out-sum the "
             "unconstrained global top-X% pick, so r_prime <= 1 by construction"}};
        write_file((out / "summary.json").string(), summary.dump(2) + "\n");
        return kExitSuccess;
    } catch (const std::exception& e) {
        err << "tamper-mc error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int cmd_failure_mc(const McOptions& options, std::ostream& err) {
    ConfigFile config;
    try {
        config = load_config_file(resolve_config_path(options.config_path));
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    McConfig base = config.mc.base;
    if (options.seed_override.has_value()) {
        base.seed = *options.seed_override;
    }
    base.workers = options.workers;
    std::vector<std::uint32_t> f_values =
        options.f_values.empty() ? config.mc.f_values : options.f_values;
    if (f_values.empty()) {
        f_values = {1, 3, 5};
    }

    try {
        ensure_out_dir(options.out_dir);
        const fs::path out = options.out_dir;
        Json cells = Json::array();
        for (std::uint32_t m : config.mc.domains_values) {
            McConfig cell = base;
            cell.domains = m;
            const auto sweep = run_failure_sweep(cell, f_values);
            for (const auto& [f, summary] : sweep) {
                const std::string m_tag = std::to_string(m);
                const std::string f_tag = std::to_string(f);
                write_file((out / ("r_m" + m_tag + "_f" + f_tag + ".csv")).string(),
                           histogram_csv(summary.r_histogram));
                write_file((out / ("rprime_m" + m_tag + "_f" + f_tag + ".csv")).string(),
                           histogram_csv(summary.r_prime_histogram));
                McConfig described = cell;
                described.failed_domains = f;
                cells.push_back(Json{{"config", mc_cell_config_json(described)},
                                     {"r", stats_json(summary.r_stats)},
                                     {"r_prime", stats_json(summary.r_prime_stats)}});
            }
        }
        const Json summary{{"schema_version", kSchemaVersion}, {"cells", cells}};
        write_file((out / "summary.json").string(), summary.dump(2) + "\n");
        return kExitSuccess;
    } catch (const std::exception& e) {
        err << "failure-mc error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int cmd_dump_chain(const DumpChainOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const Json snapshot = Json::parse(read_file(resolve_config_path(options.snapshot_path)));
        const SimWorld world = world_from_json(snapshot.at("world"));
        const auto it = world.chains.find(options.domain);
        if (it == world.chains.end()) {
            err << "unknown domain " << options.domain << "\n";
            return kExitConfigError;
        }
        out << to_json(it->second).dump(2) << "\n";
        return kExitSuccess;
    } catch (const std::exception& e) {
        err << "snapshot error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

} // namespace xref::cli
