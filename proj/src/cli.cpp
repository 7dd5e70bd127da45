#include "swarm_ec/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "swarm_ec/experiment.hpp"
#include "swarm_ec/hashtree.hpp"
#include "swarm_ec/netstore_sim.hpp"
#include "swarm_ec/parity_planner.hpp"
#include "swarm_ec/replica_miner.hpp"
#include "swarm_ec/retrieval.hpp"

namespace swarm_ec::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimFlags {
    double eps = 0.0;
    std::string latency = "constant:0";
    std::uint64_t seed = 0;
    std::vector<std::string> dead_prefixes;
    std::string failure_mode;

    void attach(CLI::App& app, const std::string& default_mode)
    {
        failure_mode = default_mode;
        app.add_option("--eps", eps, "Per-get failure probability")->check(CLI::Range(0.0, 1.0));
        app.add_option("--latency", latency, "constant:V | uniform:LO:HI | lognormal:MU:SIGMA (ms)");
        app.add_option("--seed", seed, "Simulator seed");
        app.add_option("--dead-prefix", dead_prefixes, "Binary address prefix that always fails (repeatable)");
        app.add_option("--failure-mode", failure_mode, "per_get_transient | per_chunk_permanent");
    }

    SimConfig config() const
    {
        SimConfig cfg;
        cfg.seed = seed;
        cfg.eps = eps;
        try {
            cfg.latency = LatencyModel::parse(latency);
            cfg.failure_mode = parse_failure_mode(failure_mode);
            for (const auto& p : dead_prefixes)
                cfg.dead_prefixes.push_back(DeadPrefix::parse(p));
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        return cfg;
    }
};

Level level_or_usage(const std::string& name)
{
    auto level = parse_level(name);
    if (!level)
        throw UsageError("unknown security level '" + name + "' (none, medium, strong, insane, paranoid)");
    return *level;
}

StrategyKind strategy_or_usage(const std::string& name)
{
    auto kind = parse_strategy(name);
    if (!kind)
        throw UsageError("unknown strategy '" + name + "' (none, data, prox, race)");
    return *kind;
}

fs::path manifest_path(const DiskStore& store, const Address& root)
{
    return store.manifest_dir() / (root.hex() + ".json");
}

std::optional<TreeManifest> load_manifest(const DiskStore& store, const Address& root)
{
    std::ifstream in(manifest_path(store, root));
    if (!in)
        return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    return TreeManifest::from_json(buf.str());
}

void save_manifest(const DiskStore& store, const TreeManifest& manifest)
{
    std::ofstream out(manifest_path(store, manifest.root.address));
    out << manifest.to_json() << '\n';
}

void print_plan_row(std::ostream& out, const ParityPlan& plan)
{
    out << static_cast<int>(plan.level.id) << ',' << plan.level.name << ',' << plan.level.epsilon << ','
        << (plan.encrypted ? "true" : "false") << ',' << plan.m << ',' << plan.k << '\n';
}

void print_outcome(std::ostream& out, const BatchOutcome& o, int batches)
{
    out << "recovered=" << (o.recovered ? "true" : "false") << " requests=" << o.requests_issued
        << " chunks_used=" << o.chunks_used << " wall_latency_ms=" << o.wall_latency_ms
        << " bytes_fetched=" << o.bytes_fetched << " batches=" << batches << '\n';
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Erasure-coded chunk trees, parity planning, dispersed replicas and retrieval simulation"};
    app.require_subcommand(1);

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "Full-batch composition per security level (CSV)");
    std::string plan_level;
    std::optional<bool> plan_encrypted;
    plan_cmd->add_option("--level", plan_level, "Security level name or id");
    plan_cmd->add_option("--encrypted", plan_encrypted, "Restrict to encrypted (true) or plain (false) layouts");

    // tables
    auto* tables_cmd = app.add_subcommand("tables", "Parities per partial batch size and singleton replicas (CSV)");

    // encode
    auto* encode_cmd = app.add_subcommand("encode", "Chunk a file into an erasure-coded tree in a store");
    std::string enc_file, enc_store, enc_level = "medium";
    bool enc_encrypted = false, enc_replicate = false;
    std::uint64_t enc_seed = 0;
    encode_cmd->add_option("--file", enc_file, "Input file")->required();
    encode_cmd->add_option("--store", enc_store, "Store directory")->required();
    encode_cmd->add_option("--level", enc_level, "Security level");
    encode_cmd->add_flag("--encrypted", enc_encrypted, "Encrypt chunks; the root reference carries the key");
    encode_cmd->add_option("--seed", enc_seed, "Key derivation seed");
    encode_cmd->add_flag("--replicate", enc_replicate, "Also store dispersed replicas of the root");

    // decode
    auto* decode_cmd = app.add_subcommand("decode", "Reassemble a file from its root reference");
    std::string dec_ref, dec_store, dec_out, dec_level, dec_strategy = "race", dec_node;
    bool dec_no_replicas = false;
    int dec_inflight = 32;
    SimFlags dec_sim;
    decode_cmd->add_option("--ref", dec_ref, "Root reference hex (64 or 128 digits)")->required();
    decode_cmd->add_option("--store", dec_store, "Store directory")->required();
    decode_cmd->add_option("--out", dec_out, "Output file")->required();
    decode_cmd->add_option("--level", dec_level, "Security level (default: from manifest)");
    decode_cmd->add_option("--strategy", dec_strategy, "none | data | prox | race");
    decode_cmd->add_option("--node", dec_node, "Node overlay address hex (PROX, replica choice)");
    decode_cmd->add_option("--max-inflight", dec_inflight, "Concurrent gets per batch")->check(CLI::PositiveNumber);
    decode_cmd->add_flag("--no-replicas", dec_no_replicas, "Do not fall back to dispersed replicas for the root");
    dec_sim.attach(*decode_cmd, "per_get_transient");

    // replicate
    auto* repl_cmd = app.add_subcommand("replicate", "Mine and store dispersed replicas of a root chunk");
    std::string repl_ref, repl_store, repl_level;
    repl_cmd->add_option("--ref", repl_ref, "Root reference hex")->required();
    repl_cmd->add_option("--store", repl_store, "Store directory")->required();
    repl_cmd->add_option("--level", repl_level, "Security level (default: from manifest)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo retrieval experiment (CSV)");
    std::uint64_t sim_size = 4096 * 128;
    std::uint64_t sim_content_seed = 1;
    std::string sim_level = "medium", sim_strategy = "race", sim_out;
    bool sim_encrypted = false, sim_no_replicas = false;
    int sim_trials = 100, sim_inflight = 1;
    SimFlags sim_flags;
    sim_cmd->add_option("--size", sim_size, "File size in bytes");
    sim_cmd->add_option("--content-seed", sim_content_seed, "Seed of the synthetic file content");
    sim_cmd->add_option("--level", sim_level, "Security level");
    sim_cmd->add_option("--strategy", sim_strategy, "none | data | prox | race | all");
    sim_cmd->add_option("--trials", sim_trials, "Number of seeded trials")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--max-inflight", sim_inflight, "Concurrent gets per batch")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--out", sim_out, "Write CSV here instead of stdout");
    sim_cmd->add_flag("--encrypted", sim_encrypted, "Encrypted tree");
    sim_cmd->add_flag("--no-replicas", sim_no_replicas, "Do not replicate the root");
    sim_flags.attach(*sim_cmd, "per_chunk_permanent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (plan_cmd->parsed()) {
            std::vector<Level> levels;
            if (plan_level.empty())
                for (const auto& l : kSecurityLevels)
                    levels.push_back(l.id);
            else
                levels.push_back(level_or_usage(plan_level));
            out << "level,name,eps,encrypted,m,k\n";
            for (bool encrypted : {false, true}) {
                if (plan_encrypted && *plan_encrypted != encrypted)
                    continue;
                for (Level l : levels)
                    print_plan_row(out, plan_for_level(l, encrypted));
            }
            return kExitOk;
        }

        if (tables_cmd->parsed()) {
            out << "level,parities,min_chunks,max_chunks,encrypted_min,encrypted_max\n";
            for (const auto& l : kSecurityLevels) {
                if (l.id == Level::none)
                    continue;
                for (const auto& row : parity_table(l.id)) {
                    out << l.name << ',' << row.parities << ',' << row.min_chunks << ',' << row.max_chunks << ',';
                    if (row.encrypted_min)
                        out << *row.encrypted_min << ',' << *row.encrypted_max;
                    else
                        out << ',';
                    out << '\n';
                }
            }
            out << '\n' << "level,name,eps,parities_required,dispersed_replicas\n";
            for (const auto& l : kSecurityLevels) {
                int parities = l.epsilon > 0.0 ? singleton_parities(l.epsilon) : 0;
                out << static_cast<int>(l.id) << ',' << l.name << ',' << l.epsilon << ',' << parities << ','
                    << replica_count(l.id) << '\n';
            }
            return kExitOk;
        }

        if (encode_cmd->parsed()) {
            Level level = level_or_usage(enc_level);
            std::ifstream in(enc_file, std::ios::binary);
            if (!in)
                throw UsageError("cannot read " + enc_file);
            DiskStore store(enc_store);
            EncodeResult result = encode_stream(in, level, enc_encrypted, enc_seed);
            store_all(result, store);
            if (enc_replicate && replica_count(level) > 0) {
                ReplicaSet set = mine_replicas(*result.root_chunk, replica_depth(level));
                for (const auto& soc : set.rho)
                    if (soc)
                        put_soc(store, *soc);
                result.manifest.replica_depth = set.depth;
            }
            save_manifest(store, result.manifest);
            out << "root " << result.manifest.root.hex() << '\n';
            out << "manifest " << manifest_path(store, result.manifest.root.address).string() << '\n';
            out << "chunks " << result.manifest.chunk_count() << '\n';
            out << "parities " << result.manifest.parity_count() << '\n';
            return kExitOk;
        }

        if (decode_cmd->parsed()) {
            Reference root;
            try {
                root = Reference::from_hex(dec_ref);
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
            auto disk = std::make_shared<DiskStore>(dec_store);
            std::optional<Level> level;
            if (!dec_level.empty())
                level = level_or_usage(dec_level);
            else if (auto manifest = load_manifest(*disk, root.address))
                level = manifest->plan.level.id;
            if (!level)
                throw UsageError("no manifest for this root; pass --level");

            DecodeOptions options;
            options.strategy.kind = strategy_or_usage(dec_strategy);
            options.strategy.max_inflight = dec_inflight;
            options.use_replicas = !dec_no_replicas;
            if (!dec_node.empty()) {
                try {
                    options.strategy.node_overlay = Address::from_hex(dec_node);
                } catch (const Error& e) {
                    throw UsageError(e.what());
                }
            } else if (options.strategy.kind == StrategyKind::prox) {
                throw UsageError("strategy prox needs --node");
            }
            SimStore source(dec_sim.config(), disk);
            DecodeResult result = decode_stream(root, *level, source, options);
            std::ofstream file(dec_out, std::ios::binary | std::ios::trunc);
            file.write(reinterpret_cast<const char*>(result.data.data()), static_cast<std::streamsize>(result.data.size()));
            if (!file)
                throw UsageError("cannot write " + dec_out);
            print_outcome(out, result.outcome, result.batches);
            return kExitOk;
        }

        if (repl_cmd->parsed()) {
            Reference root;
            try {
                root = Reference::from_hex(repl_ref);
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
            DiskStore store(repl_store);
            auto manifest = load_manifest(store, root.address);
            Level level;
            if (!repl_level.empty())
                level = level_or_usage(repl_level);
            else if (manifest)
                level = manifest->plan.level.id;
            else
                throw UsageError("no manifest for this root; pass --level");
            GetResult got = store.get(root.address);
            if (!got.data || content_address_of_serialized(*got.data) != root.address) {
                err << "error: root chunk " << root.address.hex() << " not in store\n";
                return kExitRetrievalFailure;
            }
            out << "bin,nonce,address\n";
            if (replica_count(level) == 0)
                return kExitOk;
            ReplicaSet set = mine_replicas(Chunk::deserialize(*got.data), replica_depth(level));
            for (std::size_t j = 0; j < set.rho.size(); ++j) {
                if (!set.rho[j])
                    continue;
                Address a = put_soc(store, *set.rho[j]);
                out << j << ',' << static_cast<int>(*set.nonces[j]) << ',' << a.hex() << '\n';
            }
            if (manifest) {
                manifest->replica_depth = set.depth;
                save_manifest(store, *manifest);
            }
            return kExitOk;
        }

        if (sim_cmd->parsed()) {
            ExperimentSpec spec;
            spec.file_size = sim_size;
            spec.content_seed = sim_content_seed;
            spec.level = level_or_usage(sim_level);
            spec.encrypted = sim_encrypted;
            spec.sim = sim_flags.config();
            spec.trials = sim_trials;
            spec.replicate_root = !sim_no_replicas;
            spec.strategy.max_inflight = sim_inflight;
            std::vector<StrategyKind> kinds;
            if (sim_strategy == "all")
                kinds = {StrategyKind::none, StrategyKind::data, StrategyKind::prox, StrategyKind::race};
            else
                kinds = {strategy_or_usage(sim_strategy)};

            std::ofstream file;
            if (!sim_out.empty()) {
                file.open(sim_out, std::ios::trunc);
                if (!file)
                    throw UsageError("cannot write " + sim_out);
            }
            std::ostream& csv = sim_out.empty() ? out : file;
            csv << ExperimentReport::csv_header() << '\n';
            for (StrategyKind kind : kinds) {
                spec.strategy.kind = kind;
                csv << run_experiment(spec).csv_row() << '\n';
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::invalid_argument ? kExitUsage : kExitRetrievalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRetrievalFailure;
    }
    return kExitUsage;
}

} // namespace swarm_ec::cli
