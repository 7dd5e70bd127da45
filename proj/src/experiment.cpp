#include "swarm_ec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swarm_ec/hashtree.hpp"
#include "swarm_ec/replica_miner.hpp"

namespace swarm_ec {

std::string ExperimentReport::csv_header()
{
    return "strategy,level,eps,trials,successes,mean_latency_ms,p95_latency_ms,requests,bytes";
}

std::string ExperimentReport::csv_row() const
{
    std::ostringstream out;
    out << to_string(strategy) << ',' << security_level(level).name << ',' << eps << ',' << trials << ','
        << successes << ',' << mean_latency_ms << ',' << p95_latency_ms << ',' << requests << ',' << bytes;
    return out.str();
}

Bytes experiment_content(std::uint64_t size, std::uint64_t seed)
{
    Bytes out(size);
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < out.size(); i += 8) {
        std::uint64_t word = splitmix64(state++);
        for (std::size_t b = 0; b < 8 && i + b < out.size(); ++b)
            out[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
    }
    return out;
}

ExperimentReport run_experiment(const ExperimentSpec& spec)
{
    const Bytes content = experiment_content(spec.file_size, spec.content_seed);
    EncodeResult encoded = encode_stream(content, spec.level, spec.encrypted, spec.content_seed);
    auto backing = std::make_shared<MemoryStore>();
    store_all(encoded, *backing);
    if (spec.replicate_root && replica_count(spec.level) > 0) {
        ReplicaSet set = mine_replicas(*encoded.root_chunk, replica_depth(spec.level));
        for (const auto& soc : set.rho)
            if (soc)
                put_soc(*backing, *soc);
    }

    ExperimentReport report;
    report.strategy = spec.strategy.kind;
    report.level = spec.level;
    report.eps = spec.sim.eps;
    report.trials = spec.trials;

    std::vector<double> latencies;
    double requests = 0.0;
    double bytes = 0.0;
    for (int t = 0; t < spec.trials; ++t) {
        SimConfig cfg = spec.sim;
        cfg.seed = splitmix64(spec.sim.seed + static_cast<std::uint64_t>(t));
        SimStore store(cfg, backing);
        DecodeOptions options{spec.strategy, spec.replicate_root};
        if (options.strategy.kind == StrategyKind::prox && !options.strategy.node_overlay) {
            Address node;
            for (std::size_t w = 0; w < kHashSize; w += 8) {
                std::uint64_t word = splitmix64(cfg.seed ^ (0x6e6f6465 + w));
                for (int b = 0; b < 8; ++b)
                    node.bytes[w + b] = static_cast<std::uint8_t>(word >> (8 * b));
            }
            options.strategy.node_overlay = node;
        }
        try {
            DecodeResult decoded = decode_stream(encoded.manifest.root, spec.level, store, options);
            requests += decoded.outcome.requests_issued;
            bytes += static_cast<double>(decoded.outcome.bytes_fetched);
            if (decoded.data == content) {
                ++report.successes;
                latencies.push_back(decoded.outcome.wall_latency_ms);
            } else {
                ++report.mismatches;
            }
        } catch (const RetrievalError& e) {
            requests += e.outcome().requests_issued;
            bytes += static_cast<double>(e.outcome().bytes_fetched);
        } catch (const Error&) {
        }
    }

    if (spec.trials > 0) {
        report.requests = requests / spec.trials;
        report.bytes = bytes / spec.trials;
    }
    if (!latencies.empty()) {
        double sum = 0.0;
        for (double l : latencies)
            sum += l;
        report.mean_latency_ms = sum / static_cast<double>(latencies.size());
        std::sort(latencies.begin(), latencies.end());
        auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(latencies.size())));
        report.p95_latency_ms = latencies[std::max<std::size_t>(rank, 1) - 1];
    }
    return report;
}

} // namespace swarm_ec
