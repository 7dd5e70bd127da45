// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "swarm_ec/error.hpp"
#include "swarm_ec/experiment.hpp"
#include "swarm_ec/hashtree.hpp"
#include "swarm_ec/netstore_sim.hpp"
#include "swarm_ec/pac_layout.hpp"
#include "swarm_ec/parity_planner.hpp"
#include "swarm_ec/replica_miner.hpp"
#include "swarm_ec/retrieval.hpp"
#include "swarm_ec/rs_codec.hpp"

using namespace swarm_ec;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& check)
{
    const auto start = Clock::now();
    Verdict v{false, ""};
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    failures += v.pass ? 0 : 1;
    std::printf("%s criterion %d: %s (%s; %.2fs)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n)
{
    Bytes out(n);
    for (auto& b : out)
        b = static_cast<std::uint8_t>(rng());
    return out;
}

Verdict full_batches()
{
    const auto start = Clock::now();
    const std::pair<int, int> plain[] = {{128, 0}, {119, 9}, {107, 21}, {97, 31}, {38, 90}};
    const std::pair<int, int> enc[] = {{64, 0}, {59, 9}, {53, 21}, {48, 31}, {19, 90}};
    std::ostringstream got;
    bool ok = true;
    for (int l = 0; l < 5; ++l) {
        auto p = plan_for_level(static_cast<Level>(l), false);
        auto e = plan_for_level(static_cast<Level>(l), true);
        ok = ok && std::pair{p.m, p.k} == plain[l] && std::pair{e.m, e.k} == enc[l];
        got << "(" << p.m << "," << p.k << ")/(" << e.m << "," << e.k << ") ";
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    got << "in " << secs << "s";
    return {ok && secs < 1.0, got.str()};
}

Verdict figure_point()
{
    int k = min_parities_fixed_total(128, 0.1, 0.1);
    return {k == 17, "k=" + std::to_string(k)};
}

Verdict table_rows()
{
    struct Row {
        Level level;
        int parities, min, max;
        int emin, emax; // 0: no encrypted entry
    };
    // Printed rows sampled across the four levels.
    const Row printed[] = {
        {Level::medium, 2, 1, 1, 0, 0},
        {Level::medium, 4, 6, 14, 3, 7},
        {Level::medium, 9, 95, 119, 47, 59},
        {Level::strong, 5, 2, 3, 1, 1},
        {Level::strong, 12, 33, 39, 16, 19},
        {Level::strong, 21, 105, 107, 52, 53},
        {Level::insane, 5, 1, 1, 0, 0},
        {Level::insane, 16, 27, 29, 13, 14},
        {Level::insane, 31, 93, 97, 46, 48},
        {Level::paranoid, 19, 1, 1, 0, 0},
        {Level::paranoid, 50, 14, 14, 7, 7},
        {Level::paranoid, 90, 38, 38, 19, 19},
    };
    int matched = 0;
    std::string misses;
    for (const auto& want : printed) {
        bool found = false;
        for (const auto& row : parity_table(want.level)) {
            if (row.parities != want.parities)
                continue;
            found = row.min_chunks == want.min && row.max_chunks == want.max
                && row.encrypted_min.value_or(0) == want.emin && row.encrypted_max.value_or(0) == want.emax;
        }
        if (found)
            ++matched;
        else
            misses += " " + std::string(security_level(want.level).name) + ":" + std::to_string(want.parities);
    }
    return {matched == static_cast<int>(std::size(printed)),
        std::to_string(matched) + "/" + std::to_string(std::size(printed)) + " rows match" + misses};
}

Verdict file_probability()
{
    double p = file_success_probability(std::pow(2.0, 30), 1e-6);
    char buf[64];
    std::snprintf(buf, sizeof buf, "P_F=%.5f", p);
    return {std::abs(p - 0.998) <= 0.001, buf};
}

Verdict singletons()
{
    int r1 = singleton_parities(0.1, 1e-6);
    int r2 = singleton_parities(0.01, 1e-6);
    std::vector<int> counts;
    for (int l = 0; l < 5; ++l)
        counts.push_back(replica_count(static_cast<Level>(l)));
    std::ostringstream os;
    os << "r(0.1)=" << r1 << " r(0.01)=" << r2 << " replicas={";
    for (int c : counts)
        os << c << (c == counts.back() ? "}" : ",");
    return {r1 == 5 && r2 == 2 && counts == std::vector<int>{0, 2, 4, 8, 16}, os.str()};
}

double log_choose(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

// Returns the number of patterns checked; throws on any mismatch.
long rs_properties(int m, int k, std::mt19937_64& rng)
{
    const int n = m + k;
    const std::size_t len = 48;
    std::vector<Bytes> data;
    for (int i = 0; i < m; ++i)
        data.push_back(random_bytes(rng, len));
    auto parity = rs::encode(data, k);
    const auto& codec = rs::codec_for(m, k);
    long checked = 0;

    auto attempt = [&](const std::vector<int>& erased) {
        rs::ShardSlots slots;
        for (const auto& d : data)
            slots.emplace_back(d);
        for (const auto& p : parity)
            slots.emplace_back(p);
        for (int e : erased)
            slots[e].reset();
        codec.reconstruct(slots);
        for (int i = 0; i < m; ++i)
            if (*slots[i] != data[i])
                throw std::runtime_error("wrong data shard");
        for (int j = 0; j < k; ++j)
            if (*slots[m + j] != parity[j])
                throw std::runtime_error("wrong parity shard");
        ++checked;
    };

    for (int size = 0; size <= k; ++size) {
        if (log_choose(n, size) <= std::log(1e4)) {
            std::vector<int> idx(size);
            std::iota(idx.begin(), idx.end(), 0);
            while (true) {
                attempt(idx);
                int i = size - 1;
                while (i >= 0 && idx[i] == n - size + i)
                    --i;
                if (i < 0)
                    break;
                ++idx[i];
                for (int j = i + 1; j < size; ++j)
                    idx[j] = idx[j - 1] + 1;
            }
        } else {
            std::vector<int> all(n);
            std::iota(all.begin(), all.end(), 0);
            const int samples = 200 / std::max(1, k / 10);
            for (int s = 0; s < samples; ++s) {
                std::shuffle(all.begin(), all.end(), rng);
                attempt(std::vector<int>(all.begin(), all.begin() + size));
            }
        }
    }

    // One erasure too many must be refused.
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int s = 0; s < 20; ++s) {
        std::shuffle(all.begin(), all.end(), rng);
        rs::ShardSlots slots;
        for (const auto& d : data)
            slots.emplace_back(d);
        for (const auto& p : parity)
            slots.emplace_back(p);
        for (int e = 0; e <= k; ++e)
            slots[all[e]].reset();
        try {
            codec.reconstruct(slots);
            throw std::runtime_error("k+1 erasures reconstructed");
        } catch (const Error& e) {
            if (e.code() != ErrorCode::unrecoverable_batch)
                throw;
        }
    }
    return checked;
}

Verdict rs_suite()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(606);
    std::ostringstream os;
    for (auto [m, k] : {std::pair{2, 1}, {4, 2}, {38, 90}, {119, 9}})
        os << "(" << m << "," << k << "):" << rs_properties(m, k, rng) << " ";
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    os << "patterns";
    return {secs < 60.0, os.str()};
}

Verdict round_trips()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(707);
    const std::size_t sizes[] = {0, 1, 4095, 4096, 4097, 4096 * 119, 4096 * 119 + 1, 8u << 20};
    int ok = 0, total = 0;
    std::string misses;
    for (std::size_t size : sizes) {
        Bytes data = random_bytes(rng, size);
        for (Level level : {Level::none, Level::medium, Level::paranoid})
            for (bool encrypted : {false, true}) {
                ++total;
                auto enc = encode_stream(data, level, encrypted, size + 1);
                auto store = std::make_shared<MemoryStore>();
                store_all(enc, *store);
                SimStore sim(SimConfig{}, store);
                if (decode_stream(enc.manifest.root, level, sim).data == data)
                    ++ok;
                else
                    misses += " " + std::to_string(size) + "/" + std::string(security_level(level).name);
            }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    return {ok == total && secs < 120.0, std::to_string(ok) + "/" + std::to_string(total) + " identical" + misses};
}

Verdict dispersal()
{
    std::mt19937_64 rng(808);
    int complete = 0;
    bool distinct = true;
    for (int t = 0; t < 100; ++t) {
        Chunk root = Chunk::leaf(random_bytes(rng, 1 + rng() % kChunkSize));
        auto set = mine_replicas(root, 4);
        std::set<std::uint32_t> prefixes;
        for (const auto& soc : set.rho)
            if (soc)
                distinct = distinct && prefixes.insert(soc->address().prefix(4)).second && validate_soc_replica(*soc);
        complete += set.complete();
    }
    return {distinct && complete >= 99, std::to_string(complete) + "/100 complete sets, prefixes distinct"};
}

Verdict availability()
{
    ExperimentSpec spec;
    spec.file_size = 97 * kChunkSize;
    spec.level = Level::insane;
    spec.sim.eps = 0.1;
    spec.sim.failure_mode = FailureMode::per_chunk_permanent;
    spec.sim.seed = 2024;
    spec.trials = 10000;
    spec.strategy.max_inflight = 1;

    spec.strategy.kind = StrategyKind::race;
    auto race = run_experiment(spec);
    spec.strategy.kind = StrategyKind::none;
    auto none = run_experiment(spec);

    std::ostringstream os;
    os << "RACE " << race.trials - race.successes << " failures in " << race.trials << ", NONE success rate "
       << none.success_rate() << ", mismatches " << race.mismatches + none.mismatches;
    return {race.successes == race.trials && none.success_rate() < 0.01 && race.mismatches + none.mismatches == 0,
        os.str()};
}

Verdict race_latency()
{
    std::mt19937_64 content_rng(909);
    auto enc = encode_stream(random_bytes(content_rng, 97 * kChunkSize), Level::insane, false);
    auto store = std::make_shared<MemoryStore>();
    store_all(enc, *store);
    const ParityPlan plan = enc.manifest.plan;
    const Bytes& payload = enc.root_chunk->payload();
    std::vector<Reference> refs;
    for (std::size_t off = 0; off < payload.size(); off += kHashSize)
        refs.push_back(Reference::parse(ByteView(payload).subspan(off, kHashSize)));
    if (refs.size() != 128 || data_refs_for_payload(payload.size(), plan) != 97)
        return {false, "unexpected batch shape"};

    const int trials = 1000;
    double sum = 0.0;
    RetrievalStrategy race;
    race.kind = StrategyKind::race;
    race.max_inflight = 1;
    for (int t = 0; t < trials; ++t) {
        SimConfig cfg;
        cfg.seed = 5000 + static_cast<std::uint64_t>(t);
        cfg.latency = LatencyModel::uniform(10, 100);
        SimStore sim(cfg, store);
        sum += retrieve_batch(refs, 97, plan, race, sim).outcome.wall_latency_ms;
    }
    const double mean = sum / trials;

    // Oracle: 97th smallest of 128 independent uniform(10,100) draws.
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(10.0, 100.0);
    double oracle_sum = 0.0;
    const int oracle_trials = 100000;
    std::vector<double> draws(128);
    for (int t = 0; t < oracle_trials; ++t) {
        for (auto& d : draws)
            d = u(rng);
        std::nth_element(draws.begin(), draws.begin() + 96, draws.end());
        oracle_sum += draws[96];
    }
    const double oracle = oracle_sum / oracle_trials;
    char buf[96];
    std::snprintf(buf, sizeof buf, "mean %.3f ms vs oracle %.3f ms (%.2f%%)", mean, oracle, 100.0 * std::abs(mean - oracle) / oracle);
    return {std::abs(mean - oracle) <= 0.05 * oracle, buf};
}

} // namespace

int main()
{
    report(1, "full batch compositions", full_batches);
    report(2, "fixed-total quantile point", figure_point);
    report(3, "parity table rows", table_rows);
    report(4, "file success probability", file_probability);
    report(5, "singleton parities and replica counts", singletons);
    report(6, "erasure code properties", rs_suite);
    report(7, "encode/decode round trips", round_trips);
    report(8, "replica dispersal", dispersal);
    report(9, "availability Monte-Carlo", availability);
    report(10, "RACE latency order statistic", race_latency);
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
