#include "swarm_ec/retrieval.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <queue>
#include <string>
#include <thread>

#include "swarm_ec/pac_layout.hpp"
#include "swarm_ec/replica_miner.hpp"
#include "swarm_ec/rs_codec.hpp"

namespace swarm_ec {
namespace {

struct Fetched {
    std::optional<Bytes> data;
    double latency = 0.0;
};

// Issues gets for `indices` and drops responses that do not hash to their address.
void fetch_verified(ChunkSource& source, std::span<const Reference> refs, const std::vector<int>& indices,
    int max_inflight, std::vector<Fetched>& out)
{
    std::vector<Address> addresses;
    addresses.reserve(indices.size());
    for (int idx : indices)
        addresses.push_back(refs[idx].address);
    auto results = fetch_many(source, addresses, max_inflight);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        Fetched& f = out[indices[r]];
        f.latency = results[r].latency_ms;
        if (results[r].data && content_address_of_serialized(*results[r].data) == addresses[r])
            f.data = std::move(results[r].data);
    }
}

struct Arrival {
    double time;
    int order; // tie-break: issue rank
    int index;

    bool operator>(const Arrival& o) const { return time != o.time ? time > o.time : order > o.order; }
};

} // namespace

std::string_view to_string(StrategyKind kind) noexcept
{
    switch (kind) {
    case StrategyKind::none: return "none";
    case StrategyKind::data: return "data";
    case StrategyKind::prox: return "prox";
    case StrategyKind::race: return "race";
    }
    return "?";
}

std::optional<StrategyKind> parse_strategy(std::string_view text)
{
    std::string lower;
    for (char c : text)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (auto kind : {StrategyKind::none, StrategyKind::data, StrategyKind::prox, StrategyKind::race})
        if (lower == to_string(kind))
            return kind;
    return std::nullopt;
}

void BatchOutcome::add_counts(const BatchOutcome& other) noexcept
{
    recovered = recovered || other.recovered;
    requests_issued += other.requests_issued;
    chunks_used += other.chunks_used;
    bytes_fetched += other.bytes_fetched;
}

std::vector<GetResult> fetch_many(ChunkSource& source, std::span<const Address> addresses, int max_inflight)
{
    std::vector<GetResult> results(addresses.size());
    const std::size_t workers = std::min<std::size_t>(std::max(max_inflight, 1), addresses.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < addresses.size(); ++i)
            results[i] = source.get(addresses[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < addresses.size(); i = next++)
                    results[i] = source.get(addresses[i]);
            });
    }
    return results;
}

BatchResult retrieve_batch(std::span<const Reference> refs, int data_count, const ParityPlan& plan,
    const RetrievalStrategy& strategy, ChunkSource& source)
{
    const int n = static_cast<int>(refs.size());
    const int i = data_count;
    const int k = n - i;
    if (i < 1 || i > n)
        throw Error(ErrorCode::invalid_argument, "data count outside 1..refs");

    std::vector<Fetched> fetched(n);
    BatchOutcome outcome;
    BatchResult result;

    auto fail = [&](ErrorCode code, const std::string& what) -> RetrievalError {
        return RetrievalError(code, what, outcome);
    };

    if (strategy.kind == StrategyKind::none || strategy.kind == StrategyKind::data) {
        std::vector<int> data_idx(i);
        std::iota(data_idx.begin(), data_idx.end(), 0);
        if (strategy.kind == StrategyKind::none) {
            // strictly one request at a time; stops at the first miss
            for (int idx : data_idx) {
                fetch_verified(source, refs, {idx}, 1, fetched);
                ++outcome.requests_issued;
                outcome.wall_latency_ms += fetched[idx].latency;
                if (!fetched[idx].data)
                    throw fail(ErrorCode::not_found, "data chunk " + refs[idx].address.hex() + " unavailable");
                outcome.bytes_fetched += fetched[idx].data->size();
            }
        } else {
            fetch_verified(source, refs, data_idx, strategy.max_inflight, fetched);
            outcome.requests_issued = i;
            for (int idx : data_idx) {
                outcome.wall_latency_ms = std::max(outcome.wall_latency_ms, fetched[idx].latency);
                if (fetched[idx].data)
                    outcome.bytes_fetched += fetched[idx].data->size();
            }
            for (int idx : data_idx)
                if (!fetched[idx].data)
                    throw fail(ErrorCode::not_found, "data chunk " + refs[idx].address.hex() + " unavailable");
        }
        outcome.chunks_used = i;
        for (int idx : data_idx)
            result.data.push_back(std::move(*fetched[idx].data));
        result.outcome = outcome;
        return result;
    }

    // Issue order: PROX ranks every reference by proximity to the node,
    // RACE requests all of them at once.
    std::vector<int> rank(n);
    std::iota(rank.begin(), rank.end(), 0);
    int issued = 0;
    if (strategy.kind == StrategyKind::prox) {
        if (!strategy.node_overlay)
            throw Error(ErrorCode::invalid_argument, "PROX strategy needs a node overlay address");
        const Address& node = *strategy.node_overlay;
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
            return proximity_order(node, refs[a].address) > proximity_order(node, refs[b].address);
        });
        // Each miss is replaced by the next-ranked reference, so the issued
        // set is the shortest rank prefix holding i successes.
        int successes = 0;
        while (successes < i && issued < n) {
            int wave = std::min(i - successes, n - issued);
            std::vector<int> idx(rank.begin() + issued, rank.begin() + issued + wave);
            fetch_verified(source, refs, idx, strategy.max_inflight, fetched);
            for (int x : idx)
                successes += fetched[x].data ? 1 : 0;
            issued += wave;
        }
    } else {
        fetch_verified(source, refs, rank, strategy.max_inflight, fetched);
        issued = n;
    }
    outcome.requests_issued = issued;
    for (int r = 0; r < issued; ++r)
        if (fetched[rank[r]].data)
            outcome.bytes_fetched += fetched[rank[r]].data->size();

    // Replay the schedule in simulated time and keep the first i arrivals.
    std::priority_queue<Arrival, std::vector<Arrival>, std::greater<>> pending;
    int next_rank = 0;
    const int initial = strategy.kind == StrategyKind::race ? issued : std::min(i, issued);
    for (; next_rank < initial; ++next_rank)
        pending.push({fetched[rank[next_rank]].latency, next_rank, rank[next_rank]});
    std::vector<int> used;
    while (!pending.empty() && static_cast<int>(used.size()) < i) {
        Arrival a = pending.top();
        pending.pop();
        if (fetched[a.index].data) {
            used.push_back(a.index);
            outcome.wall_latency_ms = a.time;
        } else if (strategy.kind == StrategyKind::prox && next_rank < issued) {
            pending.push({a.time + fetched[rank[next_rank]].latency, next_rank, rank[next_rank]});
            ++next_rank;
        } else {
            outcome.wall_latency_ms = std::max(outcome.wall_latency_ms, a.time);
        }
    }
    outcome.chunks_used = static_cast<int>(used.size());
    if (static_cast<int>(used.size()) < i)
        throw fail(ErrorCode::unrecoverable_batch,
            std::to_string(used.size()) + " of " + std::to_string(n) + " chunks available, need " + std::to_string(i));

    rs::ShardSlots slots(n);
    bool data_missing = false;
    std::size_t shard_len = 0;
    for (int idx : used) {
        if (idx >= i)
            shard_len = std::max(shard_len, fetched[idx].data->size());
    }
    for (int idx : used)
        slots[idx] = std::move(fetched[idx].data);
    for (int d = 0; d < i; ++d)
        data_missing = data_missing || !slots[d];

    if (data_missing) {
        // Data shards were zero-padded to the batch maximum, which is the parity length.
        std::vector<std::size_t> original_len(i, 0);
        for (int d = 0; d < i; ++d) {
            if (!slots[d])
                continue;
            if (slots[d]->size() > shard_len)
                throw fail(ErrorCode::address_mismatch, "data chunk longer than its batch parities");
            original_len[d] = slots[d]->size();
            slots[d]->resize(shard_len, 0);
        }
        rs::codec_for(i, k).reconstruct_data(slots);
        for (int d = 0; d < i; ++d) {
            Bytes& shard = *slots[d];
            if (original_len[d] > 0) {
                shard.resize(original_len[d]);
                continue;
            }
            std::size_t len = 0;
            try {
                len = serialized_length_from_span(shard, plan);
            } catch (const Error& e) {
                throw fail(ErrorCode::address_mismatch, std::string("recovered chunk unreadable: ") + e.what());
            }
            shard.resize(len);
            if (content_address_of_serialized(shard) != refs[d].address)
                throw fail(ErrorCode::address_mismatch, "recovered chunk does not hash to " + refs[d].address.hex());
        }
        outcome.recovered = true;
    }
    for (int d = 0; d < i; ++d)
        result.data.push_back(std::move(*slots[d]));
    result.outcome = outcome;
    return result;
}

SingletonResult retrieve_singleton(const Reference& root, Level level, const RetrievalStrategy& strategy,
    ChunkSource& source, bool use_replicas)
{
    std::vector<ReplicaSlot> replicas;
    const int depth = replica_depth(level);
    if (use_replicas && replica_count(level) > 0) {
        replicas = replica_slots(root.address, depth);
        if (strategy.node_overlay)
            replicas = replica_probe_order(*strategy.node_overlay, std::move(replicas));
        else
            std::sort(replicas.begin(), replicas.end(),
                [](const ReplicaSlot& a, const ReplicaSlot& b) { return a.nonce < b.nonce; });
    }

    struct Candidate {
        Address address;
        bool replica;
    };
    std::vector<Candidate> order;
    if (strategy.try_original_first)
        order.push_back({root.address, false});
    for (const auto& r : replicas)
        order.push_back({r.address, true});
    if (!strategy.try_original_first)
        order.push_back({root.address, false});

    auto unwrap = [&](const Candidate& c, const std::optional<Bytes>& data) -> std::optional<Bytes> {
        if (!data)
            return std::nullopt;
        if (!c.replica) {
            if (content_address_of_serialized(*data) != root.address)
                return std::nullopt;
            return data;
        }
        try {
            SocChunk soc = SocChunk::deserialize(*data);
            if (soc.address() != c.address || !validate_soc_replica(soc) || content_address(soc.wrapped) != root.address)
                return std::nullopt;
            return soc.wrapped.serialize();
        } catch (const Error&) {
            return std::nullopt;
        }
    };

    SingletonResult result;
    if (strategy.kind == StrategyKind::race && order.size() > 1) {
        // every candidate at once; the earliest valid answer wins
        std::vector<Address> addresses;
        for (const auto& c : order)
            addresses.push_back(c.address);
        auto got = fetch_many(source, addresses, strategy.max_inflight);
        result.outcome.requests_issued = static_cast<int>(order.size());
        std::optional<std::size_t> best;
        double slowest = 0.0;
        std::vector<std::optional<Bytes>> payloads(order.size());
        for (std::size_t c = 0; c < order.size(); ++c) {
            slowest = std::max(slowest, got[c].latency_ms);
            if (got[c].data)
                result.outcome.bytes_fetched += got[c].data->size();
            payloads[c] = unwrap(order[c], got[c].data);
            if (payloads[c] && (!best || got[c].latency_ms < got[*best].latency_ms))
                best = c;
        }
        if (!best) {
            result.outcome.wall_latency_ms = slowest;
            throw RetrievalError(ErrorCode::not_found, "root chunk and all replicas unavailable", result.outcome);
        }
        result.outcome.wall_latency_ms = got[*best].latency_ms;
        result.outcome.chunks_used = 1;
        result.data = std::move(*payloads[*best]);
        if (order[*best].replica)
            result.via_replica = order[*best].address;
        return result;
    }

    for (const auto& c : order) {
        GetResult got = source.get(c.address);
        ++result.outcome.requests_issued;
        result.outcome.wall_latency_ms += got.latency_ms;
        if (got.data)
            result.outcome.bytes_fetched += got.data->size();
        if (auto payload = unwrap(c, got.data)) {
            result.outcome.chunks_used = 1;
            result.data = std::move(*payload);
            if (c.replica)
                result.via_replica = c.address;
            return result;
        }
    }
    throw RetrievalError(ErrorCode::not_found, "root chunk and all replicas unavailable", result.outcome);
}

} // namespace swarm_ec
