#pragma once

// Prefetching strategies for one PAC batch, and singleton (root) retrieval
// through dispersed replicas.
//
// Latency is simulated: each get reports how long it took, and the wall
// latency of a batch is derived from the strategy's request schedule
// (NONE sequential, the others concurrent).

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "swarm_ec/chunk_store.hpp"
#include "swarm_ec/error.hpp"
#include "swarm_ec/parity_planner.hpp"

namespace swarm_ec {

enum class StrategyKind { none, data, prox, race };

std::string_view to_string(StrategyKind kind) noexcept;
std::optional<StrategyKind> parse_strategy(std::string_view text);

struct RetrievalStrategy {
    StrategyKind kind = StrategyKind::race;
    std::optional<Address> node_overlay; // required by PROX
    int max_inflight = 32;               // concurrent get calls issued to the source
    bool try_original_first = true;      // singleton: original address before replicas

    [[nodiscard]] bool recovers() const noexcept
    {
        return kind == StrategyKind::prox || kind == StrategyKind::race;
    }
};

struct BatchOutcome {
    bool recovered = false;
    int requests_issued = 0;
    int chunks_used = 0;
    double wall_latency_ms = 0.0;
    std::uint64_t bytes_fetched = 0;

    // Adds counts; latency is combined by the caller.
    void add_counts(const BatchOutcome& other) noexcept;
};

class RetrievalError : public Error {
public:
    RetrievalError(ErrorCode code, const std::string& what, BatchOutcome outcome)
        : Error(code, what)
        , outcome_(outcome)
    {
    }

    [[nodiscard]] const BatchOutcome& outcome() const noexcept { return outcome_; }

private:
    BatchOutcome outcome_;
};

struct BatchResult {
    std::vector<Bytes> data; // serialized data chunks, address-verified
    BatchOutcome outcome;
};

// refs = data references followed by parity references of one PAC.
BatchResult retrieve_batch(std::span<const Reference> refs, int data_count, const ParityPlan& plan,
    const RetrievalStrategy& strategy, ChunkSource& source);

struct SingletonResult {
    Bytes data; // serialized chunk at root.address
    BatchOutcome outcome;
    std::optional<Address> via_replica;
};

// Tries the original address and the dispersed replicas of the level.
SingletonResult retrieve_singleton(const Reference& root, Level level, const RetrievalStrategy& strategy,
    ChunkSource& source, bool use_replicas = true);

// Gets issued concurrently up to max_inflight; results are slotted by index.
std::vector<GetResult> fetch_many(ChunkSource& source, std::span<const Address> addresses, int max_inflight);

} // namespace swarm_ec
