#pragma once

// Dispersed replicas of a singleton chunk.
//
// Replica SOC ids are the chunk address with its last byte replaced by a
// nonce 0..255; the SOC address is Keccak256(id || owner). Mining keeps the
// first nonce that lands in each of the 2^d top-bit bins, so a downloader who
// knows only the chunk address and d can recompute the exact replica set.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "swarm_ec/chunk.hpp"

namespace swarm_ec {

inline constexpr int kMaxReplicaDepth = 4;
inline constexpr int kNonceCount = 256;

struct ReplicaSlot {
    std::uint8_t nonce = 0;
    Address address;
};

struct ReplicaSet {
    int depth = 0;
    std::vector<std::optional<SocChunk>> rho; // 2^depth bins
    int found = 0;
    std::vector<std::optional<std::uint8_t>> nonces; // per bin

    [[nodiscard]] bool complete() const noexcept { return found == static_cast<int>(rho.size()); }
    [[nodiscard]] std::vector<ReplicaSlot> slots() const;
};

SocId replica_id(const Address& chunk_address, std::uint8_t nonce);

ReplicaSet mine_replicas(const Chunk& chunk, int depth);

// All 256 candidate SOC addresses in nonce order.
std::array<Address, kNonceCount> replica_addresses(const Address& chunk_address);

// Downloader-side recomputation of the mined bins, in bin order.
std::vector<ReplicaSlot> replica_slots(const Address& chunk_address, int depth);

// Replicas ordered by descending proximity to `node`, ties by ascending nonce.
std::vector<ReplicaSlot> replica_probe_order(const Address& node, std::vector<ReplicaSlot> slots);

// The replica closest to `node`; throws when the set is empty.
Address select_replica(const Address& node, const ReplicaSet& set);

bool validate_soc_replica(const SocChunk& soc);

} // namespace swarm_ec
