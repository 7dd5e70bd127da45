#include "swarm_ec/replica_miner.hpp"

#include <algorithm>
#include <string>

#include "swarm_ec/error.hpp"

namespace swarm_ec {
namespace {

void check_depth(int depth)
{
    if (depth < 0 || depth > kMaxReplicaDepth)
        throw Error(ErrorCode::invalid_argument, "replica depth must be in 0..4, got " + std::to_string(depth));
}

} // namespace

std::vector<ReplicaSlot> ReplicaSet::slots() const
{
    std::vector<ReplicaSlot> out;
    for (std::size_t j = 0; j < rho.size(); ++j)
        if (rho[j])
            out.push_back({*nonces[j], rho[j]->address()});
    return out;
}

SocId replica_id(const Address& chunk_address, std::uint8_t nonce)
{
    SocId id = chunk_address.bytes;
    id[kHashSize - 1] = nonce;
    return id;
}

ReplicaSet mine_replicas(const Chunk& chunk, int depth)
{
    check_depth(depth);
    const Address addr = content_address(chunk);
    const std::size_t bins = std::size_t{1} << depth;
    ReplicaSet set{depth, std::vector<std::optional<SocChunk>>(bins), 0, std::vector<std::optional<std::uint8_t>>(bins)};
    for (int i = 0; i < kNonceCount && set.found < static_cast<int>(bins); ++i) {
        auto nonce = static_cast<std::uint8_t>(i);
        SocChunk soc{replica_id(addr, nonce), kReplicaOwner, chunk};
        std::uint32_t j = soc.address().prefix(depth);
        if (set.rho[j])
            continue;
        set.rho[j] = std::move(soc);
        set.nonces[j] = nonce;
        ++set.found;
    }
    return set;
}

std::array<Address, kNonceCount> replica_addresses(const Address& chunk_address)
{
    std::array<Address, kNonceCount> out;
    for (int i = 0; i < kNonceCount; ++i)
        out[i] = soc_address(replica_id(chunk_address, static_cast<std::uint8_t>(i)), kReplicaOwner);
    return out;
}

std::vector<ReplicaSlot> replica_slots(const Address& chunk_address, int depth)
{
    check_depth(depth);
    const auto candidates = replica_addresses(chunk_address);
    std::vector<std::optional<ReplicaSlot>> bins(std::size_t{1} << depth);
    for (int i = 0; i < kNonceCount; ++i) {
        auto& bin = bins[candidates[i].prefix(depth)];
        if (!bin)
            bin = ReplicaSlot{static_cast<std::uint8_t>(i), candidates[i]};
    }
    std::vector<ReplicaSlot> out;
    for (const auto& bin : bins)
        if (bin)
            out.push_back(*bin);
    return out;
}

std::vector<ReplicaSlot> replica_probe_order(const Address& node, std::vector<ReplicaSlot> slots)
{
    std::stable_sort(slots.begin(), slots.end(), [&node](const ReplicaSlot& a, const ReplicaSlot& b) {
        int pa = proximity_order(node, a.address);
        int pb = proximity_order(node, b.address);
        if (pa != pb)
            return pa > pb;
        return a.nonce < b.nonce;
    });
    return slots;
}

Address select_replica(const Address& node, const ReplicaSet& set)
{
    auto ordered = replica_probe_order(node, set.slots());
    if (ordered.empty())
        throw Error(ErrorCode::not_found, "replica set is empty");
    return ordered.front().address;
}

bool validate_soc_replica(const SocChunk& soc)
{
    if (soc.owner != kReplicaOwner)
        return false;
    const Address addr = content_address(soc.wrapped);
    return std::equal(soc.id.begin(), soc.id.end() - 1, addr.bytes.begin());
}

} // namespace swarm_ec
