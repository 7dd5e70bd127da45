#pragma once

// Byte layout of packed address chunks (PACs): data references first, then
// parity references. Encrypted data references are 64 bytes, parity
// references always 32.

#include <cstddef>
#include <cstdint>

#include "swarm_ec/chunk.hpp"
#include "swarm_ec/parity_planner.hpp"

namespace swarm_ec {

struct BatchLayout {
    int data_refs = 0;
    int parity_refs = 0;
    std::size_t parity_offset = 0; // byte offset of the first parity reference
    std::size_t bytes = 0;         // total payload size

    [[nodiscard]] int n_refs() const noexcept { return data_refs + parity_refs; }
};

// Throws for i outside 2..plan.m: a lone reference is never wrapped.
BatchLayout batch_layout(int data_refs, const ParityPlan& plan);

// Inverse of batch_layout(...).bytes; throws ErrorCode::malformed if no
// batch size produces `payload_bytes`.
int data_refs_for_payload(std::size_t payload_bytes, const ParityPlan& plan);

// Data reference count of a PAC from its span alone. Every child except the
// last one covers a full subtree of the level below.
int data_refs_for_span(std::uint64_t span, const ParityPlan& plan);

// True serialized length of a zero-padded shard, derived from its span.
std::size_t serialized_length_from_span(ByteView padded_shard, const ParityPlan& plan);

} // namespace swarm_ec
