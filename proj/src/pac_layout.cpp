#include "swarm_ec/pac_layout.hpp"

#include <string>

#include "swarm_ec/error.hpp"

namespace swarm_ec {

BatchLayout batch_layout(int data_refs, const ParityPlan& plan)
{
    if (data_refs < 2 || data_refs > plan.m)
        throw Error(ErrorCode::invalid_argument,
            "PAC must pack 2.." + std::to_string(plan.m) + " data references, got " + std::to_string(data_refs));
    BatchLayout layout;
    layout.data_refs = data_refs;
    layout.parity_refs = parities_for_partial_batch(data_refs, plan.level.id, plan.encrypted);
    layout.parity_offset = static_cast<std::size_t>(data_refs) * plan.data_ref_size();
    layout.bytes = layout.parity_offset + static_cast<std::size_t>(layout.parity_refs) * ParityPlan::parity_ref_size();
    if (layout.bytes > kChunkSize)
        throw Error(ErrorCode::invalid_argument, "PAC layout exceeds 4096 bytes");
    return layout;
}

int data_refs_for_payload(std::size_t payload_bytes, const ParityPlan& plan)
{
    for (int i = 2; i <= plan.m; ++i) {
        std::size_t bytes = batch_layout(i, plan).bytes;
        if (bytes == payload_bytes)
            return i;
        if (bytes > payload_bytes)
            break;
    }
    throw Error(ErrorCode::malformed, "no PAC layout has " + std::to_string(payload_bytes) + " bytes");
}

int data_refs_for_span(std::uint64_t span, const ParityPlan& plan)
{
    if (span <= kChunkSize)
        throw Error(ErrorCode::invalid_argument, "span of a leaf chunk");
    const auto m = static_cast<unsigned __int128>(plan.m);
    unsigned __int128 child_full = kChunkSize;
    while (span > child_full * m)
        child_full *= m;
    auto refs = static_cast<int>((span + child_full - 1) / child_full);
    if (refs < 2 || refs > plan.m)
        throw Error(ErrorCode::malformed, "span " + std::to_string(span) + " does not fit the plan");
    return refs;
}

std::size_t serialized_length_from_span(ByteView padded_shard, const ParityPlan& plan)
{
    const std::uint64_t span = read_span(padded_shard);
    std::size_t length = kSpanSize
        + (span <= kChunkSize ? static_cast<std::size_t>(span) : batch_layout(data_refs_for_span(span, plan), plan).bytes);
    if (length > padded_shard.size())
        throw Error(ErrorCode::malformed, "recovered shard shorter than its span implies");
    return length;
}

} // namespace swarm_ec
