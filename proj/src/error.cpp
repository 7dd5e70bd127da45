#include "swarm_ec/error.hpp"

namespace swarm_ec {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::shard_length_mismatch: return "shard length mismatch";
    case ErrorCode::too_many_shards: return "too many shards";
    case ErrorCode::unrecoverable_batch: return "unrecoverable batch";
    case ErrorCode::not_found: return "not found";
    case ErrorCode::address_mismatch: return "address mismatch";
    case ErrorCode::key_source_exhausted: return "key source exhausted";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::malformed: return "malformed";
    }
    return "unknown";
}

} // namespace swarm_ec
