#pragma once

#include <stdexcept>
#include <string>

namespace swarm_ec {

enum class ErrorCode {
    invalid_argument,
    shard_length_mismatch,
    too_many_shards,
    unrecoverable_batch,
    not_found,
    address_mismatch,
    key_source_exhausted,
    infeasible,
    malformed,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace swarm_ec
