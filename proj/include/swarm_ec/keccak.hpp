#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace swarm_ec {

using Digest = std::array<std::uint8_t, 32>;

// Incremental Keccak-256 (original Keccak padding 0x01, as used by Ethereum,
// not the FIPS-202 SHA3-256 variant).
class Keccak256 {
public:
    Keccak256() = default;

    Keccak256& update(std::span<const std::uint8_t> bytes);
    Digest finalize();

private:
    static constexpr std::size_t kRate = 136;

    std::array<std::uint64_t, 25> state_{};
    std::array<std::uint8_t, kRate> buffer_{};
    std::size_t buffered_ = 0;
};

Digest keccak256(std::span<const std::uint8_t> bytes);

} // namespace swarm_ec
