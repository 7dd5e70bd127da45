#pragma once

// Systematic Reed-Solomon erasure code over GF(2^8).
//
// Format note (frozen: parity bytes determine parity chunk addresses):
//   field      GF(2^8), primitive polynomial x^8+x^4+x^3+x^2+1 (0x11d), generator 2
//   generator  Vandermonde matrix V[r][c] = r^c (r = 0..n-1, 0^0 = 1), multiplied
//              on the right by the inverse of its top m x m block so that the
//              first m rows form the identity
// Equivalently, parity j is the evaluation at x = m + j of the unique polynomial
// of degree < m that takes the value of data shard r at x = r.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "swarm_ec/chunk.hpp"

namespace swarm_ec::rs {

inline constexpr int kMaxShards = 128;

namespace gf {
std::uint8_t add(std::uint8_t a, std::uint8_t b) noexcept;
std::uint8_t mul(std::uint8_t a, std::uint8_t b) noexcept;
std::uint8_t div(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);
std::uint8_t pow(std::uint8_t a, unsigned n) noexcept;
} // namespace gf

using ShardSlots = std::vector<std::optional<Bytes>>;

class ReedSolomon {
public:
    ReedSolomon(int data_shards, int parity_shards);

    [[nodiscard]] int data_shards() const noexcept { return data_; }
    [[nodiscard]] int parity_shards() const noexcept { return parity_; }
    [[nodiscard]] int total_shards() const noexcept { return data_ + parity_; }

    // Row r of the n x m generator matrix.
    [[nodiscard]] std::span<const std::uint8_t> generator_row(int r) const;

    [[nodiscard]] std::vector<Bytes> encode(std::span<const Bytes> data) const;

    // Fills every empty slot. Requires at least m present shards of equal length.
    void reconstruct(ShardSlots& shards) const;

    // Only the data slots [0, m) are guaranteed filled afterwards.
    void reconstruct_data(ShardSlots& shards) const;

private:
    void reconstruct_impl(ShardSlots& shards, bool data_only) const;

    int data_;
    int parity_;
    std::vector<std::uint8_t> matrix_; // n x m, row-major
};

// Shared, lazily built codec for an (m, k) pair.
const ReedSolomon& codec_for(int data_shards, int parity_shards);

std::vector<Bytes> encode(std::span<const Bytes> data, int parity_shards);
void reconstruct(ShardSlots& shards, int data_shards, int parity_shards);

} // namespace swarm_ec::rs
