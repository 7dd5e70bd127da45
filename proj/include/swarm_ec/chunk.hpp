#pragma once

// Chunks, addresses and references.
//
// Wire layouts (bit-exact, used by golden tests and the on-disk store):
//   chunk      = span (8 bytes, little-endian) || payload (0..4096 bytes)
//   reference  = address (32) [|| decryption key (32)]
//   soc        = id (32) || owner (20) || chunk
//
// A chunk's content address is Keccak256 over its serialized form.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swarm_ec/keccak.hpp"

namespace swarm_ec {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kChunkSize = 4096;
inline constexpr std::size_t kSpanSize = 8;
inline constexpr std::size_t kHashSize = 32;
inline constexpr std::size_t kOwnerSize = 20;
inline constexpr std::size_t kMaxSerializedChunk = kSpanSize + kChunkSize;

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

struct Address {
    std::array<std::uint8_t, kHashSize> bytes{};

    [[nodiscard]] std::string hex() const { return to_hex(bytes); }
    static Address from_hex(std::string_view hex);
    static Address from_digest(const Digest& d) { return Address{d}; }

    // bit `index` counted from the most significant bit of byte 0
    [[nodiscard]] bool bit(int index) const
    {
        return (bytes[index / 8] >> (7 - index % 8)) & 1u;
    }
    // top `depth` bits as a big-endian integer
    [[nodiscard]] std::uint32_t prefix(int depth) const;

    auto operator<=>(const Address&) const = default;
};

using EncryptionKey = std::array<std::uint8_t, kHashSize>;
using SocId = std::array<std::uint8_t, kHashSize>;
using OwnerAddress = std::array<std::uint8_t, kOwnerSize>;

// Shared owner of every dispersed replica: the Ethereum address of the
// publicly known private key 0x0100...00.
inline constexpr OwnerAddress kReplicaOwner = {
    0xdc, 0x5b, 0x20, 0x84, 0x7f, 0x43, 0xd6, 0x79, 0x28, 0xf4,
    0x9c, 0xd4, 0xf8, 0x5d, 0x69, 0x6b, 0x5a, 0x76, 0x17, 0xb5,
};

struct Reference {
    Address address;
    std::optional<EncryptionKey> key;

    [[nodiscard]] bool encrypted() const noexcept { return key.has_value(); }
    [[nodiscard]] std::size_t size() const noexcept { return encrypted() ? 2 * kHashSize : kHashSize; }
    [[nodiscard]] Bytes serialize() const;
    void append_to(Bytes& out) const;
    [[nodiscard]] std::string hex() const { return to_hex(serialize()); }

    // accepts exactly 32 or 64 bytes
    static Reference parse(ByteView bytes);
    static Reference from_hex(std::string_view hex);

    bool operator==(const Reference&) const = default;
};

class Chunk {
public:
    Chunk() = default;
    Chunk(std::uint64_t span, Bytes payload);

    static Chunk leaf(ByteView data);
    static Chunk deserialize(ByteView bytes);

    [[nodiscard]] std::uint64_t span() const noexcept { return span_; }
    [[nodiscard]] const Bytes& payload() const noexcept { return payload_; }
    [[nodiscard]] bool is_intermediate() const noexcept { return span_ > kChunkSize; }

    [[nodiscard]] Bytes serialize() const;
    [[nodiscard]] std::size_t serialized_size() const noexcept { return kSpanSize + payload_.size(); }

    bool operator==(const Chunk&) const = default;

private:
    std::uint64_t span_ = 0;
    Bytes payload_;
};

Address content_address(const Chunk& chunk);
Address content_address_of_serialized(ByteView serialized);

// Number of leading bits shared by a and b, 256 when equal.
int proximity_order(const Address& a, const Address& b) noexcept;

// Counter-mode XOR with keystream block j = Keccak256(key || j as u32 LE).
// The span stays in plaintext. Applying it twice with the same key is the
// identity.
Chunk encrypt_chunk(const Chunk& chunk, const EncryptionKey& key);

Address soc_address(const SocId& id, const OwnerAddress& owner);

struct SocChunk {
    SocId id{};
    OwnerAddress owner = kReplicaOwner;
    Chunk wrapped;

    [[nodiscard]] Address address() const { return soc_address(id, owner); }
    [[nodiscard]] Bytes serialize() const;
    static SocChunk deserialize(ByteView bytes);

    bool operator==(const SocChunk&) const = default;
};

std::uint64_t read_span(ByteView serialized);

} // namespace swarm_ec
