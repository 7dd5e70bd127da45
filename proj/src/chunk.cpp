#include "swarm_ec/chunk.hpp"

#include <algorithm>
#include <bit>

#include "swarm_ec/error.hpp"

namespace swarm_ec {

std::string to_hex(ByteView bytes)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex)
{
    if (hex.starts_with("0x") || hex.starts_with("0X"))
        hex.remove_prefix(2);
    if (hex.size() % 2 != 0)
        throw Error(ErrorCode::malformed, "odd-length hex string");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error(ErrorCode::malformed, std::string("bad hex digit '") + c + "'");
    };
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return out;
}

Address Address::from_hex(std::string_view hex)
{
    Bytes raw = swarm_ec::from_hex(hex);
    if (raw.size() != kHashSize)
        throw Error(ErrorCode::malformed, "address must be 32 bytes");
    Address a;
    std::copy(raw.begin(), raw.end(), a.bytes.begin());
    return a;
}

std::uint32_t Address::prefix(int depth) const
{
    std::uint32_t j = 0;
    for (int b = 0; b < depth; ++b)
        j = (j << 1) | static_cast<std::uint32_t>(bit(b));
    return j;
}

Bytes Reference::serialize() const
{
    Bytes out;
    append_to(out);
    return out;
}

void Reference::append_to(Bytes& out) const
{
    out.insert(out.end(), address.bytes.begin(), address.bytes.end());
    if (key)
        out.insert(out.end(), key->begin(), key->end());
}

Reference Reference::parse(ByteView bytes)
{
    if (bytes.size() != kHashSize && bytes.size() != 2 * kHashSize)
        throw Error(ErrorCode::malformed, "reference must be 32 or 64 bytes");
    Reference r;
    std::copy_n(bytes.begin(), kHashSize, r.address.bytes.begin());
    if (bytes.size() == 2 * kHashSize) {
        EncryptionKey k;
        std::copy_n(bytes.begin() + kHashSize, kHashSize, k.begin());
        r.key = k;
    }
    return r;
}

Reference Reference::from_hex(std::string_view hex)
{
    return parse(swarm_ec::from_hex(hex));
}

Chunk::Chunk(std::uint64_t span, Bytes payload)
    : span_(span)
    , payload_(std::move(payload))
{
    if (payload_.size() > kChunkSize)
        throw Error(ErrorCode::invalid_argument,
            "chunk payload of " + std::to_string(payload_.size()) + " bytes exceeds 4096");
}

Chunk Chunk::leaf(ByteView data)
{
    return Chunk(data.size(), Bytes(data.begin(), data.end()));
}

std::uint64_t read_span(ByteView serialized)
{
    if (serialized.size() < kSpanSize)
        throw Error(ErrorCode::malformed, "serialized chunk shorter than its span");
    std::uint64_t span = 0;
    for (int i = 7; i >= 0; --i)
        span = (span << 8) | serialized[i];
    return span;
}

Chunk Chunk::deserialize(ByteView bytes)
{
    std::uint64_t span = read_span(bytes);
    if (bytes.size() > kMaxSerializedChunk)
        throw Error(ErrorCode::malformed, "serialized chunk longer than 4104 bytes");
    return Chunk(span, Bytes(bytes.begin() + kSpanSize, bytes.end()));
}

Bytes Chunk::serialize() const
{
    Bytes out(kSpanSize + payload_.size());
    for (std::size_t i = 0; i < kSpanSize; ++i)
        out[i] = static_cast<std::uint8_t>(span_ >> (8 * i));
    std::copy(payload_.begin(), payload_.end(), out.begin() + kSpanSize);
    return out;
}

Address content_address_of_serialized(ByteView serialized)
{
    return Address::from_digest(keccak256(serialized));
}

Address content_address(const Chunk& chunk)
{
    std::array<std::uint8_t, kSpanSize> span{};
    for (std::size_t i = 0; i < kSpanSize; ++i)
        span[i] = static_cast<std::uint8_t>(chunk.span() >> (8 * i));
    return Address::from_digest(Keccak256{}.update(span).update(chunk.payload()).finalize());
}

int proximity_order(const Address& a, const Address& b) noexcept
{
    for (std::size_t i = 0; i < kHashSize; ++i) {
        std::uint8_t diff = a.bytes[i] ^ b.bytes[i];
        if (diff != 0)
            return static_cast<int>(i * 8) + std::countl_zero(diff);
    }
    return 256;
}

Chunk encrypt_chunk(const Chunk& chunk, const EncryptionKey& key)
{
    Bytes out = chunk.payload();
    std::array<std::uint8_t, kHashSize + 4> block_input{};
    std::copy(key.begin(), key.end(), block_input.begin());
    for (std::size_t offset = 0, j = 0; offset < out.size(); offset += kHashSize, ++j) {
        for (int b = 0; b < 4; ++b)
            block_input[kHashSize + b] = static_cast<std::uint8_t>(j >> (8 * b));
        Digest stream = keccak256(block_input);
        std::size_t n = std::min(kHashSize, out.size() - offset);
        for (std::size_t i = 0; i < n; ++i)
            out[offset + i] ^= stream[i];
    }
    return Chunk(chunk.span(), std::move(out));
}

Address soc_address(const SocId& id, const OwnerAddress& owner)
{
    return Address::from_digest(Keccak256{}.update(id).update(owner).finalize());
}

Bytes SocChunk::serialize() const
{
    Bytes out(id.begin(), id.end());
    out.insert(out.end(), owner.begin(), owner.end());
    Bytes inner = wrapped.serialize();
    out.insert(out.end(), inner.begin(), inner.end());
    return out;
}

SocChunk SocChunk::deserialize(ByteView bytes)
{
    if (bytes.size() < kHashSize + kOwnerSize + kSpanSize)
        throw Error(ErrorCode::malformed, "serialized SOC too short");
    SocChunk soc;
    std::copy_n(bytes.begin(), kHashSize, soc.id.begin());
    std::copy_n(bytes.begin() + kHashSize, kOwnerSize, soc.owner.begin());
    soc.wrapped = Chunk::deserialize(bytes.subspan(kHashSize + kOwnerSize));
    return soc;
}

} // namespace swarm_ec
