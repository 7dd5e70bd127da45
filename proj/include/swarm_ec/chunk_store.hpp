#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "swarm_ec/chunk.hpp"

namespace swarm_ec {

struct GetResult {
    std::optional<Bytes> data; // serialized chunk or SOC, absent on failure
    double latency_ms = 0.0;
};

// Anything chunks can be fetched from. get() must be safe to call
// concurrently; put() stores serialized bytes under the given address.
class ChunkSource {
public:
    virtual ~ChunkSource() = default;

    virtual GetResult get(const Address& address) = 0;
    virtual void put(const Address& address, Bytes serialized) = 0;
    [[nodiscard]] virtual bool contains(const Address& address) const = 0;
};

Address put_chunk(ChunkSource& store, const Chunk& chunk);
Address put_soc(ChunkSource& store, const SocChunk& soc);

class MemoryStore final : public ChunkSource {
public:
    GetResult get(const Address& address) override;
    void put(const Address& address, Bytes serialized) override;
    [[nodiscard]] bool contains(const Address& address) const override;

    bool erase(const Address& address);
    [[nodiscard]] std::size_t size() const;

private:
    mutable std::shared_mutex mu_;
    std::map<Address, Bytes> chunks_;
};

// One file per chunk: {root}/chunks/{hex-address}.
class DiskStore final : public ChunkSource {
public:
    explicit DiskStore(std::filesystem::path root);

    GetResult get(const Address& address) override;
    void put(const Address& address, Bytes serialized) override;
    [[nodiscard]] bool contains(const Address& address) const override;

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] std::filesystem::path chunk_path(const Address& address) const;
    [[nodiscard]] std::filesystem::path manifest_dir() const { return root_ / "manifests"; }

private:
    std::filesystem::path root_;
};

} // namespace swarm_ec
