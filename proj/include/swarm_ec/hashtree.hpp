#pragma once

// Erasure-coded chunk tree.
//
// The chunker cuts the input into 4 KiB leaves and packs their references
// into PACs of up to m data references each, appending RS parity chunk
// references after the data references. PACs are packed the same way one
// level up until a single root remains. A level never wraps a lone
// reference: it is promoted to the next level with open references.
//
// RS shards are serialized chunks (span || payload) zero-padded to the
// longest chunk of the batch. A parity chunk is stored as its raw shard.

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swarm_ec/chunk.hpp"
#include "swarm_ec/chunk_store.hpp"
#include "swarm_ec/parity_planner.hpp"
#include "swarm_ec/retrieval.hpp"

namespace swarm_ec {

class KeySource {
public:
    virtual ~KeySource() = default;
    // Key for the next chunk produced at `height`; nullopt when exhausted.
    virtual std::optional<EncryptionKey> next(int height) = 0;
};

// key = Keccak256(seed u64 LE || height u32 LE || index u64 LE), index counted per height
class DerivedKeySource final : public KeySource {
public:
    explicit DerivedKeySource(std::uint64_t seed)
        : seed_(seed)
    {
    }
    std::optional<EncryptionKey> next(int height) override;

private:
    std::uint64_t seed_;
    std::vector<std::uint64_t> counters_;
};

class FixedKeySource final : public KeySource {
public:
    explicit FixedKeySource(std::vector<EncryptionKey> keys)
        : keys_(std::move(keys))
    {
    }
    std::optional<EncryptionKey> next(int) override;

private:
    std::vector<EncryptionKey> keys_;
    std::size_t used_ = 0;
};

struct LevelStats {
    int height = 0;
    int data_chunks = 0;   // chunks at this height (leaves at 0)
    int parity_chunks = 0; // parities packed into PACs at this height
};

struct TreeManifest {
    Reference root;
    int level_count = 0;
    std::uint64_t total_span = 0;
    ParityPlan plan;
    std::vector<LevelStats> levels;
    std::uint64_t seed = 0;
    int replica_depth = -1; // -1: no replicas stored

    [[nodiscard]] int chunk_count() const;
    [[nodiscard]] int parity_count() const;

    [[nodiscard]] std::string to_json() const;
    static TreeManifest from_json(const std::string& text);
};

struct StoredChunk {
    Address address;
    Bytes serialized;
    int height = 0;
    bool parity = false;
};

struct EncodeResult {
    TreeManifest manifest;
    std::vector<StoredChunk> chunks;
    std::optional<Chunk> root_chunk; // as stored (encrypted when the tree is)
};

// Streaming chunker; write() any number of times, then finish().
class Chunker {
public:
    // Encrypted trees draw keys from `keys`, or from DerivedKeySource(seed) when none is given.
    Chunker(Level level, bool encrypted, std::uint64_t seed = 0, std::unique_ptr<KeySource> keys = nullptr);
    ~Chunker();
    Chunker(Chunker&&) noexcept;
    Chunker& operator=(Chunker&&) noexcept;

    void write(ByteView data);
    EncodeResult finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

EncodeResult encode_stream(ByteView data, Level level, bool encrypted, std::uint64_t seed = 0,
    std::unique_ptr<KeySource> keys = nullptr);
EncodeResult encode_stream(std::istream& in, Level level, bool encrypted, std::uint64_t seed = 0,
    std::unique_ptr<KeySource> keys = nullptr);

// Stores every chunk of an encode result.
void store_all(const EncodeResult& result, ChunkSource& store);

struct DecodeOptions {
    RetrievalStrategy strategy;
    bool use_replicas = true; // fall back to dispersed replicas for the root
};

struct DecodeResult {
    Bytes data;
    BatchOutcome outcome; // summed over all batches; wall latency along the tree
    int batches = 0;
};

// Decode a tree built at `level`; encryption follows from the root reference.
DecodeResult decode_stream(const Reference& root, Level level, ChunkSource& source, const DecodeOptions& options = {});

} // namespace swarm_ec
