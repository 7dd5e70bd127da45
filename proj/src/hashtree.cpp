#include "swarm_ec/hashtree.hpp"

#include <algorithm>
#include <json.hpp>

#include "swarm_ec/error.hpp"
#include "swarm_ec/pac_layout.hpp"
#include "swarm_ec/rs_codec.hpp"

namespace swarm_ec {

std::optional<EncryptionKey> DerivedKeySource::next(int height)
{
    if (height < 0)
        throw Error(ErrorCode::invalid_argument, "negative tree height");
    if (counters_.size() <= static_cast<std::size_t>(height))
        counters_.resize(height + 1, 0);
    std::uint64_t index = counters_[height]++;
    std::array<std::uint8_t, 20> input{};
    for (int b = 0; b < 8; ++b)
        input[b] = static_cast<std::uint8_t>(seed_ >> (8 * b));
    for (int b = 0; b < 4; ++b)
        input[8 + b] = static_cast<std::uint8_t>(static_cast<std::uint32_t>(height) >> (8 * b));
    for (int b = 0; b < 8; ++b)
        input[12 + b] = static_cast<std::uint8_t>(index >> (8 * b));
    return keccak256(input);
}

std::optional<EncryptionKey> FixedKeySource::next(int)
{
    if (used_ >= keys_.size())
        return std::nullopt;
    return keys_[used_++];
}

int TreeManifest::chunk_count() const
{
    int n = 0;
    for (const auto& l : levels)
        n += l.data_chunks + l.parity_chunks;
    return n;
}

int TreeManifest::parity_count() const
{
    int n = 0;
    for (const auto& l : levels)
        n += l.parity_chunks;
    return n;
}

std::string TreeManifest::to_json() const
{
    nlohmann::json j;
    j["root"] = root.hex();
    j["level"] = static_cast<int>(plan.level.id);
    j["level_name"] = std::string(plan.level.name);
    j["encrypted"] = plan.encrypted;
    j["m"] = plan.m;
    j["k"] = plan.k;
    j["seed"] = seed;
    j["total_span"] = total_span;
    j["level_count"] = level_count;
    j["replica_depth"] = replica_depth;
    auto& lv = j["levels"] = nlohmann::json::array();
    for (const auto& l : levels)
        lv.push_back({{"height", l.height}, {"data_chunks", l.data_chunks}, {"parity_chunks", l.parity_chunks}});
    return j.dump(2);
}

TreeManifest TreeManifest::from_json(const std::string& text)
{
    try {
        auto j = nlohmann::json::parse(text);
        TreeManifest m;
        m.root = Reference::from_hex(j.at("root").get<std::string>());
        m.plan = plan_for_level(static_cast<Level>(j.at("level").get<int>()), j.at("encrypted").get<bool>());
        m.seed = j.at("seed").get<std::uint64_t>();
        m.total_span = j.at("total_span").get<std::uint64_t>();
        m.level_count = j.at("level_count").get<int>();
        m.replica_depth = j.value("replica_depth", -1);
        for (const auto& l : j.at("levels"))
            m.levels.push_back({l.at("height").get<int>(), l.at("data_chunks").get<int>(), l.at("parity_chunks").get<int>()});
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::malformed, std::string("manifest: ") + e.what());
    }
}

struct Chunker::Impl {
    struct Pending {
        Reference ref;
        Bytes serialized; // as stored, i.e. encrypted when the tree is
        std::uint64_t span = 0;
        int height = 0;
    };

    ParityPlan plan;
    std::unique_ptr<KeySource> keys;
    std::uint64_t seed = 0;
    Bytes buffer;
    std::uint64_t total = 0;
    std::vector<std::vector<Pending>> batches; // [h]: children of the PAC being built at height h
    std::vector<LevelStats> stats;
    std::vector<StoredChunk> chunks;

    LevelStats& stats_at(int h)
    {
        while (stats.size() <= static_cast<std::size_t>(h))
            stats.push_back({static_cast<int>(stats.size()), 0, 0});
        return stats[h];
    }

    std::vector<Pending>& batch_at(int h)
    {
        if (batches.size() <= static_cast<std::size_t>(h))
            batches.resize(h + 1);
        return batches[h];
    }

    Pending make_data_chunk(const Chunk& plain, int height)
    {
        Pending p;
        p.span = plain.span();
        p.height = height;
        if (plan.encrypted) {
            auto key = keys->next(height);
            if (!key)
                throw Error(ErrorCode::key_source_exhausted, "no key for chunk at height " + std::to_string(height));
            p.serialized = encrypt_chunk(plain, *key).serialize();
            p.ref.key = *key;
        } else {
            p.serialized = plain.serialize();
        }
        p.ref.address = content_address_of_serialized(p.serialized);
        chunks.push_back({p.ref.address, p.serialized, height, false});
        ++stats_at(height).data_chunks;
        return p;
    }

    void add(int h, Pending p)
    {
        auto& batch = batch_at(h);
        batch.push_back(std::move(p));
        if (static_cast<int>(batch.size()) == plan.m)
            seal(h);
    }

    void seal(int h)
    {
        std::vector<Pending> batch = std::move(batch_at(h));
        batches[h].clear();
        const int i = static_cast<int>(batch.size());
        const BatchLayout layout = batch_layout(i, plan);

        std::size_t shard_len = 0;
        for (const auto& p : batch)
            shard_len = std::max(shard_len, p.serialized.size());
        std::vector<Bytes> shards;
        shards.reserve(i);
        for (const auto& p : batch) {
            shards.push_back(p.serialized);
            shards.back().resize(shard_len, 0);
        }
        std::vector<Bytes> parities;
        if (layout.parity_refs > 0)
            parities = rs::codec_for(i, layout.parity_refs).encode(shards);

        Bytes payload;
        payload.reserve(layout.bytes);
        std::uint64_t span = 0;
        for (const auto& p : batch) {
            p.ref.append_to(payload);
            span += p.span;
        }
        for (auto& parity : parities) {
            Address a = content_address_of_serialized(parity);
            payload.insert(payload.end(), a.bytes.begin(), a.bytes.end());
            chunks.push_back({a, std::move(parity), h - 1, true});
        }
        stats_at(h).parity_chunks += layout.parity_refs;
        add(h + 1, make_data_chunk(Chunk(span, std::move(payload)), h));
    }

    bool has_open_above(int h) const
    {
        for (std::size_t up = h + 1; up < batches.size(); ++up)
            if (!batches[up].empty())
                return true;
        return false;
    }

    void emit_leaf()
    {
        Pending leaf = make_data_chunk(Chunk::leaf(buffer), 0);
        buffer.clear();
        add(1, std::move(leaf));
    }
};

Chunker::Chunker(Level level, bool encrypted, std::uint64_t seed, std::unique_ptr<KeySource> keys)
    : impl_(std::make_unique<Impl>())
{
    impl_->plan = plan_for_level(level, encrypted);
    impl_->seed = seed;
    impl_->keys = std::move(keys);
    if (encrypted && !impl_->keys)
        impl_->keys = std::make_unique<DerivedKeySource>(seed);
    impl_->buffer.reserve(kChunkSize);
}

Chunker::~Chunker() = default;
Chunker::Chunker(Chunker&&) noexcept = default;
Chunker& Chunker::operator=(Chunker&&) noexcept = default;

void Chunker::write(ByteView data)
{
    auto& s = *impl_;
    while (!data.empty()) {
        std::size_t take = std::min(kChunkSize - s.buffer.size(), data.size());
        s.buffer.insert(s.buffer.end(), data.begin(), data.begin() + static_cast<std::ptrdiff_t>(take));
        data = data.subspan(take);
        s.total += take;
        if (s.buffer.size() == kChunkSize)
            s.emit_leaf();
    }
}

EncodeResult Chunker::finish()
{
    auto& s = *impl_;
    if (!s.buffer.empty() || s.total == 0)
        s.emit_leaf();

    std::optional<Impl::Pending> root;
    for (int h = 1; !root; ++h) {
        if (static_cast<std::size_t>(h) >= s.batches.size())
            throw Error(ErrorCode::invalid_argument, "chunker lost its root");
        auto& batch = s.batches[h];
        if (batch.empty())
            continue;
        if (batch.size() == 1) {
            Impl::Pending lone = std::move(batch.front());
            batch.clear();
            if (!s.has_open_above(h))
                root = std::move(lone);
            else
                s.add(h + 1, std::move(lone)); // dangling: promote
            continue;
        }
        s.seal(h);
    }

    EncodeResult result;
    TreeManifest& m = result.manifest;
    m.root = root->ref;
    m.level_count = root->height + 1;
    m.total_span = s.total;
    m.plan = s.plan;
    s.stats_at(root->height);
    m.levels = s.stats;
    m.seed = s.seed;
    result.root_chunk = Chunk::deserialize(root->serialized);
    result.chunks = std::move(s.chunks);
    return result;
}

EncodeResult encode_stream(ByteView data, Level level, bool encrypted, std::uint64_t seed,
    std::unique_ptr<KeySource> keys)
{
    Chunker chunker(level, encrypted, seed, std::move(keys));
    chunker.write(data);
    return chunker.finish();
}

EncodeResult encode_stream(std::istream& in, Level level, bool encrypted, std::uint64_t seed,
    std::unique_ptr<KeySource> keys)
{
    Chunker chunker(level, encrypted, seed, std::move(keys));
    Bytes block(1 << 16);
    while (in) {
        in.read(reinterpret_cast<char*>(block.data()), static_cast<std::streamsize>(block.size()));
        auto got = static_cast<std::size_t>(in.gcount());
        if (got == 0)
            break;
        chunker.write(ByteView(block.data(), got));
    }
    return chunker.finish();
}

void store_all(const EncodeResult& result, ChunkSource& store)
{
    for (const auto& c : result.chunks)
        store.put(c.address, c.serialized);
}

namespace {

struct Joiner {
    ParityPlan plan;
    ChunkSource& source;
    const DecodeOptions& options;
    DecodeResult& out;

    // Appends the subtree's bytes; returns its simulated wall latency.
    double process(const Bytes& serialized, const Reference& ref)
    {
        Chunk chunk = Chunk::deserialize(serialized);
        if (ref.key)
            chunk = encrypt_chunk(chunk, *ref.key);
        if (!chunk.is_intermediate()) {
            if (chunk.payload().size() != chunk.span())
                throw Error(ErrorCode::malformed, "leaf payload disagrees with its span");
            out.data.insert(out.data.end(), chunk.payload().begin(), chunk.payload().end());
            return 0.0;
        }

        const ByteView payload = chunk.payload();
        const int i = data_refs_for_payload(payload.size(), plan);
        const BatchLayout layout = batch_layout(i, plan);
        std::vector<Reference> refs;
        refs.reserve(layout.n_refs());
        for (int d = 0; d < i; ++d)
            refs.push_back(Reference::parse(payload.subspan(static_cast<std::size_t>(d) * plan.data_ref_size(), plan.data_ref_size())));
        for (int p = 0; p < layout.parity_refs; ++p)
            refs.push_back(Reference::parse(payload.subspan(layout.parity_offset + static_cast<std::size_t>(p) * kHashSize, kHashSize)));

        BatchResult batch = retrieve_batch(refs, i, plan, options.strategy, source);
        ++out.batches;
        out.outcome.add_counts(batch.outcome);

        std::uint64_t child_span = 0;
        for (const auto& c : batch.data)
            child_span += read_span(c);
        if (child_span != chunk.span())
            throw Error(ErrorCode::malformed, "PAC span disagrees with its children");

        double children = 0.0;
        for (int d = 0; d < i; ++d) {
            double t = process(batch.data[d], refs[d]);
            children = options.strategy.kind == StrategyKind::none ? children + t : std::max(children, t);
        }
        return batch.outcome.wall_latency_ms + children;
    }
};

} // namespace

DecodeResult decode_stream(const Reference& root, Level level, ChunkSource& source, const DecodeOptions& options)
{
    DecodeResult result;
    Joiner joiner{plan_for_level(level, root.encrypted()), source, options, result};
    SingletonResult top = retrieve_singleton(root, level, options.strategy, source, options.use_replicas);
    result.outcome.add_counts(top.outcome);
    result.outcome.wall_latency_ms = top.outcome.wall_latency_ms + joiner.process(top.data, root);
    return result;
}

} // namespace swarm_ec
