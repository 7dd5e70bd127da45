#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "swarm_ec/error.hpp"
#include "swarm_ec/hashtree.hpp"
#include "swarm_ec/netstore_sim.hpp"
#include "swarm_ec/pac_layout.hpp"

using namespace swarm_ec;

namespace {

Bytes content(std::size_t size, std::uint64_t seed = 1)
{
    std::mt19937_64 rng(seed);
    return oracle::random_bytes(rng, size);
}

Bytes round_trip(const Bytes& data, Level level, bool encrypted, StrategyKind kind = StrategyKind::race)
{
    EncodeResult enc = encode_stream(data, level, encrypted, 42);
    auto store = std::make_shared<MemoryStore>();
    store_all(enc, *store);
    SimStore sim(SimConfig{}, store);
    DecodeOptions opts;
    opts.strategy.kind = kind;
    opts.strategy.node_overlay = Address{};
    return decode_stream(enc.manifest.root, level, sim, opts).data;
}

std::vector<Reference> parse_refs(const Bytes& payload, int data_refs, int ref_size)
{
    std::vector<Reference> out;
    for (int d = 0; d < data_refs; ++d)
        out.push_back(Reference::parse(ByteView(payload).subspan(static_cast<std::size_t>(d) * ref_size, ref_size)));
    return out;
}

} // namespace

TEST_SUITE("hashtree")
{
    TEST_CASE("round trips across sizes, levels and encryption")
    {
        const std::size_t sizes[] = {0, 1, 4095, 4096, 4097, 4096 * 3 + 5, 4096 * 40};
        for (int l = 0; l < 5; ++l)
            for (bool enc : {false, true})
                for (std::size_t size : sizes) {
                    Bytes data = content(size, size + 1);
                    CAPTURE(l);
                    CAPTURE(enc);
                    CAPTURE(size);
                    CHECK(round_trip(data, static_cast<Level>(l), enc) == data);
                }
    }

    TEST_CASE("every strategy decodes an intact tree")
    {
        Bytes data = content(4096 * 130 + 77);
        for (auto kind : {StrategyKind::none, StrategyKind::data, StrategyKind::prox, StrategyKind::race})
            CHECK(round_trip(data, Level::strong, false, kind) == data);
    }

    TEST_CASE("empty and single-chunk files are one leaf")
    {
        auto empty = encode_stream(Bytes{}, Level::medium, false);
        CHECK(empty.manifest.level_count == 1);
        CHECK(empty.manifest.total_span == 0);
        CHECK(empty.root_chunk->span() == 0);
        CHECK(empty.manifest.root.address == content_address(Chunk::leaf(Bytes{})));

        Bytes one = content(4096);
        auto single = encode_stream(one, Level::insane, false);
        CHECK(single.manifest.root.address == content_address(Chunk::leaf(one)));
        CHECK(single.chunks.size() == 1);
    }

    TEST_CASE("tree shape for one full batch plus a byte")
    {
        // 119 full leaves fill a MEDIUM PAC; the extra leaf is promoted next to it.
        Bytes data = content(4096 * 119 + 1);
        auto enc = encode_stream(data, Level::medium, false);
        const auto& m = enc.manifest;
        CHECK(m.total_span == 4096 * 119 + 1);
        CHECK(m.level_count == 3);
        const Chunk& root = *enc.root_chunk;
        CHECK(root.span() == 4096 * 119 + 1);
        CHECK(data_refs_for_payload(root.payload().size(), m.plan) == 2);
        CHECK(root.payload().size() == 2 * 32 + 3 * 32);

        auto refs = parse_refs(root.payload(), 2, 32);
        int leaves = 0, parities = 0, pacs = 0;
        for (const auto& c : enc.chunks) {
            if (c.parity)
                ++parities;
            else if (read_span(c.serialized) <= kChunkSize)
                ++leaves;
            else
                ++pacs;
        }
        CHECK(leaves == 120);
        CHECK(parities == 9 + 3);
        CHECK(pacs == 2);
        CHECK(m.chunk_count() == static_cast<int>(enc.chunks.size()));
        CHECK(m.parity_count() == 12);

        // The second root child is the lone 1-byte leaf.
        CHECK(refs[1].address == content_address(Chunk::leaf(Bytes{data.back()})));
    }

    TEST_CASE("reference counts follow from spans for every stored PAC")
    {
        for (int l = 0; l < 5; ++l)
            for (bool encrypted : {false, true})
                for (std::size_t size : {4096u * 2, 4096u * 65 + 3, 4096u * 129, 4096u * 300 + 1}) {
                    auto enc = encode_stream(content(size), static_cast<Level>(l), encrypted, 3);
                    for (const auto& c : enc.chunks) {
                        std::uint64_t span = read_span(c.serialized);
                        if (c.parity || span <= kChunkSize)
                            continue;
                        int refs = data_refs_for_span(span, enc.manifest.plan);
                        CHECK(c.serialized.size() == kSpanSize + batch_layout(refs, enc.manifest.plan).bytes);
                    }
                }
    }

    TEST_CASE("a full batch tolerates exactly its parity count of deletions")
    {
        Bytes data = content(4096 * 119, 5);
        auto enc = encode_stream(data, Level::medium, false);
        REQUIRE(enc.root_chunk->payload().size() == 4096);
        auto children = parse_refs(enc.root_chunk->payload(), 128, 32);

        for (int deleted : {9, 10}) {
            auto store = std::make_shared<MemoryStore>();
            store_all(enc, *store);
            for (int d = 0; d < deleted; ++d)
                store->erase(children[d * 12].address);
            SimStore sim(SimConfig{}, store);
            DecodeOptions opts;
            if (deleted == 9) {
                auto r = decode_stream(enc.manifest.root, Level::medium, sim, opts);
                CHECK(r.data == data);
                CHECK(r.outcome.recovered);
            } else {
                try {
                    decode_stream(enc.manifest.root, Level::medium, sim, opts);
                    FAIL("expected unrecoverable_batch");
                } catch (const RetrievalError& e) {
                    CHECK(e.code() == ErrorCode::unrecoverable_batch);
                }
            }
        }
    }

    TEST_CASE("random loss within every batch's parity budget always decodes")
    {
        std::mt19937_64 rng(23);
        Bytes data = content(4096 * 250 + 999, 8);
        auto enc = encode_stream(data, Level::insane, true, 9);
        for (int t = 0; t < 5; ++t) {
            auto store = std::make_shared<MemoryStore>();
            store_all(enc, *store);
            // Drop each non-root chunk with probability 0.05; batches here have >= 5 parities
            // but a batch may lose more, so only count clean successes against failures.
            int dropped = 0;
            for (const auto& c : enc.chunks)
                if (c.address != enc.manifest.root.address && rng() % 100 < 5) {
                    store->erase(c.address);
                    ++dropped;
                }
            SimStore sim(SimConfig{}, store);
            try {
                auto r = decode_stream(enc.manifest.root, Level::insane, sim);
                CHECK(r.data == data);
            } catch (const RetrievalError& e) {
                CHECK(e.code() == ErrorCode::unrecoverable_batch);
            }
            CHECK(dropped > 0);
        }
    }

    TEST_CASE("encoding is deterministic")
    {
        Bytes data = content(4096 * 20 + 10);
        auto a = encode_stream(data, Level::strong, false, 1);
        auto b = encode_stream(data, Level::strong, false, 2);
        CHECK(a.manifest.root.address == b.manifest.root.address);

        auto c = encode_stream(data, Level::strong, true, 1);
        auto d = encode_stream(data, Level::strong, true, 1);
        auto e = encode_stream(data, Level::strong, true, 2);
        CHECK(c.manifest.root.hex() == d.manifest.root.hex());
        CHECK(c.manifest.root.address != e.manifest.root.address);
        CHECK(c.manifest.root.hex().size() == 128);

        std::istringstream in(std::string(data.begin(), data.end()));
        CHECK(encode_stream(in, Level::strong, true, 1).manifest.root.hex() == c.manifest.root.hex());
    }

    TEST_CASE("chunked writes give the same tree")
    {
        Bytes data = content(4096 * 9 + 17);
        Chunker chunker(Level::insane, false);
        std::mt19937_64 rng(1);
        std::size_t off = 0;
        while (off < data.size()) {
            std::size_t len = std::min<std::size_t>(data.size() - off, 1 + rng() % 7000);
            chunker.write(ByteView(data).subspan(off, len));
            off += len;
        }
        CHECK(chunker.finish().manifest.root.address == encode_stream(data, Level::insane, false).manifest.root.address);
    }

    TEST_CASE("encrypted chunks do not expose plaintext")
    {
        Bytes data = content(4096 * 3);
        auto enc = encode_stream(data, Level::medium, true, 11);
        for (const auto& c : enc.chunks) {
            if (c.parity || read_span(c.serialized) > kChunkSize)
                continue;
            Bytes payload(c.serialized.begin() + kSpanSize, c.serialized.end());
            CHECK(std::search(data.begin(), data.end(), payload.begin(), payload.begin() + 64) == data.end());
        }
    }

    TEST_CASE("fixed key sources")
    {
        std::vector<EncryptionKey> keys(2);
        keys[1][0] = 1;
        CHECK_THROWS_AS(encode_stream(content(4096 * 3), Level::none, true, 0, std::make_unique<FixedKeySource>(keys)), Error);
        try {
            encode_stream(content(4096 * 3), Level::none, true, 0, std::make_unique<FixedKeySource>(keys));
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::key_source_exhausted);
        }

        std::vector<EncryptionKey> plenty(8);
        for (int i = 0; i < 8; ++i)
            plenty[i][0] = static_cast<std::uint8_t>(i);
        auto enc = encode_stream(content(4096 * 3), Level::none, true, 0, std::make_unique<FixedKeySource>(plenty));
        CHECK(enc.manifest.root.encrypted());
    }

    TEST_CASE("manifest json round trip")
    {
        auto enc = encode_stream(content(4096 * 130), Level::insane, true, 77);
        enc.manifest.replica_depth = 3;
        auto back = TreeManifest::from_json(enc.manifest.to_json());
        CHECK(back.root.hex() == enc.manifest.root.hex());
        CHECK(back.level_count == enc.manifest.level_count);
        CHECK(back.total_span == enc.manifest.total_span);
        CHECK(back.plan.level.id == Level::insane);
        CHECK(back.plan.encrypted);
        CHECK(back.seed == 77);
        CHECK(back.replica_depth == 3);
        CHECK(back.chunk_count() == enc.manifest.chunk_count());
        CHECK_THROWS_AS(TreeManifest::from_json("{\"root\": 5}"), Error);
    }

    TEST_CASE("a missing root with no replicas is not found")
    {
        auto enc = encode_stream(content(4096 * 4), Level::strong, false);
        auto store = std::make_shared<MemoryStore>();
        store_all(enc, *store);
        store->erase(enc.manifest.root.address);
        SimStore sim(SimConfig{}, store);
        try {
            decode_stream(enc.manifest.root, Level::strong, sim);
            FAIL("expected not_found");
        } catch (const RetrievalError& e) {
            CHECK(e.code() == ErrorCode::not_found);
        }
    }
}
