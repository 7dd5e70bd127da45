#include "swarm_ec/chunk_store.hpp"

#include <fstream>
#include <iterator>

#include "swarm_ec/error.hpp"

namespace swarm_ec {

Address put_chunk(ChunkSource& store, const Chunk& chunk)
{
    Bytes serialized = chunk.serialize();
    Address address = content_address_of_serialized(serialized);
    store.put(address, std::move(serialized));
    return address;
}

Address put_soc(ChunkSource& store, const SocChunk& soc)
{
    Address address = soc.address();
    store.put(address, soc.serialize());
    return address;
}

GetResult MemoryStore::get(const Address& address)
{
    std::shared_lock lock(mu_);
    auto it = chunks_.find(address);
    if (it == chunks_.end())
        return {};
    return {it->second, 0.0};
}

void MemoryStore::put(const Address& address, Bytes serialized)
{
    std::unique_lock lock(mu_);
    chunks_.try_emplace(address, std::move(serialized));
}

bool MemoryStore::contains(const Address& address) const
{
    std::shared_lock lock(mu_);
    return chunks_.contains(address);
}

bool MemoryStore::erase(const Address& address)
{
    std::unique_lock lock(mu_);
    return chunks_.erase(address) > 0;
}

std::size_t MemoryStore::size() const
{
    std::shared_lock lock(mu_);
    return chunks_.size();
}

DiskStore::DiskStore(std::filesystem::path root)
    : root_(std::move(root))
{
    std::filesystem::create_directories(root_ / "chunks");
    std::filesystem::create_directories(manifest_dir());
}

std::filesystem::path DiskStore::chunk_path(const Address& address) const
{
    return root_ / "chunks" / address.hex();
}

GetResult DiskStore::get(const Address& address)
{
    std::ifstream in(chunk_path(address), std::ios::binary);
    if (!in)
        return {};
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return {std::move(data), 0.0};
}

void DiskStore::put(const Address& address, Bytes serialized)
{
    auto path = chunk_path(address);
    if (std::filesystem::exists(path))
        return;
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::invalid_argument, "cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(serialized.data()), static_cast<std::streamsize>(serialized.size()));
    }
    std::filesystem::rename(tmp, path);
}

bool DiskStore::contains(const Address& address) const
{
    return std::filesystem::exists(chunk_path(address));
}

} // namespace swarm_ec
