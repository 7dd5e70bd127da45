#include "swarm_ec/rs_codec.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "swarm_ec/error.hpp"

namespace swarm_ec::rs {
namespace {

struct Tables {
    std::array<std::uint8_t, 512> exp{};
    std::array<int, 256> log{};
    std::array<std::array<std::uint8_t, 256>, 256> mul{};

    Tables()
    {
        unsigned x = 1;
        for (int i = 0; i < 255; ++i) {
            exp[i] = static_cast<std::uint8_t>(x);
            log[x] = i;
            x <<= 1;
            if (x & 0x100)
                x ^= 0x11d;
        }
        for (int i = 255; i < 512; ++i)
            exp[i] = exp[i - 255];
        for (int a = 0; a < 256; ++a)
            for (int b = 0; b < 256; ++b)
                mul[a][b] = (a == 0 || b == 0) ? 0 : exp[log[a] + log[b]];
    }
};

const Tables& tables()
{
    static const Tables t;
    return t;
}

void mul_add(std::uint8_t coef, const std::uint8_t* src, std::uint8_t* dst, std::size_t len)
{
    if (coef == 0)
        return;
    if (coef == 1) {
        for (std::size_t i = 0; i < len; ++i)
            dst[i] ^= src[i];
        return;
    }
    const auto& row = tables().mul[coef];
    for (std::size_t i = 0; i < len; ++i)
        dst[i] ^= row[src[i]];
}

// Gauss-Jordan inversion of a square matrix in place.
void invert(std::vector<std::uint8_t>& m, int size)
{
    std::vector<std::uint8_t> inv(static_cast<std::size_t>(size) * size, 0);
    for (int i = 0; i < size; ++i)
        inv[i * size + i] = 1;
    auto at = [size](std::vector<std::uint8_t>& v, int r, int c) -> std::uint8_t& {
        return v[static_cast<std::size_t>(r) * size + c];
    };
    for (int col = 0; col < size; ++col) {
        int pivot = col;
        while (pivot < size && at(m, pivot, col) == 0)
            ++pivot;
        if (pivot == size)
            throw Error(ErrorCode::invalid_argument, "singular matrix");
        if (pivot != col) {
            for (int c = 0; c < size; ++c) {
                std::swap(at(m, pivot, c), at(m, col, c));
                std::swap(at(inv, pivot, c), at(inv, col, c));
            }
        }
        std::uint8_t scale = gf::inv(at(m, col, col));
        for (int c = 0; c < size; ++c) {
            at(m, col, c) = gf::mul(at(m, col, c), scale);
            at(inv, col, c) = gf::mul(at(inv, col, c), scale);
        }
        for (int r = 0; r < size; ++r) {
            if (r == col || at(m, r, col) == 0)
                continue;
            std::uint8_t f = at(m, r, col);
            mul_add(f, &at(m, col, 0), &at(m, r, 0), size);
            mul_add(f, &at(inv, col, 0), &at(inv, r, 0), size);
        }
    }
    m = std::move(inv);
}

void check_counts(int m, int k)
{
    if (m < 1 || k < 0)
        throw Error(ErrorCode::invalid_argument,
            "need at least one data shard and non-negative parity count");
    if (m + k > kMaxShards)
        throw Error(ErrorCode::too_many_shards,
            std::to_string(m) + "+" + std::to_string(k) + " exceeds 128 shards");
}

} // namespace

namespace gf {

std::uint8_t add(std::uint8_t a, std::uint8_t b) noexcept { return a ^ b; }

std::uint8_t mul(std::uint8_t a, std::uint8_t b) noexcept { return tables().mul[a][b]; }

std::uint8_t inv(std::uint8_t a)
{
    if (a == 0)
        throw Error(ErrorCode::invalid_argument, "inverse of zero in GF(256)");
    return tables().exp[255 - tables().log[a]];
}

std::uint8_t div(std::uint8_t a, std::uint8_t b) { return mul(a, inv(b)); }

std::uint8_t pow(std::uint8_t a, unsigned n) noexcept
{
    if (n == 0)
        return 1;
    if (a == 0)
        return 0;
    return tables().exp[(tables().log[a] * static_cast<unsigned long>(n)) % 255];
}

} // namespace gf

ReedSolomon::ReedSolomon(int data_shards, int parity_shards)
    : data_(data_shards)
    , parity_(parity_shards)
{
    check_counts(data_, parity_);
    const int n = total_shards();
    std::vector<std::uint8_t> vandermonde(static_cast<std::size_t>(n) * data_);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < data_; ++c)
            vandermonde[static_cast<std::size_t>(r) * data_ + c] = gf::pow(static_cast<std::uint8_t>(r), c);

    std::vector<std::uint8_t> top(vandermonde.begin(), vandermonde.begin() + static_cast<std::ptrdiff_t>(data_) * data_);
    invert(top, data_);

    matrix_.assign(static_cast<std::size_t>(n) * data_, 0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < data_; ++c) {
            std::uint8_t acc = 0;
            for (int j = 0; j < data_; ++j)
                acc ^= gf::mul(vandermonde[static_cast<std::size_t>(r) * data_ + j],
                    top[static_cast<std::size_t>(j) * data_ + c]);
            matrix_[static_cast<std::size_t>(r) * data_ + c] = acc;
        }
}

std::span<const std::uint8_t> ReedSolomon::generator_row(int r) const
{
    return std::span<const std::uint8_t>(matrix_).subspan(static_cast<std::size_t>(r) * data_, data_);
}

std::vector<Bytes> ReedSolomon::encode(std::span<const Bytes> data) const
{
    if (static_cast<int>(data.size()) != data_)
        throw Error(ErrorCode::invalid_argument,
            "expected " + std::to_string(data_) + " data shards, got " + std::to_string(data.size()));
    const std::size_t len = data.front().size();
    for (const Bytes& d : data)
        if (d.size() != len)
            throw Error(ErrorCode::shard_length_mismatch, "data shards differ in length");

    std::vector<Bytes> parity(parity_, Bytes(len, 0));
    for (int p = 0; p < parity_; ++p) {
        auto row = generator_row(data_ + p);
        for (int c = 0; c < data_; ++c)
            mul_add(row[c], data[c].data(), parity[p].data(), len);
    }
    return parity;
}

void ReedSolomon::reconstruct(ShardSlots& shards) const { reconstruct_impl(shards, false); }

void ReedSolomon::reconstruct_data(ShardSlots& shards) const { reconstruct_impl(shards, true); }

void ReedSolomon::reconstruct_impl(ShardSlots& shards, bool data_only) const
{
    const int n = total_shards();
    if (static_cast<int>(shards.size()) != n)
        throw Error(ErrorCode::invalid_argument,
            "expected " + std::to_string(n) + " shard slots, got " + std::to_string(shards.size()));

    std::vector<int> present;
    std::optional<std::size_t> len;
    for (int i = 0; i < n; ++i) {
        if (!shards[i])
            continue;
        if (len && shards[i]->size() != *len)
            throw Error(ErrorCode::shard_length_mismatch, "present shards differ in length");
        len = shards[i]->size();
        present.push_back(i);
    }
    if (static_cast<int>(present.size()) < data_)
        throw Error(ErrorCode::unrecoverable_batch,
            std::to_string(present.size()) + " of " + std::to_string(n) + " shards present, need " + std::to_string(data_));

    bool data_missing = false;
    for (int i = 0; i < data_; ++i)
        data_missing = data_missing || !shards[i];

    if (data_missing) {
        // Decode matrix from the first m present rows.
        std::vector<std::uint8_t> sub(static_cast<std::size_t>(data_) * data_);
        for (int r = 0; r < data_; ++r) {
            auto row = generator_row(present[r]);
            std::copy(row.begin(), row.end(), sub.begin() + static_cast<std::ptrdiff_t>(r) * data_);
        }
        invert(sub, data_);
        for (int c = 0; c < data_; ++c) {
            if (shards[c])
                continue;
            Bytes out(*len, 0);
            for (int j = 0; j < data_; ++j)
                mul_add(sub[static_cast<std::size_t>(c) * data_ + j], shards[present[j]]->data(), out.data(), *len);
            shards[c] = std::move(out);
        }
    }
    if (data_only)
        return;
    for (int p = data_; p < n; ++p) {
        if (shards[p])
            continue;
        auto row = generator_row(p);
        Bytes out(*len, 0);
        for (int c = 0; c < data_; ++c)
            mul_add(row[c], shards[c]->data(), out.data(), *len);
        shards[p] = std::move(out);
    }
}

const ReedSolomon& codec_for(int data_shards, int parity_shards)
{
    check_counts(data_shards, parity_shards);
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<ReedSolomon>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{data_shards, parity_shards}];
    if (!slot)
        slot = std::make_unique<ReedSolomon>(data_shards, parity_shards);
    return *slot;
}

std::vector<Bytes> encode(std::span<const Bytes> data, int parity_shards)
{
    if (data.empty())
        throw Error(ErrorCode::invalid_argument, "no data shards");
    return codec_for(static_cast<int>(data.size()), parity_shards).encode(data);
}

void reconstruct(ShardSlots& shards, int data_shards, int parity_shards)
{
    codec_for(data_shards, parity_shards).reconstruct(shards);
}

} // namespace swarm_ec::rs
