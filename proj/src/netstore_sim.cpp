#include "swarm_ec/netstore_sim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "swarm_ec/error.hpp"

namespace swarm_ec {
namespace {

constexpr std::uint64_t kFailureStream = 0x6661696c;
constexpr std::uint64_t kLatencyStream = 0x6c617431;
constexpr std::uint64_t kLatencyStream2 = 0x6c617432;
constexpr std::uint64_t kPermanentCall = ~std::uint64_t{0};

double parse_double(std::string_view s)
{
    try {
        std::size_t used = 0;
        std::string str(s);
        double v = std::stod(str, &used);
        if (used != str.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::invalid_argument, "not a number: '" + std::string(s) + "'");
    }
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos)
            return parts;
        start = pos + 1;
    }
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

LatencyModel LatencyModel::parse(std::string_view text)
{
    auto parts = split(text, ':');
    if (parts[0] == "constant" && parts.size() == 2)
        return constant(parse_double(parts[1]));
    if (parts[0] == "uniform" && parts.size() == 3) {
        auto m = uniform(parse_double(parts[1]), parse_double(parts[2]));
        if (m.b < m.a)
            throw Error(ErrorCode::invalid_argument, "uniform latency needs lo <= hi");
        return m;
    }
    if (parts[0] == "lognormal" && parts.size() == 3)
        return lognormal(parse_double(parts[1]), parse_double(parts[2]));
    throw Error(ErrorCode::invalid_argument,
        "latency must be constant:V, uniform:LO:HI or lognormal:MU:SIGMA, got '" + std::string(text) + "'");
}

std::string LatencyModel::describe() const
{
    std::ostringstream out;
    switch (kind) {
    case Kind::constant: out << "constant:" << a; break;
    case Kind::uniform: out << "uniform:" << a << ':' << b; break;
    case Kind::lognormal: out << "lognormal:" << a << ':' << b; break;
    }
    return out.str();
}

double LatencyModel::sample(double u1, double u2) const
{
    switch (kind) {
    case Kind::constant:
        return a;
    case Kind::uniform:
        return a + (b - a) * u1;
    case Kind::lognormal: {
        // Box-Muller; 1 - u1 keeps the log argument in (0, 1].
        double z = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return std::exp(a + b * z);
    }
    }
    return a;
}

std::string_view to_string(FailureMode mode) noexcept
{
    return mode == FailureMode::per_get_transient ? "per_get_transient" : "per_chunk_permanent";
}

FailureMode parse_failure_mode(std::string_view text)
{
    if (text == "per_get_transient" || text == "transient")
        return FailureMode::per_get_transient;
    if (text == "per_chunk_permanent" || text == "permanent")
        return FailureMode::per_chunk_permanent;
    throw Error(ErrorCode::invalid_argument, "unknown failure mode '" + std::string(text) + "'");
}

DeadPrefix DeadPrefix::parse(std::string_view text)
{
    if (text.starts_with("0b"))
        text.remove_prefix(2);
    if (text.empty() || text.size() > 32)
        throw Error(ErrorCode::invalid_argument, "dead prefix needs 1..32 binary digits");
    DeadPrefix p;
    for (char c : text) {
        if (c != '0' && c != '1')
            throw Error(ErrorCode::invalid_argument, "dead prefix must be binary, got '" + std::string(text) + "'");
        p.bits = (p.bits << 1) | static_cast<std::uint32_t>(c - '0');
    }
    p.depth = static_cast<int>(text.size());
    return p;
}

SimStore::SimStore(SimConfig config, std::shared_ptr<ChunkSource> backing)
    : config_(std::move(config))
    , backing_(std::move(backing))
{
    if (!(config_.eps >= 0.0 && config_.eps <= 1.0))
        throw Error(ErrorCode::invalid_argument, "eps must be in [0,1]");
}

double SimStore::uniform(const Address& address, std::uint64_t call, std::uint64_t stream) const
{
    std::uint64_t h = splitmix64(config_.seed ^ splitmix64(stream));
    for (std::size_t w = 0; w < kHashSize; w += 8) {
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < 8; ++i)
            word = (word << 8) | address.bytes[w + i];
        h = splitmix64(h ^ word);
    }
    h = splitmix64(h ^ call);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

bool SimStore::fails(const Address& address, std::uint64_t call) const
{
    for (const auto& dead : config_.dead_prefixes)
        if (dead.covers(address))
            return true;
    if (config_.eps <= 0.0)
        return false;
    std::uint64_t key = config_.failure_mode == FailureMode::per_chunk_permanent ? kPermanentCall : call;
    return uniform(address, key, kFailureStream) < config_.eps;
}

double SimStore::latency(const Address& address, std::uint64_t call) const
{
    return config_.latency.sample(uniform(address, call, kLatencyStream), uniform(address, call, kLatencyStream2));
}

GetResult SimStore::get(const Address& address)
{
    std::uint64_t call = 0;
    {
        std::lock_guard lock(calls_mu_);
        call = calls_[address]++;
    }
    GetResult result{std::nullopt, latency(address, call)};
    if (fails(address, call))
        return result;
    result.data = backing_->get(address).data;
    return result;
}

void SimStore::put(const Address& address, Bytes serialized)
{
    backing_->put(address, std::move(serialized));
}

bool SimStore::contains(const Address& address) const
{
    return backing_->contains(address);
}

} // namespace swarm_ec
