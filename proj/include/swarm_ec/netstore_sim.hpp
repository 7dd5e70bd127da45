#pragma once

// Simulated lossy network store.
//
// Randomness is counter based: every draw is a pure function of
// (seed, address, call number, stream), mixed with SplitMix64. The call
// number counts gets of one address, so outcomes do not depend on the order
// in which different addresses are requested.

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "swarm_ec/chunk_store.hpp"

namespace swarm_ec {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

struct LatencyModel {
    enum class Kind { constant, uniform, lognormal };
    Kind kind = Kind::constant;
    double a = 0.0; // constant value | uniform lo | lognormal mu
    double b = 0.0; // uniform hi | lognormal sigma

    static LatencyModel constant(double ms) { return {Kind::constant, ms, 0.0}; }
    static LatencyModel uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
    static LatencyModel lognormal(double mu, double sigma) { return {Kind::lognormal, mu, sigma}; }

    // "constant:V", "uniform:LO:HI" or "lognormal:MU:SIGMA"
    static LatencyModel parse(std::string_view text);
    [[nodiscard]] std::string describe() const;

    // u1, u2 uniform in [0, 1)
    [[nodiscard]] double sample(double u1, double u2) const;
};

enum class FailureMode { per_get_transient, per_chunk_permanent };

std::string_view to_string(FailureMode mode) noexcept;
FailureMode parse_failure_mode(std::string_view text);

// Neighbourhood of addresses whose top `depth` bits equal `bits`.
struct DeadPrefix {
    std::uint32_t bits = 0;
    int depth = 0;

    // binary digits, optionally prefixed with 0b, e.g. "0b101"
    static DeadPrefix parse(std::string_view text);
    [[nodiscard]] bool covers(const Address& address) const { return address.prefix(depth) == bits; }
};

struct SimConfig {
    std::uint64_t seed = 0;
    double eps = 0.0;
    LatencyModel latency = LatencyModel::constant(0.0);
    FailureMode failure_mode = FailureMode::per_chunk_permanent;
    std::vector<DeadPrefix> dead_prefixes;
};

class SimStore final : public ChunkSource {
public:
    explicit SimStore(SimConfig config, std::shared_ptr<ChunkSource> backing = std::make_shared<MemoryStore>());

    GetResult get(const Address& address) override;
    void put(const Address& address, Bytes serialized) override;
    [[nodiscard]] bool contains(const Address& address) const override;

    [[nodiscard]] const SimConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::shared_ptr<ChunkSource>& backing() const noexcept { return backing_; }

    // Whether a get of `address` on call number `call` fails, before checking presence.
    [[nodiscard]] bool fails(const Address& address, std::uint64_t call) const;
    [[nodiscard]] double latency(const Address& address, std::uint64_t call) const;

private:
    [[nodiscard]] double uniform(const Address& address, std::uint64_t call, std::uint64_t stream) const;

    SimConfig config_;
    std::shared_ptr<ChunkSource> backing_;
    std::mutex calls_mu_;
    std::map<Address, std::uint64_t> calls_;
};

} // namespace swarm_ec
