#pragma once

// Binomial error model for PAC-scoped erasure coding: how many parities keep
// the chance of losing more chunks than there are parities below alpha.

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace swarm_ec {

enum class Level : int { none = 0, medium = 1, strong = 2, insane = 3, paranoid = 4 };

struct SecurityLevel {
    Level id;
    std::string_view name;
    double epsilon; // assumed per-chunk retrieval error rate
};

inline constexpr std::array<SecurityLevel, 5> kSecurityLevels = {{
    {Level::none, "none", 0.0},
    {Level::medium, "medium", 0.01},
    {Level::strong, "strong", 0.05},
    {Level::insane, "insane", 0.10},
    {Level::paranoid, "paranoid", 0.50},
}};

inline constexpr double kDefaultAlpha = 1e-6;
inline constexpr int kBranchingFactor = 128;

// Relative slack when comparing a tail probability against alpha. Several
// table rows sit exactly on the bound (e.g. eps^(k+1) == alpha for a single
// chunk) and must not be lost to rounding.
inline constexpr double kAlphaTolerance = 1e-9;

const SecurityLevel& security_level(Level level);
// Case-insensitive name or numeric id.
std::optional<Level> parse_level(std::string_view text);

double binomial_pmf(int i, int n, double eps);
double binomial_cdf(int k, int n, double eps);
// P(more than k of n trials fail), summed over the upper tail directly.
double binomial_tail(int k, int n, double eps);

// Smallest k with P(X > k) <= alpha for X ~ Bin(n, eps).
int min_parities_fixed_total(int n, double eps, double alpha = kDefaultAlpha);

// Smallest k with P(X > k) <= alpha for X ~ Bin(m + k, eps), m + k <= 128.
// Throws ErrorCode::infeasible when no such k exists.
int min_parities_for_data(int m, double eps, double alpha = kDefaultAlpha);
std::optional<int> try_min_parities_for_data(int m, double eps, double alpha = kDefaultAlpha);

struct ParityPlan {
    SecurityLevel level;
    bool encrypted = false;
    int m = 0;  // max data chunks in a full PAC
    int k = 0;  // parities of a full PAC
    double alpha = kDefaultAlpha;

    [[nodiscard]] int data_ref_size() const noexcept { return encrypted ? 64 : 32; }
    [[nodiscard]] static constexpr int parity_ref_size() noexcept { return 32; }
};

ParityPlan plan_for_level(Level level, bool encrypted);

// Parities appended to a batch of i data chunks.
int parities_for_partial_batch(int i, Level level, bool encrypted);

double file_success_probability(double file_bytes, double alpha = kDefaultAlpha);

// Extra copies of a single chunk so that all 1 + k copies failing stays below alpha.
int singleton_parities(double eps, double alpha = kDefaultAlpha);

int replica_count(Level level);
// log2(replica_count); the prefix depth of dispersed replica bins.
int replica_depth(Level level);

struct ParityTableRow {
    int parities = 0;
    int min_chunks = 0;
    int max_chunks = 0;
    // Encrypted column in the conventional halved form; empty when no
    // encrypted batch size falls in the row.
    std::optional<int> encrypted_min;
    std::optional<int> encrypted_max;
};

std::vector<ParityTableRow> parity_table(Level level);

} // namespace swarm_ec
