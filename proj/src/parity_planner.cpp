#include "swarm_ec/parity_planner.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "swarm_ec/error.hpp"

namespace swarm_ec {
namespace {

void check_binomial_domain(int i, int n, double eps)
{
    if (n < 0 || n > kBranchingFactor || i < 0 || i > n)
        throw Error(ErrorCode::invalid_argument,
            "binomial arguments out of range (i=" + std::to_string(i) + ", n=" + std::to_string(n) + ")");
    if (!(eps >= 0.0 && eps <= 1.0))
        throw Error(ErrorCode::invalid_argument, "probability outside [0,1]");
}

double log_choose(int n, int i)
{
    return std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
}

bool within_alpha(double tail, double alpha)
{
    return tail <= alpha * (1.0 + kAlphaTolerance);
}

// Parities for a batch of `chunks` data chunks. A batch that cannot meet
// alpha within 128 slots takes every remaining slot as a parity.
// Memoized: the decoder asks for the same handful of plans once per batch.
int saturated_parities(int chunks, double eps, double alpha)
{
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, int> cache;
    const auto key = std::make_tuple(chunks, eps, alpha);
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    int k = kBranchingFactor - chunks;
    if (auto found = try_min_parities_for_data(chunks, eps, alpha))
        k = *found;
    std::lock_guard lock(mu);
    cache.emplace(key, k);
    return k;
}

int full_batch_chunks(double eps, double alpha)
{
    for (int m = 1; m <= kBranchingFactor; ++m)
        if (m + saturated_parities(m, eps, alpha) >= kBranchingFactor)
            return m;
    return kBranchingFactor;
}

} // namespace

const SecurityLevel& security_level(Level level)
{
    int id = static_cast<int>(level);
    if (id < 0 || id >= static_cast<int>(kSecurityLevels.size()))
        throw Error(ErrorCode::invalid_argument, "unknown security level " + std::to_string(id));
    return kSecurityLevels[id];
}

std::optional<Level> parse_level(std::string_view text)
{
    std::string lower;
    for (char c : text)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (const auto& l : kSecurityLevels)
        if (lower == l.name || lower == std::to_string(static_cast<int>(l.id)))
            return l.id;
    return std::nullopt;
}

double binomial_pmf(int i, int n, double eps)
{
    check_binomial_domain(i, n, eps);
    if (eps == 0.0)
        return i == 0 ? 1.0 : 0.0;
    if (eps == 1.0)
        return i == n ? 1.0 : 0.0;
    return std::exp(log_choose(n, i) + i * std::log(eps) + (n - i) * std::log1p(-eps));
}

double binomial_cdf(int k, int n, double eps)
{
    check_binomial_domain(k, n, eps);
    if (k == n)
        return 1.0;
    double sum = 0.0;
    for (int i = 0; i <= k; ++i)
        sum += binomial_pmf(i, n, eps);
    return std::min(sum, 1.0);
}

double binomial_tail(int k, int n, double eps)
{
    check_binomial_domain(k, n, eps);
    double sum = 0.0;
    for (int i = n; i > k; --i)
        sum += binomial_pmf(i, n, eps);
    return std::min(sum, 1.0);
}

int min_parities_fixed_total(int n, double eps, double alpha)
{
    check_binomial_domain(0, n, eps);
    for (int k = 0; k <= n; ++k)
        if (within_alpha(binomial_tail(k, n, eps), alpha))
            return k;
    throw Error(ErrorCode::infeasible, "no parity count meets alpha");
}

std::optional<int> try_min_parities_for_data(int m, double eps, double alpha)
{
    if (m < 1 || m > kBranchingFactor)
        throw Error(ErrorCode::invalid_argument, "data chunk count must be in 1..128");
    if (!(eps >= 0.0 && eps <= 1.0))
        throw Error(ErrorCode::invalid_argument, "probability outside [0,1]");
    for (int k = 0; m + k <= kBranchingFactor; ++k)
        if (within_alpha(binomial_tail(k, m + k, eps), alpha))
            return k;
    return std::nullopt;
}

int min_parities_for_data(int m, double eps, double alpha)
{
    if (auto k = try_min_parities_for_data(m, eps, alpha))
        return *k;
    throw Error(ErrorCode::infeasible,
        "no parity count fits beside " + std::to_string(m) + " data chunks in 128 slots");
}

ParityPlan plan_for_level(Level level, bool encrypted)
{
    const SecurityLevel& sl = security_level(level);
    ParityPlan plan{sl, encrypted, 0, 0, kDefaultAlpha};
    const int unencrypted_m = full_batch_chunks(sl.epsilon, plan.alpha);
    if (!encrypted) {
        plan.m = unencrypted_m;
        plan.k = saturated_parities(unencrypted_m, sl.epsilon, plan.alpha);
        return plan;
    }
    // An encrypted reference occupies two hash-sized segments, so i encrypted
    // chunks are planned like 2i plain ones; parity references stay single.
    for (int i = 1; 2 * i <= unencrypted_m; ++i) {
        int k = saturated_parities(2 * i, sl.epsilon, plan.alpha);
        if (2 * i + k > kBranchingFactor)
            break;
        plan.m = i;
        plan.k = k;
    }
    return plan;
}

int parities_for_partial_batch(int i, Level level, bool encrypted)
{
    const ParityPlan plan = plan_for_level(level, encrypted);
    if (i < 1 || i > plan.m)
        throw Error(ErrorCode::invalid_argument,
            "batch of " + std::to_string(i) + " chunks outside 1.." + std::to_string(plan.m));
    return saturated_parities(encrypted ? 2 * i : i, plan.level.epsilon, plan.alpha);
}

double file_success_probability(double file_bytes, double alpha)
{
    if (file_bytes < 0)
        throw Error(ErrorCode::invalid_argument, "negative file size");
    return std::pow(1.0 - alpha, file_bytes / static_cast<double>(1u << 19));
}

int singleton_parities(double eps, double alpha)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw Error(ErrorCode::invalid_argument, "singleton parities need 0 < eps < 1");
    double k = std::log(alpha) / std::log(eps) - 1.0;
    return std::max(0, static_cast<int>(std::ceil(k - 1e-9)));
}

int replica_count(Level level)
{
    const SecurityLevel& sl = security_level(level);
    if (sl.epsilon == 0.0)
        return 0;
    // Replicas fill 2^d address-prefix bins; d is capped at 4.
    return std::min(16, static_cast<int>(std::bit_ceil(static_cast<unsigned>(singleton_parities(sl.epsilon)))));
}

int replica_depth(Level level)
{
    int count = replica_count(level);
    return count <= 1 ? 0 : std::countr_zero(static_cast<unsigned>(count));
}

std::vector<ParityTableRow> parity_table(Level level)
{
    const ParityPlan plan = plan_for_level(level, false);
    const ParityPlan enc = plan_for_level(level, true);
    std::vector<ParityTableRow> rows;
    for (int i = 1; i <= plan.m; ++i) {
        int k = parities_for_partial_batch(i, level, false);
        if (rows.empty() || rows.back().parities != k)
            rows.push_back({k, i, i, std::nullopt, std::nullopt});
        else
            rows.back().max_chunks = i;
    }
    for (auto& row : rows) {
        int hi = std::min(row.max_chunks / 2, enc.m);
        int lo = std::max(row.min_chunks / 2, 1);
        if (hi >= 1 && lo <= hi) {
            row.encrypted_min = lo;
            row.encrypted_max = hi;
        }
    }
    return rows;
}

} // namespace swarm_ec
