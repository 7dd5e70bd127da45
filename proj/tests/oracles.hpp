#pragma once

// Reference computations written without the library's arithmetic.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// GF(2^8) multiply, polynomial 0x11d, by shift and add.
inline std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b)
{
    std::uint8_t p = 0;
    while (b) {
        if (b & 1)
            p ^= a;
        bool carry = a & 0x80;
        a = static_cast<std::uint8_t>(a << 1);
        if (carry)
            a ^= 0x1d;
        b >>= 1;
    }
    return p;
}

inline std::uint8_t gf_inv(std::uint8_t a)
{
    for (int x = 1; x < 256; ++x)
        if (gf_mul(a, static_cast<std::uint8_t>(x)) == 1)
            return static_cast<std::uint8_t>(x);
    return 0;
}

// Value at x of the polynomial of degree < m through (r, ys[r]) for r = 0..m-1.
inline std::uint8_t lagrange_at(const std::vector<std::uint8_t>& ys, int x)
{
    const int m = static_cast<int>(ys.size());
    std::uint8_t acc = 0;
    for (int r = 0; r < m; ++r) {
        std::uint8_t num = 1, den = 1;
        for (int j = 0; j < m; ++j) {
            if (j == r)
                continue;
            num = gf_mul(num, static_cast<std::uint8_t>(x ^ j));
            den = gf_mul(den, static_cast<std::uint8_t>(r ^ j));
        }
        acc ^= gf_mul(ys[r], gf_mul(num, gf_inv(den)));
    }
    return acc;
}

// Pascal's triangle in long double; exact well beyond n = 128 in relative terms.
inline long double choose(int n, int k)
{
    static std::vector<std::vector<long double>> rows;
    while (static_cast<int>(rows.size()) <= n) {
        const int r = static_cast<int>(rows.size());
        std::vector<long double> row(r + 1, 1.0L);
        for (int i = 1; i < r; ++i)
            row[i] = rows[r - 1][i - 1] + rows[r - 1][i];
        rows.push_back(std::move(row));
    }
    return (k < 0 || k > n) ? 0.0L : rows[n][k];
}

// P(more than k of n independent trials fail).
inline long double binomial_tail(int k, int n, long double eps)
{
    long double s = 0.0L;
    for (int i = k + 1; i <= n; ++i)
        s += choose(n, i) * std::pow(eps, static_cast<long double>(i)) * std::pow(1.0L - eps, static_cast<long double>(n - i));
    return s;
}

// P(at most k failures) by enumerating every failure pattern.
inline double brute_force_cdf(int k, int n, double eps)
{
    double s = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        int fails = __builtin_popcount(mask);
        if (fails <= k)
            s += std::pow(eps, fails) * std::pow(1.0 - eps, n - fails);
    }
    return s;
}

// Smallest k whose tail meets alpha (ties within 1e-9 relative count), searching 0..limit; -1 when none.
inline int min_k(int data, double eps, double alpha, int limit)
{
    for (int k = 0; k <= limit; ++k)
        if (binomial_tail(k, data + k, eps) <= alpha * (1.0L + 1e-9L))
            return k;
    return -1;
}

inline std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n)
{
    std::vector<std::uint8_t> out(n);
    for (auto& b : out)
        b = static_cast<std::uint8_t>(rng());
    return out;
}

} // namespace oracle
