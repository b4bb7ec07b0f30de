// include/terncorr/numeric.hpp: 64/128-bit integer helpers: powers of three,
// modular arithmetic, and prime factorisation of group orders.

#pragma once

#include <terncorr/error.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace terncorr::num {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Largest extension degree whose group order 3^n - 1 fits in 64 bits.
inline constexpr unsigned kMaxPow3Exponent = 40;

constexpr u64 pow3(unsigned e) {
    if (e > kMaxPow3Exponent) {
        throw Error(ErrorCode::Overflow, "3^" + std::to_string(e) + " exceeds 64 bits");
    }
    u64 r = 1;
    for (unsigned i = 0; i < e; ++i) {
        r *= 3;
    }
    return r;
}

constexpr u128 pow3_wide(unsigned e) {
    u128 r = 1;
    for (unsigned i = 0; i < e; ++i) {
        r *= 3;
    }
    return r;
}

constexpr u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

constexpr u64 powmod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1U) {
            result = mulmod(result, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1U;
    }
    return result;
}

inline u128 gcd_wide(u128 a, u128 b) {
    while (b != 0) {
        const u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline bool is_prime(u64 n) {
    if (n < 2) {
        return false;
    }
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) {
            return n == p;
        }
    }
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1U) == 0) {
        d >>= 1U;
        ++s;
    }
    // Deterministic witness set for all 64-bit integers.
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) {
            continue;
        }
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) {
            return false;
        }
    }
    return true;
}

namespace detail {

inline u64 pollard_rho(u64 n) {
    if (n % 2 == 0) {
        return 2;
    }
    for (u64 c = 1;; ++c) {
        u64 x = 2;
        u64 y = 2;
        u64 d = 1;
        auto step = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        while (d == 1) {
            x = step(x);
            y = step(step(y));
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) {
            return d;
        }
    }
}

inline void factor_into(u64 n, std::vector<u64> &out) {
    if (n == 1) {
        return;
    }
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    for (u64 p = 2; p < 1000 && p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            factor_into(n / p, out);
            return;
        }
    }
    const u64 d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

} // namespace detail

/// Distinct prime divisors of n, ascending.
inline std::vector<u64> prime_divisors(u64 n) {
    std::vector<u64> primes;
    detail::factor_into(n, primes);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    return primes;
}

inline unsigned two_adic_valuation(u128 v) {
    unsigned e = 0;
    while (v != 0 && (v & 1U) == 0) {
        v >>= 1U;
        ++e;
    }
    return e;
}

} // namespace terncorr::num
