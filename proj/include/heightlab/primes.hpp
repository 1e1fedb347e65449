// Primality testing and integer factorization (trial division + Pollard rho).
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "heightlab/bigint.hpp"

namespace heightlab {

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace detail

// Deterministic Miller-Rabin for the full 64-bit range (fixed witness set).
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = detail::powmod_u64(a % n, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = detail::mulmod_u64(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

// Deterministic below 2^64; for larger operands falls back to a strong
// probable-prime test (40 rounds), which is what the factorizer relies on.
inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    if (n <= Int(std::numeric_limits<std::uint64_t>::max()))
        return is_prime_u64(static_cast<std::uint64_t>(n));
    return mpz_probab_prime_p(n.backend().data(), 40) != 0;
}

namespace detail {

// Pollard rho, Brent variant. Expects n composite, odd, > 1.
inline Int pollard_brent(const Int& n, std::uint64_t seed) {
    if (n % 2 == 0) return 2;
    Int y = Int(seed) % n, c = Int(seed / 3 + 1) % n, m = 128;
    if (y == 0) y = 1;
    if (c == 0) c = 1;
    Int g = 1, r = 1, q = 1, x = 0, ys = 0;
    while (g == 1) {
        x = y;
        for (Int i = 0; i < r; ++i) y = (y * y + c) % n;
        Int k = 0;
        while (k < r && g == 1) {
            ys = y;
            const Int bound = std::min(m, Int(r - k));
            for (Int i = 0; i < bound; ++i) {
                y = (y * y + c) % n;
                q = q * abs(x - y) % n;
            }
            g = gcd(q, n);
            k += m;
        }
        r *= 2;
    }
    if (g == n) {
        do {
            ys = (ys * ys + c) % n;
            g = gcd(abs(x - ys), n);
        } while (g == 1);
    }
    return g;
}

inline void factor_into(Int n, std::map<Int, long>& out, std::uint64_t seed) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    Int d = n;
    while (d == n) {
        d = pollard_brent(n, seed);
        seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
    }
    factor_into(d, out, seed);
    factor_into(n / d, out, seed);
}

}  // namespace detail

// Prime factorization of |n| for n != 0. Trial division by small primes,
// then Pollard rho on the remaining cofactor. Sized for operands < 2^128.
inline std::map<Int, long> factorize(const Int& n_in) {
    if (n_in == 0) throw DomainError("factorization of zero");
    Int n = abs(n_in);
    std::map<Int, long> out;
    for (std::uint64_t p = 2; p < 100000 && Int(p) * p <= n; p = (p == 2 ? 3 : p + 2)) {
        if (n % p == 0) {
            Int rest;
            out[Int(p)] = remove_factor(n, Int(p), rest);
            n = rest;
        }
    }
    if (n > 1) {
        if (n < Int(100000) * 100000) {
            ++out[n];  // cofactor below trial bound squared is prime
        } else {
            detail::factor_into(n, out, 0x5deece66dULL);
        }
    }
    return out;
}

}  // namespace heightlab
