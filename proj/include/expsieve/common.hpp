#pragma once
// Shared low-level helpers: 64-bit modular arithmetic, deterministic primality,
// and integer factorization for moduli handling.

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace expsieve {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((u128)a * b % m); }

inline u64 powmod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

inline u64 lcm_u64(u64 a, u64 b) { return a / std::gcd(a, b) * b; }

// lcm that refuses to wrap around 64 bits (lattice sizes are built from
// repeated lcms of user-controlled cycle lengths).
inline u64 lcm_checked_u64(u64 a, u64 b) {
    u64 q = a / std::gcd(a, b);
    if (q > UINT64_MAX / b) throw std::overflow_error("lattice lcm overflows 64 bits");
    return q * b;
}

// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime_u64(u64 n);

// Prime factorization of a 64-bit integer (trial division + Pollard rho),
// returned as sorted (prime, exponent) pairs. n >= 1; n == 1 gives {}.
std::vector<std::pair<u64, int>> factorize_u64(u64 n);

// Multiplicative order of a mod m; requires gcd(a, m) == 1, m >= 2.
u64 multiplicative_order(u64 a, u64 m);

// Euler phi and Carmichael lambda for 64-bit integers (used by tests).
u64 euler_phi(u64 n);
u64 carmichael_lambda(u64 n);

}  // namespace expsieve
