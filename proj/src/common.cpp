#include "expsieve/common.hpp"

#include <algorithm>

namespace expsieve {

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // This witness set is deterministic for all 64-bit integers.
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

namespace {

u64 pollard_rho(u64 n) {
    if ((n & 1) == 0) return 2;
    for (u64 c = 1;; ++c) {
        auto f = [n, c](u64 x) { return (mulmod(x, x, n) + c) % n; };
        u64 x = 2, y = 2, d = 1;
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

void factor_rec(u64 n, std::map<u64, int>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        out[n]++;
        return;
    }
    u64 d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace

std::vector<std::pair<u64, int>> factorize_u64(u64 n) {
    if (n == 0) throw std::invalid_argument("factorize_u64: n must be >= 1");
    std::map<u64, int> acc;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull,
                  37ull, 41ull, 43ull, 47ull, 53ull, 59ull, 61ull, 67ull, 71ull, 73ull}) {
        while (n % p == 0) { acc[p]++; n /= p; }
    }
    if (n > 1) factor_rec(n, acc);
    return {acc.begin(), acc.end()};
}

u64 multiplicative_order(u64 a, u64 m) {
    if (m < 2) throw std::invalid_argument("multiplicative_order: modulus must be >= 2");
    a %= m;
    if (std::gcd(a, m) != 1) throw std::invalid_argument("multiplicative_order: gcd(a, m) != 1");
    u64 lam = carmichael_lambda(m);
    u64 order = lam;
    for (auto [p, k] : factorize_u64(lam)) {
        for (int i = 0; i < k; ++i) {
            if (powmod(a, order / p, m) == 1) order /= p;
            else break;
        }
    }
    return order;
}

u64 euler_phi(u64 n) {
    u64 r = n;
    for (auto [p, k] : factorize_u64(n)) r = r / p * (p - 1);
    return r;
}

u64 carmichael_lambda(u64 n) {
    u64 lam = 1;
    for (auto [p, k] : factorize_u64(n)) {
        u64 pk = 1;
        for (int i = 0; i < k; ++i) pk *= p;
        u64 contrib;
        if (p == 2 && k >= 3) contrib = pk / 4;
        else contrib = pk / p * (p - 1);
        lam = lcm_u64(lam, contrib);
    }
    return lam;
}

}  // namespace expsieve
