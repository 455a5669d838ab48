#pragma once
// Deterministic generator of random purely exponential equations with a
// planted solution, used to cross-check sieve soundness: whatever the sieve
// concludes at a random modulus must stay consistent with the known solution.

#include <gmpxx.h>

#include <cmath>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "expsieve/equation.hpp"
#include "expsieve/sieve.hpp"

namespace planted {

struct PlantedCase {
    expsieve::ExpEquation eq;
    expsieve::Assignment solution;   // evaluates to exactly zero
    expsieve::FactoredModulus modulus;  // value <= 100000, sieve cost pre-screened
};

// Builds one case from a seed. Random terms are corrected by one closing term
// whose coefficient absorbs the partial sum, so the planted assignment is a
// genuine solution by construction; bases stay <= 50 and exponents <= 12.
inline PlantedCase make_planted_case(expsieve::u64 seed) {
    using expsieve::u64;
    std::mt19937_64 rng(seed);
    auto pick = [&](u64 lo, u64 hi) {
        return lo + rng() % (hi - lo + 1);
    };

    const std::vector<std::string> pool{"x", "y", "z", "u", "v"};
    for (int attempt = 0;; ++attempt) {
        size_t n_vars = pick(1, 3);
        expsieve::Assignment values;
        for (size_t i = 0; i < n_vars; ++i) values[pool[i]] = pick(1, 12);

        size_t n_random = pick(2, 3);
        std::vector<expsieve::Term> terms;
        for (size_t i = 0; i < n_random; ++i) {
            expsieve::Term t;
            t.coeff = static_cast<long long>(pick(1, 5)) * (rng() % 2 ? 1 : -1);
            size_t n_factors = rng() % 4 == 0 ? 2 : 1;
            for (size_t f = 0; f < n_factors; ++f) {
                const std::string& var = pool[pick(0, n_vars - 1)];
                // Keep base^value <= 2^20 so coefficients stay in range.
                u64 cap = static_cast<u64>(std::pow(2.0, 20.0 / values[var]));
                if (cap > 50) cap = 50;
                if (cap < 2) cap = 2;
                t.factors.push_back({static_cast<long long>(pick(2, cap)), var});
            }
            terms.push_back(std::move(t));
        }

        mpz_class partial = 0;
        for (const auto& t : terms) {
            mpz_class prod(static_cast<long>(t.coeff));
            for (const auto& f : t.factors) {
                mpz_class p;
                mpz_ui_pow_ui(p.get_mpz_t(), f.base, values.at(f.var));
                prod *= p;
            }
            partial += prod;
        }

        const std::string closer = pool[n_vars];  // a fresh variable, value 1
        if (partial == 0) {
            u64 base = pick(2, 50);
            long long b = static_cast<long long>(base);
            terms.push_back({1, {{b, closer}}});
            terms.push_back({-1, {{b, closer}}});
            values[closer] = pick(1, 12);
        } else {
            mpz_class mag = abs(partial);
            long long p = 0;
            for (long long q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}) {
                if (mpz_divisible_ui_p(mag.get_mpz_t(), q)) {
                    p = q;
                    break;
                }
            }
            if (p == 0) continue;  // no small prime divides the partial sum; redraw
            mpz_class coeff = -partial / static_cast<long>(p);
            if (!coeff.fits_slong_p()) continue;
            terms.push_back({coeff.get_si(), {{p, closer}}});
            values[closer] = 1;
        }

        PlantedCase out;
        out.eq = expsieve::ExpEquation::from_terms(std::move(terms));
        out.solution = values;
        if (evaluate(out.eq, out.solution) != 0)
            throw std::logic_error("planted assignment fails to solve the generated equation");

        for (int tries = 0; tries < 200; ++tries) {
            auto fm = expsieve::FactoredModulus::of(pick(2, 100000));
            if (expsieve::estimate_sieve_cost(out.eq, fm) <= 5'000'000) {
                out.modulus = fm;
                return out;
            }
        }
        out.modulus = expsieve::FactoredModulus::of(pick(2, 64));  // tiny fallback
        return out;
    }
}

// True when the sieve outcome is consistent with the planted solution: a
// survivor system must admit its signature, an exponent bound must not cut it
// off, and an outright exclusion contradicts the solution's existence.
inline bool planted_case_consistent(const PlantedCase& c, const expsieve::SieveOutcome& outcome) {
    using expsieve::u64;
    if (std::holds_alternative<expsieve::NoSolutionOutcome>(outcome)) return false;
    if (const auto* eb = std::get_if<expsieve::ExponentBoundOutcome>(&outcome))
        return c.solution.at(eb->variable) <= eb->bound;
    const auto& sys = std::get<expsieve::SurvivorsOutcome>(outcome).system;
    std::vector<u64> tuple;
    for (const auto& v : sys.variables) tuple.push_back(c.solution.at(v));
    return sys.admits(tuple);
}

}  // namespace planted
