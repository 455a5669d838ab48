#pragma once
// Residue sequences of powers: for fixed base b and modulus M, the sequence
// b^1, b^2, ... mod M is eventually periodic. This module computes the
// minimal preperiod/cycle decomposition that the sieve engine consumes.

#include <vector>

#include "expsieve/common.hpp"

namespace expsieve {

// Minimal decomposition of (base^t mod modulus) for t >= 1: the first
// lambda() values are the preperiod, after which the cycle repeats forever.
// Both lambda() and period() are the least values realizing the sequence.
struct EventuallyPeriodicSequence {
    u64 base = 0;
    u64 modulus = 0;
    std::vector<u64> preperiod;  // values at t = 1 .. lambda()
    std::vector<u64> cycle;      // values at t = lambda()+1 .. lambda()+period(), repeating

    u64 lambda() const { return preperiod.size(); }
    u64 period() const { return cycle.size(); }

    // Value at exponent t >= 1.
    u64 at(u64 t) const {
        if (t <= lambda()) return preperiod[t - 1];
        return cycle[(t - lambda() - 1) % period()];
    }

    bool operator==(const EventuallyPeriodicSequence&) const = default;
};

// Computes the minimal eventually-periodic decomposition by walking the orbit
// of base mod modulus until the first repeated value. modulus >= 2.
// When gcd(base, modulus) = 1 the preperiod is empty and the period equals
// the multiplicative order of base.
EventuallyPeriodicSequence residue_sequence(u64 base, u64 modulus);

}  // namespace expsieve
