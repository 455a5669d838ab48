#include "expsieve/residues.hpp"

#include <stdexcept>
#include <unordered_map>

namespace expsieve {

EventuallyPeriodicSequence residue_sequence(u64 base, u64 modulus) {
    if (modulus < 2) throw std::invalid_argument("modulus must be at least 2");
    if (base < 2) throw std::invalid_argument("base must exceed 1");

    // Walk b^1, b^2, ... until a value repeats. The index of the first
    // occurrence of the repeated value marks the end of the preperiod; the
    // orbit length between occurrences is the period. This yields the minimal
    // decomposition because every value before the repeat is distinct.
    std::vector<u64> vals;
    std::unordered_map<u64, size_t> seen;  // value -> 1-based index of first occurrence
    u64 x = base % modulus;
    for (;;) {
        auto it = seen.find(x);
        if (it != seen.end()) {
            size_t first = it->second;  // 1-based exponent where x first appeared
            EventuallyPeriodicSequence seq;
            seq.base = base;
            seq.modulus = modulus;
            seq.preperiod.assign(vals.begin(), vals.begin() + (first - 1));
            seq.cycle.assign(vals.begin() + (first - 1), vals.end());
            return seq;
        }
        vals.push_back(x);
        seen.emplace(x, vals.size());
        x = mulmod(x, base % modulus, modulus);
    }
}

}  // namespace expsieve
