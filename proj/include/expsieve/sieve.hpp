#pragma once
// Congruence sieve for purely exponential equations. Enumerates the options
// of each exponent variable modulo a factored modulus (explicit small values
// below the preperiod/lower-bound floor, congruence classes above it), seeds
// the enumeration at the cheapest prime power, then refines survivor tuples
// through the remaining prime powers by lattice lifting. Outcomes are either
// a contradiction (no tuple satisfies the congruence), a proved upper bound
// on one exponent, or the surviving residue-class system.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "expsieve/common.hpp"
#include "expsieve/constraints.hpp"
#include "expsieve/equation.hpp"
#include "expsieve/system.hpp"

namespace expsieve {

struct FactoredModulus {
    u64 value = 1;
    std::vector<std::pair<u64, int>> factors;  // (prime, exponent), ascending

    // Factorizes m (>= 2).
    static FactoredModulus of(u64 m);
    // Accepts "2^2*7*13" style products or a plain decimal; the value is
    // re-factored, so non-prime parts are fine. Throws std::invalid_argument
    // on malformed input, zero/one values, or overflow.
    static FactoredModulus parse(const std::string& text);

    std::string str() const;               // canonical "2^4*3^3*7", "1" if empty
    std::vector<u64> prime_powers() const; // p^k per factor, ascending by p

    bool operator==(const FactoredModulus&) const = default;
};

struct NoSolutionOutcome {
    FactoredModulus modulus;
    bool operator==(const NoSolutionOutcome&) const = default;
};

struct ExponentBoundOutcome {
    std::string variable;
    u64 bound = 0;  // every admissible tuple has variable <= bound
    FactoredModulus modulus;
    bool operator==(const ExponentBoundOutcome&) const = default;
};

struct SurvivorsOutcome {
    ResidueClassSystem system;
    FactoredModulus modulus;
    bool operator==(const SurvivorsOutcome&) const = default;
};

using SieveOutcome = std::variant<NoSolutionOutcome, ExponentBoundOutcome, SurvivorsOutcome>;

class BudgetExceeded : public std::runtime_error {
  public:
    BudgetExceeded(u64 budget, u64 needed)
        : std::runtime_error("sieve budget exceeded: needs at least " + std::to_string(needed) +
                             " candidate evaluations, budget is " + std::to_string(budget)),
          budget(budget),
          needed(needed) {}
    u64 budget;
    u64 needed;  // running lower bound on the evaluations required
};

struct SieveOptions {
    u64 budget = 1'000'000'000;  // max candidate evaluations before BudgetExceeded
    int threads = 1;
    u64* evaluations = nullptr;  // if set, receives the evaluation count on success
};

// Runs the sieve. Candidate batches are counted against the budget before
// they are evaluated, so BudgetExceeded is deterministic regardless of thread
// count; the survivor set (a set, not a sequence) is likewise identical for
// every thread count. Per-prime-power moduli must stay below 2^20 (the
// residue-sequence walk is dense).
SieveOutcome sieve(const ExpEquation& eq, const FactoredModulus& modulus,
                   const ConstraintSet& constraints = {}, const SieveOptions& opts = {});
SieveOutcome sieve(const ExpEquation& eq, u64 modulus, const ConstraintSet& constraints = {},
                   const SieveOptions& opts = {});

// Heuristic ranking cost: product over variables of (floor + joint lattice)
// where the lattice is the lcm of the cycle lengths over all prime powers.
// Used to order and budget-gate candidates in auto_modulus_search; an upper
// proxy, often far above the work the seeded refinement actually performs.
u64 estimate_sieve_cost(const ExpEquation& eq, const FactoredModulus& modulus,
                        const ConstraintSet& constraints = {});

struct ChainStep {
    FactoredModulus modulus;
    ConstraintSet effective_constraints;  // caller constraints + floors from prior steps
    SieveOutcome outcome;
};

struct ChainResult {
    SieveOutcome outcome;  // composed conclusion over the lcm of processed moduli
    std::vector<ChainStep> steps;
    // Explicit exponent values that escaped the class description per
    // variable: small survivor values and proved per-step bounds.
    std::map<std::string, std::set<u64>> escapes;
};

// Intersects the residue-class systems produced by sieving each modulus in
// turn. Floors established by earlier steps become lower bounds for later
// ones. If the running class set empties, the conclusion is a contradiction
// (no escapes), an exponent bound (escapes in exactly one variable), or the
// escape values themselves; otherwise the surviving intersection is returned.
ChainResult sieve_chain(const ExpEquation& eq, const std::vector<FactoredModulus>& moduli,
                        const ConstraintSet& constraints = {}, const SieveOptions& opts = {});

// Searches products of p^k (p in `primes`, 1 <= k <= caps.at(p), default 1)
// for moduli whose sieve outcome certifies something (a contradiction or an
// exponent bound). Candidates are ranked by estimate_sieve_cost and evaluated
// in that order while the estimate fits in the remaining enumeration budget.
// Returns the certifying (modulus, outcome) pairs in rank order.
std::vector<std::pair<FactoredModulus, SieveOutcome>> auto_modulus_search(
    const ExpEquation& eq, const std::vector<u64>& primes,
    const std::map<u64, int>& caps = {}, u64 enumeration_budget = 1'000'000'000,
    const ConstraintSet& constraints = {}, const SieveOptions& opts = {});

}  // namespace expsieve
